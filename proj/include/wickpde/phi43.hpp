#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wickpde/chaos.hpp"
#include "wickpde/fft.hpp"
#include "wickpde/grid.hpp"
#include "wickpde/initial.hpp"
#include "wickpde/noise.hpp"
#include "wickpde/phi42.hpp"

namespace wickpde::phi43 {

inline constexpr double kDefaultLength = 6.283185307179586;  // 2 pi

struct Config {
    GridSpec grid{3, 32, kDefaultLength};
    double horizon = 1.0;
    double dt = 1e-4;
    int n_save = 2;
    /// White noise of variance eps^-3 per site by default.
    InitialCondition u0{InitialCondition::Kind::white_noise, 1.0};
    chaos::BasisSpec chaos{1, 4, 3};
    NoiseChannel channel = NoiseChannel::zero_mode;
    /// Simpson intervals for the C11 quadrature.
    int quadrature_points = 64;
    /// Sideband part of C1; zero unless overridden.
    double c12 = 0.0;
    bool nonlinear = true;

    std::int64_t n_steps() const;
    std::int64_t save_every() const;
    NoiseParams noise_params() const;
    void validate() const;
};

struct Counterterms {
    double c0 = 0.0;
    double c11 = 0.0;
    double c12 = 0.0;

    /// 3 C0 - 9 (C11 + C12)
    double mass() const noexcept { return 3.0 * c0 - 9.0 * (c11 + c12); }
};

/// Stationary pointwise variance of the free lattice field,
///   C0 = L^-3 sum_{k != 0} 1 / (2 lambda_eps(k)).
double compute_c0(const GridSpec& grid);

/// Principal sunset constant in its auxiliary-time form,
///   C11 = int_0^inf sum_x eps^3 p_s(x) c_s(x)^2 ds,
/// with p_s the lattice heat kernel and c_s(x) = L^-3 sum_{k != 0}
/// exp(-s lambda) / (2 lambda) e^{ikx} the time-lagged free covariance; both
/// come from their Fourier symbols by inverse FFT. Composite Simpson in
/// u = log s on a window trimmed where the integrand falls below 1e-14 of
/// its peak. Evaluated with `quadrature_points` and twice as many intervals;
/// throws Error if the two differ by more than 1%, otherwise returns the
/// finer value.
double compute_c11(const GridSpec& grid, int quadrature_points);

/// Simpson value for exactly `intervals` intervals (no refinement check).
double c11_simpson(const GridSpec& grid, int intervals);

/// The quadrature window [log s_lo, log s_hi].
std::pair<double, double> c11_window(const GridSpec& grid);

/// Integrand g(s) = sum_x eps^3 p_s(x) c_s(x)^2 evaluated through FFTs.
double c11_integrand(const GridSpec& grid, double s);

Counterterms compute_counterterms(const Config& cfg);

/// One semi-implicit Euler step
///   R = Phi + dt (-(Phi^3) + m Phi) + dW,  Phi'_k = R_k / (1 + dt lambda_eps(k)),
/// with the cube dealiased.
class Stepper {
public:
    Stepper(const GridSpec& grid, double dt, double mass, bool nonlinear = true);

    /// Throws BlowUpError tagged with `step` if the new state is not finite.
    void step(RealField& phi, std::span<const double> increment, std::int64_t step_index = 0);

    const std::vector<double>& inverse_denominator() const noexcept { return inv_; }

private:
    GridSpec grid_;
    double dt_;
    double mass_;
    bool nonlinear_;
    DealiasedNonlinearity nl_;
    std::vector<double> inv_;
    std::vector<std::complex<double>> phi_hat_, cube_hat_, inc_hat_, next_, scratch_;
};

RealField phi43_step(const RealField& state, const Counterterms& ct, double dt, std::span<const double> increment);

struct Trajectory {
    Config config;
    SeedSpec seed;
    Counterterms counterterms;
    Snapshots phi;
    std::vector<double> gaussian_integrals;
    chaos::WickFeatureVector wick;
};

Trajectory run(const Config& cfg, const SeedSpec& seed);
/// Reuses counterterms computed once per configuration.
Trajectory run(const Config& cfg, const Counterterms& ct, const SeedSpec& seed);
Trajectory run(const Config& cfg, const Counterterms& ct, const SeedSpec& seed, const IncrementProvider& noise);

}  // namespace wickpde::phi43
