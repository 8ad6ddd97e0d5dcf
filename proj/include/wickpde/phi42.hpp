#pragma once

#include <cstdint>
#include <complex>
#include <vector>

#include "wickpde/chaos.hpp"
#include "wickpde/fft.hpp"
#include "wickpde/grid.hpp"
#include "wickpde/initial.hpp"
#include "wickpde/noise.hpp"

namespace wickpde {

/// Field values at the saved times t_s = s * T / n_save, s = 0..n_save.
struct Snapshots {
    std::vector<double> times;
    std::vector<RealField> fields;
};

namespace phi42 {

inline constexpr double kDefaultLength = 6.283185307179586;  // 2 pi

struct Config {
    GridSpec grid{2, 32, kDefaultLength};
    int cutoff = 8;
    double sigma = 1.0;
    double horizon = 1.0;
    double dt = 1e-3;
    /// Number of save intervals; n_save + 1 snapshots including t = 0.
    int n_save = 10;
    InitialCondition u0{};
    chaos::BasisSpec chaos{1, 4, 3};
    NoiseChannel channel = NoiseChannel::zero_mode;
    /// Drop the cubic drift (linear heat flow); used by exactness checks.
    bool nonlinear = true;

    std::int64_t n_steps() const;
    std::int64_t save_every() const;
    NoiseParams noise_params() const;
    /// Throws ConfigError on dim != 2, dt > T, non-integral T/dt, n_save not
    /// dividing the step count, or a cutoff outside [0, n/2].
    void validate() const;
};

struct RenormConstant {
    std::vector<double> times;
    std::vector<double> values;
};

/// Pointwise variance of X_eps at time t:
///   a(t) = L^-2 sum_{|k|_inf <= N} sigma^2 (1 - exp(-2 lambda_k t)) / (2 lambda_k),
/// the k = 0 term being sigma^2 t.
double renorm_value(const GridSpec& grid, int cutoff, double sigma, double t);
RenormConstant renorm_constant(const Config& cfg);

/// Per-configuration tables shared read-only by every trajectory.
struct Plan {
    explicit Plan(const Config& cfg);

    Config cfg;
    /// |2 pi k / L|^2 over the half-spectrum.
    std::vector<double> lambda;
    /// 1 inside the noise cutoff, 0 outside.
    std::vector<double> mask;
    /// exp(-lambda dt) and sigma sqrt((1 - exp(-2 lambda dt)) / (2 lambda dt)), masked.
    std::vector<double> decay, gain;
    /// 1 / (1 + dt lambda)
    std::vector<double> inv;
    /// a(t_n) for n = 0..n_steps
    std::vector<double> a_at_step;
    std::vector<chaos::MultiIndex> ordering;
};

/// Exact per-mode Ornstein-Uhlenbeck update of the stochastic convolution
///   dX = Lap X dt + sigma dW_N,  X(0) = 0,
/// driven by the path's increments; increments are rescaled per mode so each
/// step injects the exact integrated variance.
class StochasticConvolution {
public:
    explicit StochasticConvolution(const Plan& plan);

    void advance(std::span<const double> increment);
    const std::vector<std::complex<double>>& spectrum() const noexcept { return state_; }
    RealField field() const;
    void reset();

private:
    const Plan* plan_;
    Fft fft_;
    std::vector<std::complex<double>> state_, inc_hat_;
};

/// Semi-implicit Euler for the remainder v of u = v + X:
///   v^{n+1}_k = (v^n - dt D(v^n, X^n, a(t_n)))_k / (1 + dt lambda_k)
/// with D = v^3 + 3 v^2 X + 3 v X^{<>2} + X^{<>3}, evaluated dealiased.
class ShiftSolver {
public:
    ShiftSolver(const Plan& plan, const RealField& v0);

    /// `x_hat` is the spectrum of X at t_n, `a` = a(t_n).
    void advance(const std::vector<std::complex<double>>& x_hat, double a, std::int64_t step);
    const std::vector<std::complex<double>>& spectrum() const noexcept { return state_; }
    RealField field() const;

private:
    const Plan* plan_;
    DealiasedNonlinearity nl_;
    std::vector<std::complex<double>> state_, drift_hat_, next_;
};

/// Semi-implicit Euler on u itself with the Wick cube u^3 - 3 a u:
///   u^{n+1}_k = (u^n - dt (u^3 - 3 a u)^n + sigma dW^n)_k / (1 + dt lambda_k).
class DirectSolver {
public:
    DirectSolver(const Plan& plan, const RealField& u0);

    void advance(std::span<const double> increment, double a, std::int64_t step);
    const std::vector<std::complex<double>>& spectrum() const noexcept { return state_; }
    RealField field() const;

private:
    const Plan* plan_;
    DealiasedNonlinearity nl_;
    std::vector<std::complex<double>> state_, drift_hat_, inc_hat_, next_;
};

/// Pointwise Wick powers; the cube is dealiased.
RealField wick_square(const RealField& x, double a);
RealField wick_cube(const RealField& x, double a);

Snapshots stochastic_convolution(const Config& cfg, const IncrementProvider& noise);

/// v-snapshots; X is advanced in lock step with v from the same noise.
Snapshots solve_shift_equation(const Config& cfg, const IncrementProvider& noise, const RealField& u0);

/// u-snapshots of the renormalized equation, started at P_N u0.
Snapshots solve_direct_renormalized(const Config& cfg, const IncrementProvider& noise, const RealField& u0);

struct Trajectory {
    Config config;
    SeedSpec seed;
    Snapshots u, v, x;
    RenormConstant renorm;
    std::vector<double> gaussian_integrals;
    chaos::WickFeatureVector wick;
};

/// Noise, stochastic convolution, shift solve, reconstruction u = v + X and
/// Wick features in one pass. Throws BlowUpError with the step index.
Trajectory run(const Config& cfg, const SeedSpec& seed);
/// Same, with an explicit noise provider (must match the plan's noise parameters).
Trajectory run(const Plan& plan, const SeedSpec& seed, const IncrementProvider& noise);

/// P_N u0 for the configured cutoff.
RealField project_initial(const Config& cfg, const RealField& u0);

}  // namespace phi42
}  // namespace wickpde
