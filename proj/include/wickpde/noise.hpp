#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wickpde/grid.hpp"
#include "wickpde/rng.hpp"

namespace wickpde {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;

    bool operator==(const SeedSpec&) const = default;
};

enum class NoiseKind {
    /// Lattice white noise projected onto modes with max-norm index <= cutoff.
    spectral_truncated_2d,
    /// i.i.d. N(0, dt / eps^dim) per site and step.
    lattice_white_3d,
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseParams {
    GridSpec grid;
    std::int64_t n_steps = 0;
    double dt = 0.0;
    NoiseKind kind = NoiseKind::spectral_truncated_2d;
    /// Spectral cutoff N (spectral_truncated_2d only).
    int cutoff = 0;
    /// Amplitude applied by the solvers; increments themselves are unscaled.
    double sigma = 1.0;
};

/// Anything that can hand out the physical-space increment of step n.
class IncrementProvider {
public:
    virtual ~IncrementProvider() = default;
    virtual const NoiseParams& params() const noexcept = 0;
    /// Unscaled increment dW^n (sigma not applied).
    virtual void increment(std::int64_t step, std::span<double> out) const = 0;
};

/// On-the-fly noise generator. Increment n is a pure function of the seed
/// and parameters; with aggregation factor f it is the sum of f consecutive
/// fine increments of size dt / f, which gives one fixed Brownian path
/// observed at several step sizes.
class NoiseSource final : public IncrementProvider {
public:
    NoiseSource(SeedSpec seed, NoiseParams params);

    const NoiseParams& params() const noexcept override { return params_; }
    const SeedSpec& seed() const noexcept { return seed_; }
    std::int64_t aggregation() const noexcept { return aggregation_; }

    void increment(std::int64_t step, std::span<double> out) const override;

    /// Same path observed with steps `factor` times longer.
    NoiseSource coarsened(std::int64_t factor) const;

private:
    void fine_increment(std::int64_t fine_step, std::span<double> out) const;

    SeedSpec seed_;
    NoiseParams params_;
    std::int64_t aggregation_ = 1;
    CounterRng rng_;
    std::vector<double> mask_;
};

/// Materialized noise path: every increment stored.
struct NoisePath final : public IncrementProvider {
    SeedSpec seed;
    NoiseParams noise;
    std::vector<std::vector<double>> increments;

    const NoiseParams& params() const noexcept override { return noise; }
    void increment(std::int64_t step, std::span<double> out) const override;
};

/// Throws ConfigError on dt <= 0, n_steps < 0, a cutoff outside [0, n/2], or a
/// kind that does not match the grid dimension.
NoisePath sample_noise_path(SeedSpec seed, const GridSpec& grid, std::int64_t n_steps, double dt, NoiseKind kind,
                            int cutoff, double sigma);
void validate(const NoiseParams& p);

// ---------------------------------------------------------------------------
// Gaussian integrals xi_ij = int_0^T e_j(s) dW^(i)_s.

/// Normalized cosine basis on [0, T]: e_1 = T^{-1/2},
/// e_j(s) = (2/T)^{1/2} cos((j-1) pi s / T).
double cosine_basis(int j, double s, double horizon) noexcept;

enum class NoiseChannel {
    /// One channel: the spatial mean of dW scaled to unit quadratic variation rate.
    zero_mode,
    /// Real Fourier degrees of freedom of dW in ascending |k|^2 order, each at unit rate.
    per_mode,
};

std::string to_string(NoiseChannel c);
NoiseChannel noise_channel_from_string(const std::string& s);

/// Accumulates xi_ij = sum_n e_j(t_{n+1/2}) dW^n_(i) step by step.
class GaussianIntegrals {
public:
    /// Throws ConfigError if J < 1, I < 1, J > n_steps, or the channel set
    /// needs more Fourier degrees of freedom than the noise provides.
    GaussianIntegrals(const NoiseParams& noise, NoiseChannel channel, int I, int J);

    static int max_temporal_modes(std::int64_t n_steps) noexcept;

    /// Add the contribution of step n given its unscaled physical increment.
    void add(std::int64_t step, std::span<const double> increment);

    /// xi in row-major (i, j) order, length I * J.
    const std::vector<double>& values() const noexcept { return xi_; }

    /// Channel increments of one physical increment (length I), exposed for tests.
    std::vector<double> channel_increments(std::span<const double> increment) const;

private:
    NoiseParams noise_;
    NoiseChannel channel_;
    int I_;
    int J_;
    double horizon_;
    std::vector<std::size_t> mode_index_;  // spectral positions used by per_mode
    std::vector<int> mode_part_;           // 0 real, 1 imaginary
    std::vector<double> mode_scale_;
    std::vector<double> xi_;
};

std::vector<double> gaussian_integrals(const IncrementProvider& path, NoiseChannel channel, int I, int J);

}  // namespace wickpde
