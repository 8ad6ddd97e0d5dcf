#include "wickpde/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "wickpde/error.hpp"
#include "wickpde/fft.hpp"

namespace wickpde {

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::spectral_truncated_2d: return "spectral-truncated-2d";
        case NoiseKind::lattice_white_3d: return "lattice-white-3d";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "spectral-truncated-2d") return NoiseKind::spectral_truncated_2d;
    if (s == "lattice-white-3d") return NoiseKind::lattice_white_3d;
    throw ConfigError("unknown noise kind '" + s + "'");
}

std::string to_string(NoiseChannel c) { return c == NoiseChannel::zero_mode ? "zero-mode" : "per-mode"; }

NoiseChannel noise_channel_from_string(const std::string& s) {
    if (s == "zero-mode") return NoiseChannel::zero_mode;
    if (s == "per-mode") return NoiseChannel::per_mode;
    throw ConfigError("unknown noise channel '" + s + "'");
}

void validate(const NoiseParams& p) {
    if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw ConfigError("noise: dt must be positive");
    if (p.n_steps < 0) throw ConfigError("noise: n_steps must be non-negative");
    if (!(p.sigma > 0.0)) throw ConfigError("noise: sigma must be positive");
    if (p.kind == NoiseKind::spectral_truncated_2d) {
        if (p.grid.dim() != 2) throw ConfigError("noise: spectral-truncated-2d needs a 2-d grid");
        if (p.cutoff < 0 || p.cutoff > p.grid.nyquist()) {
            throw ConfigError("noise: cutoff " + std::to_string(p.cutoff) + " outside [0, " +
                              std::to_string(p.grid.nyquist()) + "]");
        }
    } else if (p.grid.dim() != 3) {
        throw ConfigError("noise: lattice-white-3d needs a 3-d grid");
    }
}

NoiseSource::NoiseSource(SeedSpec seed, NoiseParams params)
    : seed_(seed), params_(params), rng_(seed.master_seed, seed.trajectory_index, CounterRng::Stream::noise) {
    validate(params_);
    if (params_.kind == NoiseKind::spectral_truncated_2d) mask_ = cutoff_mask(params_.grid, params_.cutoff);
}

NoiseSource NoiseSource::coarsened(std::int64_t factor) const {
    if (factor < 1 || params_.n_steps % factor != 0) {
        throw ConfigError("noise: coarsening factor must divide n_steps");
    }
    NoiseSource out = *this;
    out.aggregation_ = aggregation_ * factor;
    out.params_.n_steps = params_.n_steps / factor;
    out.params_.dt = params_.dt * static_cast<double>(factor);
    return out;
}

void NoiseSource::fine_increment(std::int64_t fine_step, std::span<double> out) const {
    const double fine_dt = params_.dt / static_cast<double>(aggregation_);
    const double eps = params_.grid.spacing();
    const double stddev = std::sqrt(fine_dt / std::pow(eps, params_.grid.dim()));
    rng_.fill_normal(static_cast<std::uint64_t>(fine_step), out, stddev);
}

void NoiseSource::increment(std::int64_t step, std::span<double> out) const {
    if (out.size() != params_.grid.total()) throw ConfigError("noise: increment buffer size mismatch");
    fine_increment(step * aggregation_, out);
    if (aggregation_ > 1) {
        std::vector<double> tmp(out.size());
        for (std::int64_t m = 1; m < aggregation_; ++m) {
            fine_increment(step * aggregation_ + m, tmp);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
        }
    }
    if (params_.kind == NoiseKind::spectral_truncated_2d) {
        const Fft fft(params_.grid);
        std::vector<std::complex<double>> spec(params_.grid.spectral_size());
        std::vector<std::complex<double>> scratch(spec.size());
        fft.forward(out, spec);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            if (mask_[i] == 0.0) spec[i] = 0.0;
        }
        fft.inverse(spec, out, scratch);
    }
}

void NoisePath::increment(std::int64_t step, std::span<double> out) const {
    const auto& src = increments.at(static_cast<std::size_t>(step));
    std::copy(src.begin(), src.end(), out.begin());
}

NoisePath sample_noise_path(SeedSpec seed, const GridSpec& grid, std::int64_t n_steps, double dt, NoiseKind kind,
                            int cutoff, double sigma) {
    NoiseParams p{grid, n_steps, dt, kind, cutoff, sigma};
    const NoiseSource source(seed, p);
    NoisePath path;
    path.seed = seed;
    path.noise = p;
    path.increments.resize(static_cast<std::size_t>(n_steps));
    for (std::int64_t n = 0; n < n_steps; ++n) {
        auto& inc = path.increments[static_cast<std::size_t>(n)];
        inc.resize(grid.total());
        source.increment(n, inc);
    }
    return path;
}

double cosine_basis(int j, double s, double horizon) noexcept {
    if (j == 1) return 1.0 / std::sqrt(horizon);
    return std::sqrt(2.0 / horizon) * std::cos((j - 1) * std::numbers::pi * s / horizon);
}

int GaussianIntegrals::max_temporal_modes(std::int64_t n_steps) noexcept {
    return static_cast<int>(std::min<std::int64_t>(n_steps, 1 << 20));
}

GaussianIntegrals::GaussianIntegrals(const NoiseParams& noise, NoiseChannel channel, int I, int J)
    : noise_(noise), channel_(channel), I_(I), J_(J), horizon_(noise.dt * static_cast<double>(noise.n_steps)) {
    if (I < 1 || J < 1) throw ConfigError("gaussian integrals: I and J must be >= 1");
    if (noise.n_steps < 1) throw ConfigError("gaussian integrals: empty noise path");
    if (J > max_temporal_modes(noise.n_steps)) {
        throw ConfigError("gaussian integrals: J = " + std::to_string(J) + " exceeds n_steps = " +
                          std::to_string(noise.n_steps));
    }
    const GridSpec& g = noise.grid;
    if (channel == NoiseChannel::zero_mode) {
        if (I != 1) throw ConfigError("gaussian integrals: the zero-mode channel has I = 1");
    } else {
        // Real Fourier degrees of freedom, ordered by |k|^2 then spectral position.
        const int cutoff = noise.kind == NoiseKind::spectral_truncated_2d ? noise.cutoff : g.nyquist();
        const auto table = discrete_laplacian_symbol(g);
        std::vector<std::tuple<long, std::size_t, bool>> reps;
        for (std::size_t idx = 0; idx < g.spectral_size(); ++idx) {
            const auto k = g.mode(idx);
            if (max_norm(k) > cutoff) continue;
            // Partner of k under k -> -k within the half-spectrum.
            std::array<int, 3> p = k;
            for (int d = 0; d < g.dim() - 1; ++d) {
                p[d] = -k[d];
                if (p[d] < -g.n() / 2 + 1) p[d] += g.n();
                if (p[d] > g.n() / 2) p[d] -= g.n();
            }
            const int last = k[g.dim() - 1];
            const bool on_edge = last == 0 || last == g.nyquist();
            const std::size_t partner = on_edge ? g.spectral_index(p) : idx;
            if (partner < idx) continue;
            long k2 = 0;
            for (int d = 0; d < g.dim(); ++d) k2 += long{k[d]} * k[d];
            reps.emplace_back(k2, idx, on_edge && partner == idx);
        }
        std::sort(reps.begin(), reps.end());
        const double n_tot = static_cast<double>(g.total());
        const double vol = g.volume();
        for (const auto& [k2, idx, self_conj] : reps) {
            if (static_cast<int>(mode_index_.size()) >= I) break;
            if (self_conj) {
                mode_index_.push_back(idx);
                mode_part_.push_back(0);
                mode_scale_.push_back(std::sqrt(vol) / n_tot);
            } else {
                for (int part = 0; part < 2 && static_cast<int>(mode_index_.size()) < I; ++part) {
                    mode_index_.push_back(idx);
                    mode_part_.push_back(part);
                    mode_scale_.push_back((part == 0 ? 1.0 : -1.0) * std::sqrt(2.0 * vol) / n_tot);
                }
            }
        }
        if (static_cast<int>(mode_index_.size()) < I) {
            throw ConfigError("gaussian integrals: I = " + std::to_string(I) +
                              " exceeds the available Fourier degrees of freedom");
        }
    }
    xi_.assign(static_cast<std::size_t>(I) * static_cast<std::size_t>(J), 0.0);
}

std::vector<double> GaussianIntegrals::channel_increments(std::span<const double> increment) const {
    const GridSpec& g = noise_.grid;
    std::vector<double> ch(static_cast<std::size_t>(I_));
    if (channel_ == NoiseChannel::zero_mode) {
        double sum = 0.0;
        for (double w : increment) sum += w;
        ch[0] = std::sqrt(g.volume()) * (sum / static_cast<double>(g.total()));
        return ch;
    }
    std::vector<std::complex<double>> spec(g.spectral_size());
    Fft(g).forward(increment, spec);
    for (int i = 0; i < I_; ++i) {
        const auto c = spec[mode_index_[static_cast<std::size_t>(i)]];
        const double part = mode_part_[static_cast<std::size_t>(i)] == 0 ? c.real() : c.imag();
        ch[static_cast<std::size_t>(i)] = mode_scale_[static_cast<std::size_t>(i)] * part;
    }
    return ch;
}

void GaussianIntegrals::add(std::int64_t step, std::span<const double> increment) {
    const auto ch = channel_increments(increment);
    // e_j is deterministic, so any evaluation point in the step is admissible;
    // midpoints make the discrete cosine basis exactly orthonormal.
    const double t_mid = (static_cast<double>(step) + 0.5) * noise_.dt;
    for (int j = 1; j <= J_; ++j) {
        const double e = cosine_basis(j, t_mid, horizon_);
        for (int i = 0; i < I_; ++i) {
            xi_[static_cast<std::size_t>(i * J_ + (j - 1))] += e * ch[static_cast<std::size_t>(i)];
        }
    }
}

std::vector<double> gaussian_integrals(const IncrementProvider& path, NoiseChannel channel, int I, int J) {
    const auto& p = path.params();
    GaussianIntegrals acc(p, channel, I, J);
    std::vector<double> inc(p.grid.total());
    for (std::int64_t n = 0; n < p.n_steps; ++n) {
        path.increment(n, inc);
        acc.add(n, inc);
    }
    return acc.values();
}

}  // namespace wickpde
