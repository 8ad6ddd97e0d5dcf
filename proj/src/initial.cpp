#include "wickpde/initial.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "wickpde/error.hpp"
#include "wickpde/fft.hpp"
#include "wickpde/rng.hpp"

namespace wickpde {

std::string to_string(InitialCondition::Kind k) {
    switch (k) {
        case InitialCondition::Kind::zero: return "zero";
        case InitialCondition::Kind::constant: return "constant";
        case InitialCondition::Kind::cosine: return "cosine";
        case InitialCondition::Kind::random_smooth: return "random-smooth";
        case InitialCondition::Kind::white_noise: return "white-noise";
    }
    return "unknown";
}

InitialCondition::Kind initial_kind_from_string(const std::string& s) {
    using K = InitialCondition::Kind;
    if (s == "zero") return K::zero;
    if (s == "constant") return K::constant;
    if (s == "cosine") return K::cosine;
    if (s == "random-smooth") return K::random_smooth;
    if (s == "white-noise") return K::white_noise;
    throw ConfigError("unknown initial condition kind '" + s + "'");
}

RealField InitialCondition::realize(const GridSpec& grid, const SeedSpec& seed) const {
    RealField f(grid);
    const CounterRng rng(seed.master_seed, seed.trajectory_index, CounterRng::Stream::initial_condition);
    switch (kind) {
        case Kind::zero:
            break;
        case Kind::constant:
            std::fill(f.values.begin(), f.values.end(), amplitude);
            break;
        case Kind::cosine: {
            const int n = grid.n();
            const std::size_t total = grid.total();
            for (std::size_t idx = 0; idx < total; ++idx) {
                std::size_t rest = idx;
                double phase = 0.0;
                for (int d = grid.dim() - 1; d >= 0; --d) {
                    const auto x = static_cast<int>(rest % static_cast<std::size_t>(n));
                    rest /= static_cast<std::size_t>(n);
                    // integer phase first keeps the angle exact modulo 2 pi
                    phase += static_cast<double>((static_cast<long>(mode[d]) * x) % n);
                }
                f.values[idx] = amplitude * std::cos(2.0 * std::numbers::pi * phase / n);
            }
            break;
        }
        case Kind::random_smooth: {
            if (cutoff < 0 || cutoff > grid.nyquist()) throw ConfigError("initial condition: cutoff out of range");
            // Project i.i.d. lattice noise and reweight each mode.
            rng.fill_normal(0, f.values, 1.0);
            auto spec = forward_fft(f);
            const double norm = std::sqrt(static_cast<double>(grid.total()));
            for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
                const auto k = grid.mode(i);
                if (max_norm(k) > cutoff) {
                    spec.coeffs[i] = 0.0;
                    continue;
                }
                double k2 = 0.0;
                for (int d = 0; d < grid.dim(); ++d) k2 += double(k[d]) * k[d];
                spec.coeffs[i] *= amplitude * norm / (1.0 + k2);
            }
            f = inverse_fft(spec);
            break;
        }
        case Kind::white_noise: {
            const double stddev = amplitude / std::sqrt(std::pow(grid.spacing(), grid.dim()));
            rng.fill_normal(0, f.values, stddev);
            break;
        }
    }
    return f;
}

}  // namespace wickpde
