#pragma once

#include <array>
#include <string>

#include "wickpde/grid.hpp"
#include "wickpde/noise.hpp"

namespace wickpde {

/// Initial datum description. Random kinds draw from a dedicated stream keyed
/// by (master seed, trajectory), so each trajectory gets its own u0.
struct InitialCondition {
    enum class Kind {
        zero,
        constant,
        /// amplitude * cos(2 pi k.x / L)
        cosine,
        /// Gaussian Fourier series on modes with max-norm index <= cutoff,
        /// per-mode standard deviation amplitude / (1 + |k|^2).
        random_smooth,
        /// i.i.d. N(0, amplitude^2 / eps^dim) per site.
        white_noise,
    };

    Kind kind = Kind::zero;
    double amplitude = 0.0;
    std::array<int, 3> mode{1, 0, 0};
    int cutoff = 4;

    RealField realize(const GridSpec& grid, const SeedSpec& seed) const;

    bool operator==(const InitialCondition&) const = default;
};

std::string to_string(InitialCondition::Kind k);
InitialCondition::Kind initial_kind_from_string(const std::string& s);

}  // namespace wickpde
