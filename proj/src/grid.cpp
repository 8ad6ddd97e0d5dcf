#include "wickpde/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wickpde/error.hpp"

namespace wickpde {

GridSpec::GridSpec(int dim, int n_per_axis, double domain_length)
    : dim_(dim), n_(n_per_axis), length_(domain_length) {
    if (dim != 2 && dim != 3) {
        throw ConfigError("grid: dim must be 2 or 3, got " + std::to_string(dim));
    }
    if (n_per_axis < 4 || n_per_axis % 2 != 0) {
        throw ConfigError("grid: n_per_axis must be even and >= 4, got " + std::to_string(n_per_axis));
    }
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw ConfigError("grid: domain_length must be positive and finite");
    }
}

std::size_t GridSpec::total() const noexcept {
    std::size_t t = 1;
    for (int d = 0; d < dim_; ++d) t *= static_cast<std::size_t>(n_);
    return t;
}

std::size_t GridSpec::spectral_size() const noexcept {
    std::size_t t = static_cast<std::size_t>(n_ / 2 + 1);
    for (int d = 1; d < dim_; ++d) t *= static_cast<std::size_t>(n_);
    return t;
}

double GridSpec::volume() const noexcept { return std::pow(length_, dim_); }

std::array<int, 3> GridSpec::mode(std::size_t idx) const noexcept {
    std::array<int, 3> k{0, 0, 0};
    const auto half = static_cast<std::size_t>(n_ / 2 + 1);
    k[dim_ - 1] = static_cast<int>(idx % half);
    idx /= half;
    for (int d = dim_ - 2; d >= 0; --d) {
        const int i = static_cast<int>(idx % static_cast<std::size_t>(n_));
        idx /= static_cast<std::size_t>(n_);
        k[d] = i <= n_ / 2 ? i : i - n_;
    }
    return k;
}

std::size_t GridSpec::spectral_index(const std::array<int, 3>& k) const {
    const int last = k[dim_ - 1];
    if (last < 0 || last > n_ / 2) throw ConfigError("grid: last-axis mode outside half-spectrum");
    std::size_t idx = 0;
    for (int d = 0; d < dim_ - 1; ++d) {
        if (k[d] < -n_ / 2 || k[d] > n_ / 2) throw ConfigError("grid: mode outside lattice range");
        const int i = k[d] < 0 ? k[d] + n_ : k[d];
        idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return idx * static_cast<std::size_t>(n_ / 2 + 1) + static_cast<std::size_t>(last);
}

int max_norm(const std::array<int, 3>& k) noexcept {
    return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
}

WavenumberTable discrete_laplacian_symbol(const GridSpec& grid) {
    WavenumberTable t;
    t.grid = grid;
    const std::size_t m = grid.spectral_size();
    t.modes.resize(m);
    t.continuous.resize(m);
    t.discrete.resize(m);
    const double eps = grid.spacing();
    const double two_pi_over_l = 2.0 * std::numbers::pi / grid.length();
    const double pi_over_n = std::numbers::pi / grid.n();
    for (std::size_t i = 0; i < m; ++i) {
        const auto k = grid.mode(i);
        double cont = 0.0;
        double disc = 0.0;
        for (int d = 0; d < grid.dim(); ++d) {
            const double kk = two_pi_over_l * k[d];
            cont += kk * kk;
            const double s = std::sin(pi_over_n * k[d]);
            disc += s * s;
        }
        t.modes[i] = k;
        t.continuous[i] = cont;
        t.discrete[i] = 4.0 / (eps * eps) * disc;
    }
    return t;
}

bool all_finite(std::span<const double> values) noexcept {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NonFiniteError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

}  // namespace wickpde
