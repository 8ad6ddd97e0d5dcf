#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wickpde {

/// Periodic lattice on the torus [0, L)^dim with n points per axis.
///
/// Real fields are stored row-major with the last axis contiguous. Spectral
/// fields hold the half-spectrum of a real-input FFT: full range on the
/// leading axes, 0..n/2 on the last axis.
class GridSpec {
public:
    GridSpec() = default;

    /// Throws ConfigError unless dim is 2 or 3, n is even and >= 4, L > 0.
    GridSpec(int dim, int n_per_axis, double domain_length);

    int dim() const noexcept { return dim_; }
    int n() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / n_; }
    int nyquist() const noexcept { return n_ / 2; }

    /// n^dim
    std::size_t total() const noexcept;
    /// n^(dim-1) * (n/2 + 1)
    std::size_t spectral_size() const noexcept;
    /// L^dim
    double volume() const noexcept;

    /// Integer mode vector of a half-spectrum position (unused axes are 0).
    std::array<int, 3> mode(std::size_t spectral_index) const noexcept;
    /// Row-major spectral position of a mode; the last component must be in [0, n/2].
    std::size_t spectral_index(const std::array<int, 3>& k) const;

    bool operator==(const GridSpec&) const = default;

private:
    int dim_ = 2;
    int n_ = 4;
    double length_ = 1.0;
};

/// Max-norm of a mode vector, max_j |k_j|.
int max_norm(const std::array<int, 3>& k) noexcept;

struct RealField {
    GridSpec grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), values(g.total(), 0.0) {}
    RealField(const GridSpec& g, double fill) : grid(g), values(g.total(), fill) {}

    std::span<double> span() noexcept { return values; }
    std::span<const double> span() const noexcept { return values; }
    bool operator==(const RealField&) const = default;
};

struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.spectral_size()) {}

    std::complex<double>& at(const std::array<int, 3>& k) { return coeffs[grid.spectral_index(k)]; }
    std::complex<double> at(const std::array<int, 3>& k) const { return coeffs[grid.spectral_index(k)]; }
};

/// Wavenumber bookkeeping over the half-spectrum.
struct WavenumberTable {
    GridSpec grid;
    std::vector<std::array<int, 3>> modes;
    /// |2 pi k / L|^2, the symbol of -Laplacian on the torus.
    std::vector<double> continuous;
    /// (4 / eps^2) sum_j sin^2(pi k_j / n), the symbol of the nearest-neighbour -Laplacian.
    std::vector<double> discrete;
};

WavenumberTable discrete_laplacian_symbol(const GridSpec& grid);

/// Throws NonFiniteError naming `what` if any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);
bool all_finite(std::span<const double> values) noexcept;

}  // namespace wickpde
