#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "wickpde/grid.hpp"

namespace wickpde {

// FFT convention (project-wide): the forward transform is unscaled,
//   fhat(k) = sum_x f(x) exp(-2 pi i k.x / n),
// and the inverse carries the 1/n^dim factor, so inverse(forward(f)) == f.

namespace detail {
struct FftPlans;
}

/// Real-to-half-spectrum transform pair for one grid shape. Plans are cached
/// process-wide and executed through FFTW's new-array interface, so one Fft
/// may be used from several threads as long as the buffers differ.
class Fft {
public:
    explicit Fft(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }

    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
    /// `in` is preserved; `scratch` must have spectral_size() entries.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out,
                 std::span<std::complex<double>> scratch) const;

private:
    GridSpec grid_;
    std::shared_ptr<const detail::FftPlans> plans_;
};

/// Throws NonFiniteError on NaN/Inf input.
SpectralField forward_fft(const RealField& f);
RealField inverse_fft(const SpectralField& f);

/// 1 for modes with max-norm index <= cutoff, 0 otherwise (half-spectrum layout).
std::vector<double> cutoff_mask(const GridSpec& grid, int cutoff);

/// Zero every mode whose max-norm index exceeds `cutoff`; throws ConfigError
/// unless 0 <= cutoff <= n/2.
SpectralField spectral_project(const SpectralField& f, int cutoff);
void spectral_project_in_place(SpectralField& f, int cutoff);

/// Cutoff used inside cubic products: n/4 retained modes per axis.
int dealias_cutoff(const GridSpec& grid) noexcept;

/// f^3 with modes above dealias_cutoff removed from f before cubing and from
/// the product afterwards.
RealField dealias_cubic(const RealField& f);

/// Workspace for pseudospectral pointwise nonlinearities: low-pass one or
/// two spectral inputs to the dealiasing cutoff, bring them to physical
/// space, apply a pointwise kernel, and return the low-passed spectrum.
class DealiasedNonlinearity {
public:
    explicit DealiasedNonlinearity(const GridSpec& grid);

    const Fft& fft() const noexcept { return fft_; }
    const std::vector<double>& mask() const noexcept { return mask_; }

    /// Physical-space view of mask * in, written to out.
    void low_pass_to_physical(std::span<const std::complex<double>> in, std::span<double> out);
    /// forward(in) then mask, written to out.
    void to_spectral_low_pass(std::span<const double> in, std::span<std::complex<double>> out);

    /// Scratch buffers sized to the grid, available to callers between calls.
    std::vector<double> phys_a, phys_b, phys_out;

private:
    Fft fft_;
    std::vector<double> mask_;
    std::vector<std::complex<double>> spec_scratch_;
    std::vector<std::complex<double>> spec_tmp_;
};

}  // namespace wickpde
