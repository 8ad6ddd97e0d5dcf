#include "wickpde/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "wickpde/error.hpp"
#include "wickpde/kernels.hpp"

namespace wickpde {

namespace detail {

struct FftPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    FftPlans() = default;
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    ~FftPlans() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
};

}  // namespace detail

namespace {

// FFTW's planner is not thread-safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::shared_ptr<const detail::FftPlans> plans_for(const GridSpec& grid) {
    using Key = std::tuple<int, int>;
    static std::map<Key, std::shared_ptr<const detail::FftPlans>> cache;

    std::lock_guard lock(planner_mutex());
    const Key key{grid.dim(), grid.n()};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    auto plans = std::make_shared<detail::FftPlans>();
    int dims[3] = {grid.n(), grid.n(), grid.n()};
    auto* real = fftw_alloc_real(grid.total());
    auto* spec = fftw_alloc_complex(grid.spectral_size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->r2c = fftw_plan_dft_r2c(grid.dim(), dims, real, spec, flags);
    plans->c2r = fftw_plan_dft_c2r(grid.dim(), dims, spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    if (!plans->r2c || !plans->c2r) throw Error("fft: FFTW failed to create a plan");
    cache.emplace(key, plans);
    return plans;
}

void check_sizes(const GridSpec& g, std::size_t real, std::size_t spec) {
    if (real != g.total() || spec != g.spectral_size()) {
        throw ConfigError("fft: buffer size does not match grid");
    }
}

}  // namespace

Fft::Fft(const GridSpec& grid) : grid_(grid), plans_(plans_for(grid)) {}

void Fft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    check_sizes(grid_, in.size(), out.size());
    // r2c out-of-place leaves its input untouched.
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft::inverse(std::span<const std::complex<double>> in, std::span<double> out,
                  std::span<std::complex<double>> scratch) const {
    check_sizes(grid_, out.size(), in.size());
    if (scratch.size() != in.size()) throw ConfigError("fft: scratch size does not match grid");
    std::copy(in.begin(), in.end(), scratch.begin());
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / static_cast<double>(grid_.total());
    for (double& v : out) v *= scale;
}

SpectralField forward_fft(const RealField& f) {
    require_finite(f.values, "forward_fft");
    SpectralField out(f.grid);
    Fft(f.grid).forward(f.values, out.coeffs);
    return out;
}

RealField inverse_fft(const SpectralField& f) {
    RealField out(f.grid);
    std::vector<std::complex<double>> scratch(f.coeffs.size());
    Fft(f.grid).inverse(f.coeffs, out.values, scratch);
    return out;
}

std::vector<double> cutoff_mask(const GridSpec& grid, int cutoff) {
    if (cutoff < 0 || cutoff > grid.nyquist()) {
        throw ConfigError("spectral cutoff " + std::to_string(cutoff) + " outside [0, " +
                          std::to_string(grid.nyquist()) + "]");
    }
    std::vector<double> mask(grid.spectral_size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = max_norm(grid.mode(i)) <= cutoff ? 1.0 : 0.0;
    }
    return mask;
}

void spectral_project_in_place(SpectralField& f, int cutoff) {
    const auto mask = cutoff_mask(f.grid, cutoff);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == 0.0) f.coeffs[i] = 0.0;
    }
}

SpectralField spectral_project(const SpectralField& f, int cutoff) {
    SpectralField out = f;
    spectral_project_in_place(out, cutoff);
    return out;
}

int dealias_cutoff(const GridSpec& grid) noexcept { return grid.n() / 4; }

DealiasedNonlinearity::DealiasedNonlinearity(const GridSpec& grid)
    : phys_a(grid.total()),
      phys_b(grid.total()),
      phys_out(grid.total()),
      fft_(grid),
      mask_(cutoff_mask(grid, dealias_cutoff(grid))),
      spec_scratch_(grid.spectral_size()),
      spec_tmp_(grid.spectral_size()) {}

void DealiasedNonlinearity::low_pass_to_physical(std::span<const std::complex<double>> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), spec_tmp_.begin());
    kernels::active().scale_modes(spec_tmp_.data(), mask_.data(), mask_.size());
    fft_.inverse(spec_tmp_, out, spec_scratch_);
}

void DealiasedNonlinearity::to_spectral_low_pass(std::span<const double> in, std::span<std::complex<double>> out) {
    fft_.forward(in, out);
    kernels::active().scale_modes(out.data(), mask_.data(), mask_.size());
}

RealField dealias_cubic(const RealField& f) {
    require_finite(f.values, "dealias_cubic");
    DealiasedNonlinearity nl(f.grid);
    std::vector<std::complex<double>> spec(f.grid.spectral_size());
    nl.fft().forward(f.values, spec);
    nl.low_pass_to_physical(spec, nl.phys_a);
    kernels::active().cube(nl.phys_a.data(), nl.phys_out.data(), nl.phys_out.size());
    nl.to_spectral_low_pass(nl.phys_out, spec);
    RealField out(f.grid);
    std::vector<std::complex<double>> scratch(spec.size());
    nl.fft().inverse(spec, out.values, scratch);
    require_finite(out.values, "dealias_cubic");
    return out;
}

}  // namespace wickpde
