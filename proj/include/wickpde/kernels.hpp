#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops of the steppers. Every kernel has a scalar
// reference in kernels_scalar.cpp and an AVX2 variant; the variants perform
// the same IEEE operations in the same order (no FMA contraction), so their
// results are bit-identical and datasets do not depend on the host ISA.

namespace wickpde::kernels {

using cplx = std::complex<double>;

struct KernelTable {
    const char* name;

    /// out = x^3
    void (*cube)(const double* x, double* out, std::size_t n);
    /// out = x^2 - a
    void (*wick_square)(const double* x, double a, double* out, std::size_t n);
    /// out = x^3 - 3 a x
    void (*wick_cube)(const double* x, double a, double* out, std::size_t n);
    /// out = v^3 + 3 v^2 x + 3 v (x^2 - a) + (x^3 - 3 a x)
    void (*shift_drift)(const double* v, const double* x, double a, double* out, std::size_t n);
    /// c[k] *= mult[k]
    void (*scale_modes)(cplx* c, const double* mult, std::size_t n);
    /// state[k] = decay[k] * state[k] + gain[k] * inc[k]
    void (*ou_update)(cplx* state, const double* decay, const double* gain, const cplx* inc, std::size_t n);
    /// out[k] = (state[k] + dt * (mass * state[k] - nonlin[k])) * inv[k]
    void (*semi_implicit)(const cplx* state, const cplx* nonlin, const double* inv, double dt, double mass,
                          cplx* out, std::size_t n);
    /// out[k] = (state[k] + dt * (mass * state[k] - nonlin[k]) + noise_scale * inc[k]) * inv[k]
    void (*semi_implicit_noisy)(const cplx* state, const cplx* nonlin, const cplx* inc, const double* inv, double dt,
                                double mass, double noise_scale, cplx* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

/// The table used by the library. Picked once from the CPU features; the
/// WICKPDE_KERNELS environment variable ("scalar" or "avx2") overrides it.
const KernelTable& active() noexcept;

/// Force a variant by name. Returns false if it is unavailable.
bool select(std::string_view name) noexcept;

}  // namespace wickpde::kernels
