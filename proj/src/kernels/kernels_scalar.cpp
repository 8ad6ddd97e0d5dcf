#include "wickpde/kernels.hpp"

namespace wickpde::kernels {
namespace {

void cube(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * x[i] * x[i];
}

void wick_square(const double* x, double a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * x[i] - a;
}

void wick_cube(const double* x, double a, double* out, std::size_t n) {
    const double three_a = 3.0 * a;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        out[i] = xi * xi * xi - three_a * xi;
    }
}

void shift_drift(const double* v, const double* x, double a, double* out, std::size_t n) {
    const double three_a = 3.0 * a;
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = v[i];
        const double xi = x[i];
        const double v2 = vi * vi;
        const double x2 = xi * xi;
        const double t1 = v2 * vi;
        const double t2 = 3.0 * v2 * xi;
        const double t3 = 3.0 * vi * (x2 - a);
        const double t4 = x2 * xi - three_a * xi;
        out[i] = ((t1 + t2) + t3) + t4;
    }
}

void scale_modes(cplx* c, const double* mult, std::size_t n) {
    auto* d = reinterpret_cast<double*>(c);
    for (std::size_t i = 0; i < n; ++i) {
        d[2 * i] *= mult[i];
        d[2 * i + 1] *= mult[i];
    }
}

void ou_update(cplx* state, const double* decay, const double* gain, const cplx* inc, std::size_t n) {
    auto* s = reinterpret_cast<double*>(state);
    const auto* w = reinterpret_cast<const double*>(inc);
    for (std::size_t i = 0; i < n; ++i) {
        s[2 * i] = decay[i] * s[2 * i] + gain[i] * w[2 * i];
        s[2 * i + 1] = decay[i] * s[2 * i + 1] + gain[i] * w[2 * i + 1];
    }
}

void semi_implicit(const cplx* state, const cplx* nonlin, const double* inv, double dt, double mass, cplx* out,
                   std::size_t n) {
    const auto* s = reinterpret_cast<const double*>(state);
    const auto* f = reinterpret_cast<const double*>(nonlin);
    auto* o = reinterpret_cast<double*>(out);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        o[j] = (s[j] + dt * (mass * s[j] - f[j])) * inv[j / 2];
    }
}

void semi_implicit_noisy(const cplx* state, const cplx* nonlin, const cplx* inc, const double* inv, double dt,
                         double mass, double noise_scale, cplx* out, std::size_t n) {
    const auto* s = reinterpret_cast<const double*>(state);
    const auto* f = reinterpret_cast<const double*>(nonlin);
    const auto* w = reinterpret_cast<const double*>(inc);
    auto* o = reinterpret_cast<double*>(out);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        o[j] = ((s[j] + dt * (mass * s[j] - f[j])) + noise_scale * w[j]) * inv[j / 2];
    }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{
        "scalar",    cube,      wick_square,   wick_cube,          shift_drift,
        scale_modes, ou_update, semi_implicit, semi_implicit_noisy,
    };
    return table;
}

}  // namespace wickpde::kernels
