// Compiled with -mavx2 (and without -mfma) so lane results match the scalar
// reference bit for bit.
#include <immintrin.h>

#include "wickpde/kernels.hpp"

namespace wickpde::kernels {
namespace {

constexpr std::size_t W = 4;

// [m0, m0, m1, m1] from two consecutive per-mode multipliers.
inline __m256d dup_pairs(const double* m) {
    const __m256d lo = _mm256_castpd128_pd256(_mm_loadu_pd(m));
    return _mm256_permute4x64_pd(lo, 0b01010000);
}

void cube(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(v, v), v));
    }
    for (; i < n; ++i) out[i] = x[i] * x[i] * x[i];
}

void wick_square(const double* x, double a, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_mul_pd(v, v), va));
    }
    for (; i < n; ++i) out[i] = x[i] * x[i] - a;
}

void wick_cube(const double* x, double a, double* out, std::size_t n) {
    const double three_a = 3.0 * a;
    const __m256d v3a = _mm256_set1_pd(three_a);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d c = _mm256_mul_pd(_mm256_mul_pd(v, v), v);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(c, _mm256_mul_pd(v3a, v)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        out[i] = xi * xi * xi - three_a * xi;
    }
}

void shift_drift(const double* v, const double* x, double a, double* out, std::size_t n) {
    const double three_a = 3.0 * a;
    const __m256d va = _mm256_set1_pd(a);
    const __m256d v3a = _mm256_set1_pd(three_a);
    const __m256d three = _mm256_set1_pd(3.0);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d vi = _mm256_loadu_pd(v + i);
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d v2 = _mm256_mul_pd(vi, vi);
        const __m256d x2 = _mm256_mul_pd(xi, xi);
        const __m256d t1 = _mm256_mul_pd(v2, vi);
        const __m256d t2 = _mm256_mul_pd(_mm256_mul_pd(three, v2), xi);
        const __m256d t3 = _mm256_mul_pd(_mm256_mul_pd(three, vi), _mm256_sub_pd(x2, va));
        const __m256d t4 = _mm256_sub_pd(_mm256_mul_pd(x2, xi), _mm256_mul_pd(v3a, xi));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(t1, t2), t3), t4));
    }
    for (; i < n; ++i) {
        const double vs = v[i];
        const double xs = x[i];
        const double v2 = vs * vs;
        const double x2 = xs * xs;
        const double t1 = v2 * vs;
        const double t2 = 3.0 * v2 * xs;
        const double t3 = 3.0 * vs * (x2 - a);
        const double t4 = x2 * xs - three_a * xs;
        out[i] = ((t1 + t2) + t3) + t4;
    }
}

void scale_modes(cplx* c, const double* mult, std::size_t n) {
    auto* d = reinterpret_cast<double*>(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d m = dup_pairs(mult + i);
        _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), m));
    }
    for (; i < n; ++i) {
        d[2 * i] *= mult[i];
        d[2 * i + 1] *= mult[i];
    }
}

void ou_update(cplx* state, const double* decay, const double* gain, const cplx* inc, std::size_t n) {
    auto* s = reinterpret_cast<double*>(state);
    const auto* w = reinterpret_cast<const double*>(inc);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d dk = dup_pairs(decay + i);
        const __m256d gk = dup_pairs(gain + i);
        const __m256d sv = _mm256_loadu_pd(s + 2 * i);
        const __m256d wv = _mm256_loadu_pd(w + 2 * i);
        _mm256_storeu_pd(s + 2 * i, _mm256_add_pd(_mm256_mul_pd(dk, sv), _mm256_mul_pd(gk, wv)));
    }
    for (; i < n; ++i) {
        s[2 * i] = decay[i] * s[2 * i] + gain[i] * w[2 * i];
        s[2 * i + 1] = decay[i] * s[2 * i + 1] + gain[i] * w[2 * i + 1];
    }
}

void semi_implicit(const cplx* state, const cplx* nonlin, const double* inv, double dt, double mass, cplx* out,
                   std::size_t n) {
    const auto* s = reinterpret_cast<const double*>(state);
    const auto* f = reinterpret_cast<const double*>(nonlin);
    auto* o = reinterpret_cast<double*>(out);
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vm = _mm256_set1_pd(mass);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d sv = _mm256_loadu_pd(s + 2 * i);
        const __m256d fv = _mm256_loadu_pd(f + 2 * i);
        const __m256d drift = _mm256_sub_pd(_mm256_mul_pd(vm, sv), fv);
        const __m256d r = _mm256_add_pd(sv, _mm256_mul_pd(vdt, drift));
        _mm256_storeu_pd(o + 2 * i, _mm256_mul_pd(r, dup_pairs(inv + i)));
    }
    for (std::size_t j = 2 * i; j < 2 * n; ++j) {
        o[j] = (s[j] + dt * (mass * s[j] - f[j])) * inv[j / 2];
    }
}

void semi_implicit_noisy(const cplx* state, const cplx* nonlin, const cplx* inc, const double* inv, double dt,
                         double mass, double noise_scale, cplx* out, std::size_t n) {
    const auto* s = reinterpret_cast<const double*>(state);
    const auto* f = reinterpret_cast<const double*>(nonlin);
    const auto* w = reinterpret_cast<const double*>(inc);
    auto* o = reinterpret_cast<double*>(out);
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vm = _mm256_set1_pd(mass);
    const __m256d vns = _mm256_set1_pd(noise_scale);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d sv = _mm256_loadu_pd(s + 2 * i);
        const __m256d fv = _mm256_loadu_pd(f + 2 * i);
        const __m256d wv = _mm256_loadu_pd(w + 2 * i);
        const __m256d drift = _mm256_sub_pd(_mm256_mul_pd(vm, sv), fv);
        const __m256d r = _mm256_add_pd(_mm256_add_pd(sv, _mm256_mul_pd(vdt, drift)), _mm256_mul_pd(vns, wv));
        _mm256_storeu_pd(o + 2 * i, _mm256_mul_pd(r, dup_pairs(inv + i)));
    }
    for (std::size_t j = 2 * i; j < 2 * n; ++j) {
        o[j] = ((s[j] + dt * (mass * s[j] - f[j])) + noise_scale * w[j]) * inv[j / 2];
    }
}

}  // namespace

const KernelTable& avx2_table_impl() noexcept {
    static const KernelTable table{
        "avx2",      cube,      wick_square,   wick_cube,          shift_drift,
        scale_modes, ou_update, semi_implicit, semi_implicit_noisy,
    };
    return table;
}

}  // namespace wickpde::kernels
