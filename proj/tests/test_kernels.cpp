#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "wickpde/kernels.hpp"

using namespace wickpde::kernels;

namespace {

std::vector<double> reals(std::size_t n, unsigned seed, double lo = -2.0, double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<cplx> complexes(std::size_t n, unsigned seed) {
    const auto r = reals(2 * n, seed);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {r[2 * i], r[2 * i + 1]};
    return v;
}

template <class T>
bool bit_equal(const std::vector<T>& a, const std::vector<T>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels compute the documented formulas") {
    const auto& k = scalar_table();
    const std::vector<double> x{2.0, -1.0, 0.5};
    std::vector<double> out(3);
    k.wick_square(x.data(), 1.0, out.data(), 3);
    CHECK(out[0] == 3.0);
    k.wick_cube(x.data(), 1.0, out.data(), 3);
    CHECK(out[0] == 2.0);
    k.wick_cube(x.data(), 0.0, out.data(), 3);
    CHECK(out[1] == -1.0);
    k.cube(x.data(), out.data(), 3);
    CHECK(out[2] == 0.125);
    // v^3 + 3v^2 x + 3v(x^2 - a) + x^3 - 3ax == (v + x)^3 - 3a(v + x)
    const std::vector<double> v{0.3, -0.7, 1.1};
    k.shift_drift(v.data(), x.data(), 0.4, out.data(), 3);
    for (int i = 0; i < 3; ++i) {
        const double u = v[i] + x[i];
        CHECK(out[i] == doctest::Approx(u * u * u - 1.2 * u));
    }
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
    const KernelTable* simd = avx2_table();
    if (!simd) {
        MESSAGE("AVX2 variant unavailable on this machine; skipped");
        return;
    }
    const KernelTable& ref = scalar_table();
    // Lengths that exercise the vector body and every remainder.
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 17u, 1000u, 1027u}) {
        CAPTURE(n);
        const auto x = reals(n, 1), y = reals(n, 2), m = reals(n, 3, 0.0, 1.0), g = reals(n, 4, 0.0, 1.0);
        const auto s = complexes(n, 5), nl = complexes(n, 6), inc = complexes(n, 7);

        std::vector<double> a(n), b(n);
        ref.cube(x.data(), a.data(), n);
        simd->cube(x.data(), b.data(), n);
        CHECK(bit_equal(a, b));
        ref.wick_square(x.data(), 0.37, a.data(), n);
        simd->wick_square(x.data(), 0.37, b.data(), n);
        CHECK(bit_equal(a, b));
        ref.wick_cube(x.data(), 0.37, a.data(), n);
        simd->wick_cube(x.data(), 0.37, b.data(), n);
        CHECK(bit_equal(a, b));
        ref.shift_drift(x.data(), y.data(), 0.37, a.data(), n);
        simd->shift_drift(x.data(), y.data(), 0.37, b.data(), n);
        CHECK(bit_equal(a, b));

        std::vector<cplx> ca = s, cb = s;
        ref.scale_modes(ca.data(), m.data(), n);
        simd->scale_modes(cb.data(), m.data(), n);
        CHECK(bit_equal(ca, cb));
        ca = s;
        cb = s;
        ref.ou_update(ca.data(), m.data(), g.data(), inc.data(), n);
        simd->ou_update(cb.data(), m.data(), g.data(), inc.data(), n);
        CHECK(bit_equal(ca, cb));
        ref.semi_implicit(s.data(), nl.data(), m.data(), 1e-3, 1.7, ca.data(), n);
        simd->semi_implicit(s.data(), nl.data(), m.data(), 1e-3, 1.7, cb.data(), n);
        CHECK(bit_equal(ca, cb));
        ref.semi_implicit_noisy(s.data(), nl.data(), inc.data(), m.data(), 1e-3, 1.7, 0.9, ca.data(), n);
        simd->semi_implicit_noisy(s.data(), nl.data(), inc.data(), m.data(), 1e-3, 1.7, 0.9, cb.data(), n);
        CHECK(bit_equal(ca, cb));
    }
}

TEST_CASE("kernel selection") {
    const char* before = active().name;
    CHECK(select("scalar"));
    CHECK(std::string(active().name) == "scalar");
    CHECK_FALSE(select("neon"));
    CHECK(select(before));
    CHECK(std::string(active().name) == before);
}
