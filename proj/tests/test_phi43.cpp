#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wickpde/error.hpp"
#include "wickpde/fft.hpp"
#include "wickpde/phi43.hpp"

using namespace wickpde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double symbol(const GridSpec& g, int a, int b, int c) {
    const double e = g.spacing();
    auto s2 = [&](int k) { return std::pow(std::sin(std::numbers::pi * k / g.n()), 2); };
    return 4.0 / (e * e) * (s2(a) + s2(b) + s2(c));
}

}  // namespace

TEST_CASE("C0 matches a brute-force sum at 4^3") {
    for (double L : {1.0, 3.0, kTwoPi}) {
        const GridSpec g(3, 4, L);
        double sum = 0.0;
        int terms = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    if (a || b || c) {
                        sum += 1.0 / (2.0 * symbol(g, a, b, c));
                        ++terms;
                    }
        CHECK(terms == 63);
        CHECK(phi43::compute_c0(g) == doctest::Approx(sum / (L * L * L)).epsilon(1e-12));
    }
}

TEST_CASE("C0 grows like 1/eps") {
    const double c4 = phi43::compute_c0(GridSpec(3, 4, kTwoPi));
    const double c8 = phi43::compute_c0(GridSpec(3, 8, kTwoPi));
    const double c16 = phi43::compute_c0(GridSpec(3, 16, kTwoPi));
    const double c32 = phi43::compute_c0(GridSpec(3, 32, kTwoPi));
    CHECK(c8 > c4);
    CHECK(std::abs(c16 / c8 / 2.0 - 1.0) < 0.15);
    CHECK(std::abs(c32 / c16 / 2.0 - 1.0) < 0.15);
}

TEST_CASE("C11") {
    const GridSpec g8(3, 8, kTwoPi);
    const double q = phi43::c11_simpson(g8, 64), q2 = phi43::c11_simpson(g8, 128);
    CHECK(q > 0.0);
    CHECK(std::abs(q / q2 - 1.0) < 0.01);
    CHECK(phi43::compute_c11(g8, 64) == q2);

    SUBCASE("dense oracle at 4^3") {
        const GridSpec g(3, 4, kTwoPi);
        double sum = 0.0;
        for (int a1 = 0; a1 < 4; ++a1)
            for (int b1 = 0; b1 < 4; ++b1)
                for (int c1 = 0; c1 < 4; ++c1)
                    for (int a2 = 0; a2 < 4; ++a2)
                        for (int b2 = 0; b2 < 4; ++b2)
                            for (int c2 = 0; c2 < 4; ++c2) {
                                if (!(a1 || b1 || c1) || !(a2 || b2 || c2)) continue;
                                const double l1 = symbol(g, a1, b1, c1), l2 = symbol(g, a2, b2, c2);
                                const double l12 = symbol(g, (a1 + a2) % 4, (b1 + b2) % 4, (c1 + c2) % 4);
                                sum += 1.0 / (4.0 * l1 * l2 * (l1 + l2 + l12));
                            }
        const double oracle = sum / std::pow(kTwoPi, 6);
        CHECK(phi43::c11_simpson(g, 512) == doctest::Approx(oracle).epsilon(1e-8));
    }
    SUBCASE("integrand is positive and decays") {
        CHECK(phi43::c11_integrand(g8, 1e-3) > phi43::c11_integrand(g8, 10.0));
        CHECK(phi43::c11_integrand(g8, 10.0) > 0.0);
        const auto [lo, hi] = phi43::c11_window(g8);
        CHECK(lo < hi);
    }
}

TEST_CASE("counterterm mass") {
    const phi43::Counterterms ct{0.5, 0.01, 0.002};
    CHECK(ct.mass() == doctest::Approx(1.5 - 0.108));
    phi43::Config cfg;
    cfg.grid = GridSpec(3, 8, kTwoPi);
    cfg.c12 = 0.25;
    const auto c = phi43::compute_counterterms(cfg);
    CHECK(c.c12 == 0.25);
    CHECK(c.c0 == phi43::compute_c0(cfg.grid));
}

TEST_CASE("stepper") {
    const GridSpec g(3, 8, kTwoPi);
    const std::vector<double> zero(g.total(), 0.0);

    SUBCASE("zero stays zero") {
        phi43::Stepper st(g, 1e-3, 1.7);
        RealField phi(g);
        for (int n = 0; n < 10; ++n) st.step(phi, zero, n);
        for (double v : phi.values) CHECK(v == 0.0);
    }
    SUBCASE("linear regime: one mode shrinks by 1 / (1 + dt lambda) per step") {
        phi43::Stepper st(g, 1e-3, 0.0, false);
        RealField phi(g);
        for (int x = 0; x < 8; ++x)
            for (int y = 0; y < 8; ++y)
                for (int z = 0; z < 8; ++z) phi.values[(x * 8 + y) * 8 + z] = std::cos(kTwoPi * (x + 3 * z) / 8.0);
        const auto k = g.spectral_index({1, 0, 3});
        const auto before = forward_fft(phi).coeffs[k];
        for (int n = 0; n < 20; ++n) st.step(phi, zero, n);
        const double expected = std::pow(1.0 + 1e-3 * symbol(g, 1, 0, 3), -20);
        CHECK(std::abs(forward_fft(phi).coeffs[k] / before - expected) < 1e-12 * expected);
    }
    SUBCASE("positive mass grows the mean by 1 + dt m per step") {
        const double m = 2.0, dt = 1e-3;
        phi43::Stepper st(g, dt, m);
        RealField phi(g, 1e-6);
        for (int n = 0; n < 10; ++n) st.step(phi, zero, n);
        for (double v : phi.values) CHECK(v == doctest::Approx(1e-6 * std::pow(1 + dt * m, 10)).epsilon(1e-9));
    }
    SUBCASE("blow-up") {
        phi43::Stepper st(g, 1e-1, 0.0);
        RealField phi(g, 1e80);
        CHECK_THROWS_AS(
            [&] {
                for (int n = 0; n < 10; ++n) st.step(phi, zero, n);
            }(),
            BlowUpError);
    }
}

TEST_CASE("trajectory") {
    phi43::Config cfg;
    cfg.grid = GridSpec(3, 8, kTwoPi);
    cfg.horizon = 0.02;
    cfg.dt = 1e-3;
    cfg.n_save = 2;
    const auto ct = phi43::compute_counterterms(cfg);
    const auto a = phi43::run(cfg, ct, {3, 1});
    const auto b = phi43::run(cfg, ct, {3, 1});
    REQUIRE(a.phi.fields.size() == 3);
    CHECK(a.phi.times[2] == doctest::Approx(0.02));
    for (std::size_t s = 0; s < 3; ++s) CHECK(a.phi.fields[s].values == b.phi.fields[s].values);
    CHECK(a.wick.values == b.wick.values);
    // white-noise start: site variance amplitude^2 / eps^3
    double var = 0.0;
    for (double v : a.phi.fields[0].values) var += v * v;
    var /= static_cast<double>(cfg.grid.total());
    CHECK(var == doctest::Approx(1.0 / std::pow(cfg.grid.spacing(), 3)).epsilon(0.15));

    phi43::Config bad = cfg;
    bad.grid = GridSpec(2, 8, 1.0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
