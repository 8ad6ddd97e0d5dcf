#include <doctest.h>

#include <cmath>
#include <vector>

#include "wickpde/chaos.hpp"
#include "wickpde/error.hpp"

using namespace wickpde;
using namespace wickpde::chaos;

TEST_CASE("hermite values") {
    CHECK(hermite(0, 3.7) == 1.0);
    CHECK(hermite(2, 0.0) == -1.0);
    CHECK(hermite(3, 2.0) == 2.0);
    CHECK(hermite(1, -0.4) == -0.4);
    CHECK(hermite(4, 1.0) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(hermite(-1, 0.0), ConfigError);
    CHECK_THROWS_AS(hermite(kMaxHermiteOrder + 1, 0.0), ConfigError);
}

TEST_CASE("index counts") {
    const auto zero = enumerate_indices({1, 1, 0});
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].entries.empty());
    CHECK(enumerate_indices({1, 2, 2}).size() == 6);
    CHECK(enumerate_indices({1, 4, 3}).size() == 35);
    CHECK(index_count({3, 4, 6}) == 18564);
    CHECK(enumerate_indices({3, 4, 6}).size() == 18564);
}

TEST_CASE("count overflow and enumeration limit") {
    CHECK_THROWS_AS(index_count({1000, 1000, 1000}), ConfigError);
    CHECK(index_count({10, 10, 6}) > kMaxEnumeratedIndices);
    CHECK_THROWS_AS(enumerate_indices({10, 10, 6}), ConfigError);
    CHECK_THROWS_AS(enumerate_indices({0, 1, 1}), ConfigError);
    CHECK_THROWS_AS(enumerate_indices({1, 1, -1}), ConfigError);
}

TEST_CASE("canonical ordering") {
    const auto idx = enumerate_indices({2, 2, 2});
    CHECK(idx.front().order() == 0);
    for (std::size_t a = 1; a < idx.size(); ++a) {
        CHECK(canonical_less(idx[a - 1], idx[a]));
        CHECK(idx[a - 1].order() <= idx[a].order());
    }
    // first-order indices come in (i, j) order
    CHECK(idx[1].to_string() == "{(1,1):1}");
    CHECK(idx[4].to_string() == "{(2,2):1}");
}

TEST_CASE("ordering digest is stable and order-sensitive") {
    auto idx = enumerate_indices({1, 4, 3});
    const auto d = ordering_digest(idx);
    CHECK(d == ordering_digest(enumerate_indices({1, 4, 3})));
    std::swap(idx[3], idx[4]);
    CHECK(d != ordering_digest(idx));
    CHECK(d != ordering_digest(enumerate_indices({1, 4, 2})));
}

TEST_CASE("features at zero and first order") {
    const BasisSpec spec{1, 3, 3};
    const std::vector<double> zero(3, 0.0);
    const auto f = wick_features(zero, spec);
    for (std::size_t a = 0; a < f.ordering.size(); ++a) {
        double expected = 1.0;
        for (const auto& e : f.ordering[a].entries) {
            if (e.power % 2 == 1) expected = 0.0;
            if (e.power == 2) expected *= -1.0 / std::sqrt(2.0);
        }
        CHECK(f.values[a] == doctest::Approx(expected));
    }
    const std::vector<double> xi{0.3, -1.2, 2.0};
    const auto g = wick_features(xi, spec);
    CHECK(g.values[0] == 1.0);
    CHECK(g.values[1] == 0.3);
    CHECK(g.values[2] == -1.2);
    CHECK(g.values[3] == 2.0);
    CHECK_THROWS_AS(wick_features(std::vector<double>(2), spec), ConfigError);
}

TEST_CASE("features are orthonormal under standard normal xi") {
    // 1e5 i.i.d. draws, |alpha|, |beta| <= 3, J = 3
    const BasisSpec spec{1, 3, 3};
    const auto ordering = enumerate_indices(spec);
    const std::size_t M = ordering.size();
    std::vector<double> s(M * M), q(M * M);
    std::uint64_t state = 88172645463325252ull;
    auto uniform = [&] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
    };
    const int draws = 100000;
    std::vector<double> xi(3);
    for (int d = 0; d < draws; ++d) {
        for (auto& x : xi) x = std::sqrt(-2 * std::log(uniform())) * std::cos(2 * M_PI * uniform());
        const auto f = wick_feature_values(xi, spec, ordering);
        for (std::size_t a = 0; a < M; ++a) {
            for (std::size_t b = a; b < M; ++b) {
                s[a * M + b] += f[a] * f[b];
                q[a * M + b] += f[a] * f[a] * f[b] * f[b];
            }
        }
    }
    int outside = 0;
    for (std::size_t a = 0; a < M; ++a) {
        for (std::size_t b = a; b < M; ++b) {
            const double mean = s[a * M + b] / draws;
            const double se = std::sqrt((q[a * M + b] / draws - mean * mean) / draws);
            outside += std::abs(mean - (a == b ? 1.0 : 0.0)) > 3 * se;
        }
    }
    CHECK(outside == 0);
}
