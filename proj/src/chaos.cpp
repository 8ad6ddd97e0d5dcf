#include "wickpde/chaos.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "wickpde/error.hpp"

namespace wickpde::chaos {

double hermite(int k, double x) {
    if (k < 0 || k > kMaxHermiteOrder) throw ConfigError("hermite: order outside [0, 32]");
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int m = 1; m < k; ++m) {
        const double next = x * cur - m * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

int MultiIndex::order() const noexcept {
    int s = 0;
    for (const auto& e : entries) s += e.power;
    return s;
}

double MultiIndex::factorial() const noexcept {
    double f = 1.0;
    for (const auto& e : entries) {
        for (int m = 2; m <= e.power; ++m) f *= m;
    }
    return f;
}

std::vector<int> MultiIndex::dense(const BasisSpec& spec) const {
    std::vector<int> d(static_cast<std::size_t>(spec.I * spec.J), 0);
    for (const auto& e : entries) d[static_cast<std::size_t>((e.i - 1) * spec.J + (e.j - 1))] = e.power;
    return d;
}

std::string MultiIndex::to_string() const {
    std::string s = "{";
    for (std::size_t n = 0; n < entries.size(); ++n) {
        if (n) s += ",";
        s += "(" + std::to_string(entries[n].i) + "," + std::to_string(entries[n].j) + "):" +
             std::to_string(entries[n].power);
    }
    return s + "}";
}

bool canonical_less(const MultiIndex& a, const MultiIndex& b) noexcept {
    const int oa = a.order();
    const int ob = b.order();
    if (oa != ob) return oa < ob;
    return std::lexicographical_compare(a.entries.begin(), a.entries.end(), b.entries.begin(), b.entries.end());
}

std::uint64_t index_count(const BasisSpec& spec) {
    if (spec.I < 1 || spec.J < 1 || spec.K < 0) throw ConfigError("chaos: need I, J >= 1 and K >= 0");
    // binom(n + K, K) built incrementally; every partial product is itself a binomial.
    const std::uint64_t n = static_cast<std::uint64_t>(spec.I) * static_cast<std::uint64_t>(spec.J);
    unsigned __int128 c = 1;
    for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(spec.K); ++k) {
        c = c * (n + k) / k;
        if (c > static_cast<unsigned __int128>(UINT64_MAX)) {
            throw ConfigError("chaos: index count overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(c);
}

std::vector<MultiIndex> enumerate_indices(const BasisSpec& spec) {
    const std::uint64_t count = index_count(spec);
    if (count > kMaxEnumeratedIndices) {
        throw ConfigError("chaos: " + std::to_string(count) + " indices exceed the enumeration limit");
    }
    const int slots = spec.I * spec.J;
    std::vector<MultiIndex> out;
    out.reserve(count);
    std::vector<int> dense(static_cast<std::size_t>(slots), 0);

    // Distribute `remaining` over slots >= s.
    std::function<void(int, int)> fill = [&](int s, int remaining) {
        if (s == slots || remaining == 0) {
            MultiIndex m;
            for (int q = 0; q < s; ++q) {
                if (dense[static_cast<std::size_t>(q)] > 0) {
                    m.entries.push_back({q / spec.J + 1, q % spec.J + 1, dense[static_cast<std::size_t>(q)]});
                }
            }
            out.push_back(std::move(m));
            return;
        }
        for (int p = 0; p <= remaining; ++p) {
            dense[static_cast<std::size_t>(s)] = p;
            fill(s + 1, remaining - p);
        }
        dense[static_cast<std::size_t>(s)] = 0;
    };
    fill(0, spec.K);
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

std::string ordering_digest(const std::vector<MultiIndex>& ordering) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::uint64_t fnv = 1469598103934665603ull;
    for (const auto& m : ordering) {
        const std::string s = m.to_string() + ";";
        crc = crc32(crc, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size()));
        for (unsigned char ch : s) {
            fnv ^= ch;
            fnv *= 1099511628211ull;
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08lx%016llx", static_cast<unsigned long>(crc),
                  static_cast<unsigned long long>(fnv));
    return buf;
}

std::vector<double> wick_feature_values(std::span<const double> xi, const BasisSpec& spec,
                                        const std::vector<MultiIndex>& ordering) {
    if (xi.size() != static_cast<std::size_t>(spec.I * spec.J)) {
        throw ConfigError("wick_features: expected " + std::to_string(spec.I * spec.J) + " Gaussian integrals, got " +
                          std::to_string(xi.size()));
    }
    // He_p(xi_ij) for every slot and power up to K.
    const int K = spec.K;
    std::vector<double> h(xi.size() * static_cast<std::size_t>(K + 1));
    for (std::size_t s = 0; s < xi.size(); ++s) {
        for (int p = 0; p <= K; ++p) h[s * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(p)] =
            hermite(p, xi[s]);
    }
    std::vector<double> values;
    values.reserve(ordering.size());
    for (const auto& m : ordering) {
        double v = 1.0;
        for (const auto& e : m.entries) {
            const auto slot = static_cast<std::size_t>((e.i - 1) * spec.J + (e.j - 1));
            v *= h[slot * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(e.power)];
        }
        values.push_back(m.entries.empty() ? 1.0 : v / std::sqrt(m.factorial()));
    }
    return values;
}

WickFeatureVector wick_features(std::span<const double> xi, const BasisSpec& spec) {
    WickFeatureVector w;
    w.basis = spec;
    w.ordering = enumerate_indices(spec);
    w.values = wick_feature_values(xi, spec, w.ordering);
    return w;
}

}  // namespace wickpde::chaos
