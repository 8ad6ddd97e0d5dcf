#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wickpde::chaos {

/// Largest Hermite order accepted by hermite().
inline constexpr int kMaxHermiteOrder = 32;

/// Probabilists' Hermite polynomial He_k(x) by the three-term recurrence.
double hermite(int k, double x);

struct BasisSpec {
    int I = 1;  ///< noise components
    int J = 1;  ///< temporal modes
    int K = 3;  ///< maximal total order |alpha|

    bool operator==(const BasisSpec&) const = default;
};

/// Finitely supported multi-index alpha over (i, j), 1-based.
struct MultiIndex {
    struct Entry {
        int i;
        int j;
        int power;
        auto operator<=>(const Entry&) const = default;
    };
    /// Non-zero entries sorted by (i, j).
    std::vector<Entry> entries;

    int order() const noexcept;
    /// alpha! = prod alpha_ij!
    double factorial() const noexcept;
    /// Dense row-major (i, j) vector of powers.
    std::vector<int> dense(const BasisSpec& spec) const;
    std::string to_string() const;

    bool operator==(const MultiIndex&) const = default;
};

/// Canonical order: ascending |alpha|, ties broken by lexicographic order of
/// the flattened (i, j, alpha_ij) triples.
bool canonical_less(const MultiIndex& a, const MultiIndex& b) noexcept;

/// binom(IJ + K, K); throws ConfigError if it does not fit in 64 bits.
std::uint64_t index_count(const BasisSpec& spec);

/// Enumerations larger than this are refused.
inline constexpr std::uint64_t kMaxEnumeratedIndices = 20'000'000;

/// Every alpha with support in [1,I] x [1,J] and |alpha| <= K, canonically ordered.
std::vector<MultiIndex> enumerate_indices(const BasisSpec& spec);

/// Hex digest of the canonical ordering, recorded with every dataset.
std::string ordering_digest(const std::vector<MultiIndex>& ordering);

struct WickFeatureVector {
    BasisSpec basis;
    std::vector<MultiIndex> ordering;
    std::vector<double> values;
};

/// xi_alpha = prod_ij He_{alpha_ij}(xi_ij) / sqrt(alpha!) with xi in
/// row-major (i, j) order. Throws ConfigError on a length mismatch.
WickFeatureVector wick_features(std::span<const double> xi, const BasisSpec& spec);

/// Same, reusing a precomputed ordering.
std::vector<double> wick_feature_values(std::span<const double> xi, const BasisSpec& spec,
                                        const std::vector<MultiIndex>& ordering);

}  // namespace wickpde::chaos
