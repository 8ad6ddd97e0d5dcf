// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "wickpde/verify.hpp"

using wickpde::verify::Check;

namespace {

int failures = 0;

// budget <= 0 means no runtime limit is enforced.
void report(int n, const std::vector<Check>& checks, double budget = 0.0) {
    bool pass = true;
    double seconds = 0.0;
    for (const auto& c : checks) {
        pass = pass && c.pass;
        seconds += c.seconds;
    }
    const bool in_time = budget <= 0.0 || seconds < budget;
    pass = pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d: %s (%.1f s", n, pass ? "PASS" : "FAIL", seconds);
    if (budget > 0.0) std::printf(", budget %.0f s%s", budget, in_time ? "" : " EXCEEDED");
    std::printf(")\n");
    for (const auto& c : checks) {
        std::printf("  [%s] %s: %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    std::fflush(stdout);
}

}  // namespace

int main() {
    namespace v = wickpde::verify;

    report(1, {v::chaos_count_law(12, 6)}, 1.0);
    report(2, {v::chaos_orthonormality(3, 3, 100000, 1, 3.0)}, 30.0);

    const auto ou = v::ou_monte_carlo(10000, 0.02, 3.0, 1);
    const auto shape = v::renorm_shape();
    report(3, {ou.variance, shape}, 300.0);
    report(4, {ou.mean_zero});

    report(5, {v::dpdd_equivalence(1e-2, 1)}, 120.0);
    report(6, {v::phi42_linear_exactness(1e-12), v::phi43_linear_exactness(1e-12)});
    report(7, {v::c0_brute_force(1e-12), v::c0_monte_carlo(0.02, 1), v::c11_self_convergence(0.01),
               v::c11_dense_oracle(1e-8)});
    // The 15 min limit is stated for a 4-core machine; the time is reported, not enforced.
    report(8, {v::phi43_stability(1)});
    report(9, {v::phi42_self_convergence(1.8, 1), v::phi43_self_convergence(1.8, 1)});
    report(10, {v::io_round_trip(), v::io_tamper(), v::io_regeneration()});

    std::printf("acceptance: %d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
