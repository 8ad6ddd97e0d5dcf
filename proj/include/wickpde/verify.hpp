#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wickpde::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// chaos
Check chaos_count_law(int max_ij = 12, int max_k = 6);
Check hermite_values();
/// E[xi_a xi_b] over `draws` noise paths, each pair within n_se standard errors of delta_ab.
Check chaos_orthonormality(int J = 3, int K = 3, std::uint64_t draws = 100000, std::uint64_t seed = 1,
                           double n_se = 3.0);

// phi42
struct OuMonteCarlo {
    Check variance;   // a(t) against the pooled pointwise variance of X
    Check mean_zero;  // X^<>2 and X^<>3 sample means
};
OuMonteCarlo ou_monte_carlo(std::uint64_t trajectories = 10000, double rel_tol = 0.02, double n_se = 3.0,
                            std::uint64_t seed = 1);
/// a(0) == 0 and a strictly increasing over N in {4, 8, 16}.
Check renorm_shape();
/// Gap ||u_direct - (v + X)|| / ||u_direct|| at dt = 4e-4, 2e-4, 1e-4.
Check dpdd_equivalence(double tol = 1e-2, std::uint64_t seed = 1);
Check phi42_linear_exactness(double tol = 1e-12);
Check phi42_self_convergence(double min_factor = 1.8, std::uint64_t seed = 1);

// phi43
Check c0_brute_force(double tol = 1e-12);
Check c0_monte_carlo(double rel_tol = 0.02, std::uint64_t seed = 1);
Check c11_self_convergence(double rel_tol = 0.01);
Check c11_dense_oracle(double tol = 1e-8);
Check phi43_linear_exactness(double tol = 1e-12);
Check phi43_stability(std::uint64_t seed = 1);
Check phi43_self_convergence(double min_factor = 1.8, std::uint64_t seed = 1);

// io
Check io_round_trip();
Check io_tamper();
Check io_truncation();
Check io_version();
Check io_empty();
Check io_regeneration();

/// Suite names: chaos, phi42, phi43, io.
std::vector<std::string> suite_names();
/// Runs checks in order; with stop_on_failure the first failing check ends the suite.
std::vector<Check> run_suite(const std::string& suite, bool stop_on_failure = true);

}  // namespace wickpde::verify
