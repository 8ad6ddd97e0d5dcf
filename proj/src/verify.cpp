#include "wickpde/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numbers>
#include <unistd.h>

#include "wickpde/chaos.hpp"
#include "wickpde/config.hpp"
#include "wickpde/dataset.hpp"
#include "wickpde/error.hpp"
#include "wickpde/fft.hpp"
#include "wickpde/noise.hpp"
#include "wickpde/phi42.hpp"
#include "wickpde/phi43.hpp"
#include "wickpde/simulate.hpp"

namespace wickpde::verify {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

template <class F>
Check timed(std::string name, F&& body) {
    Check c;
    c.name = std::move(name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
}

double spatial_variance(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double lattice_symbol(const GridSpec& g, const std::array<int, 3>& k) {
    const double eps = g.spacing();
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
        const double h = std::sin(std::numbers::pi * k[d] / g.n());
        s += h * h;
    }
    return 4.0 / (eps * eps) * s;
}

/// Max over modes of |got/start - expected multiplier| / expected multiplier.
double multiplier_error(const GridSpec& g, const std::vector<std::complex<double>>& start,
                        const std::vector<std::complex<double>>& got, double dt, int steps, bool lattice) {
    double peak = 0.0;
    for (const auto& c : start) peak = std::max(peak, std::abs(c));
    double worst = 0.0;
    for (std::size_t i = 0; i < start.size(); ++i) {
        if (std::abs(start[i]) < 1e-6 * peak) continue;
        const auto k = g.mode(i);
        double lambda;
        if (lattice) {
            lambda = lattice_symbol(g, k);
        } else {
            const double w = kTwoPi / g.length();
            lambda = w * w * static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        }
        const double expected = std::pow(1.0 + dt * lambda, -steps);
        const std::complex<double> ratio = got[i] / start[i];
        worst = std::max(worst, std::abs(ratio - expected) / expected);
    }
    return worst;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("wickpde-verify-" + std::to_string(::getpid()) + "-" + tag);
        fs::remove_all(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every regular file under a, byte-compared with its counterpart under b.
bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
    std::size_t count = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++count;
        const auto rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) {
            why = rel.string() + " differs";
            return false;
        }
    }
    std::size_t count_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
    if (count != count_b) {
        why = "file counts differ";
        return false;
    }
    return true;
}

RunSpec small_phi42_spec(std::uint64_t n_traj) {
    RunSpec s;
    s.equation = Equation::phi42;
    s.phi42.grid = GridSpec(2, 8, phi42::kDefaultLength);
    s.phi42.cutoff = 2;
    s.phi42.horizon = 0.05;
    s.phi42.dt = 0.01;
    s.phi42.n_save = 5;
    s.phi42.chaos = {1, 2, 2};
    s.phi42.u0 = InitialCondition{InitialCondition::Kind::random_smooth, 0.5};
    s.master_seed = 99;
    s.n_trajectories = n_traj;
    return s;
}

RunSpec small_phi43_spec(std::uint64_t n_traj) {
    RunSpec s;
    s.equation = Equation::phi43;
    s.phi43.grid = GridSpec(3, 4, phi43::kDefaultLength);
    s.phi43.horizon = 0.01;
    s.phi43.dt = 0.001;
    s.phi43.n_save = 2;
    s.phi43.chaos = {1, 2, 2};
    s.master_seed = 5;
    s.n_trajectories = n_traj;
    return s;
}

SimulateOptions one_thread() {
    SimulateOptions o;
    o.threads = 1;
    return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// chaos

Check chaos_count_law(int max_ij, int max_k) {
    return timed("chaos count law", [&](Check& c) {
        auto factorial = [](int n) {
            std::uint64_t f = 1;
            for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
            return f;
        };
        int cases = 0;
        for (int I = 1; I <= max_ij; ++I) {
            for (int J = 1; I * J <= max_ij; ++J) {
                for (int K = 0; K <= max_k; ++K) {
                    const int m = I * J;
                    const std::uint64_t expected = factorial(m + K) / (factorial(m) * factorial(K));
                    const auto idx = chaos::enumerate_indices({I, J, K});
                    if (idx.size() != expected || chaos::index_count({I, J, K}) != expected) {
                        c.detail = fmt("I=%d J=%d K=%d: %zu indices, expected %llu", I, J, K, idx.size(),
                                       static_cast<unsigned long long>(expected));
                        return;
                    }
                    for (std::size_t a = 1; a < idx.size(); ++a) {
                        if (!chaos::canonical_less(idx[a - 1], idx[a])) {
                            c.detail = fmt("I=%d J=%d K=%d: ordering not strictly canonical at %zu", I, J, K, a);
                            return;
                        }
                    }
                    ++cases;
                }
            }
        }
        c.pass = true;
        c.detail = fmt("%d (I,J,K) cases, sizes equal (IJ+K)!/((IJ)!K!)", cases);
    });
}

Check hermite_values() {
    return timed("hermite recurrence", [](Check& c) {
        double worst = 0.0;
        for (double x : {-2.5, -1.3, 0.0, 0.5, 1.0, 3.0}) {
            const double ref[] = {1.0,
                                  x,
                                  x * x - 1.0,
                                  x * x * x - 3.0 * x,
                                  x * x * x * x - 6.0 * x * x + 3.0,
                                  x * x * x * x * x - 10.0 * x * x * x + 15.0 * x};
            for (int k = 0; k < 6; ++k) {
                worst = std::max(worst, std::abs(chaos::hermite(k, x) - ref[k]) / std::max(1.0, std::abs(ref[k])));
            }
        }
        c.pass = worst <= 1e-12;
        c.detail = fmt("max rel error vs closed forms He_0..He_5: %.2e", worst);
    });
}

Check chaos_orthonormality(int J, int K, std::uint64_t draws, std::uint64_t seed, double n_se) {
    return timed("wick orthonormality", [&](Check& c) {
        const chaos::BasisSpec spec{1, J, K};
        const auto ordering = chaos::enumerate_indices(spec);
        const std::size_t M = ordering.size();
        const NoiseParams params{GridSpec(2, 4, 1.0), 8, 1.0 / 8.0, NoiseKind::spectral_truncated_2d, 2, 1.0};
        std::vector<double> sum(M * M, 0.0), sq(M * M, 0.0);
        for (std::uint64_t d = 0; d < draws; ++d) {
            const NoiseSource src(SeedSpec{seed, d}, params);
            const auto xi = gaussian_integrals(src, NoiseChannel::zero_mode, 1, J);
            const auto f = chaos::wick_feature_values(xi, spec, ordering);
            for (std::size_t a = 0; a < M; ++a) {
                for (std::size_t b = a; b < M; ++b) {
                    const double p = f[a] * f[b];
                    sum[a * M + b] += p;
                    sq[a * M + b] += p * p;
                }
            }
        }
        const double n = static_cast<double>(draws);
        double worst = 0.0;
        std::size_t wa = 0, wb = 0;
        int pairs = 0;
        for (std::size_t a = 0; a < M; ++a) {
            for (std::size_t b = a; b < M; ++b) {
                const double mean = sum[a * M + b] / n;
                const double var = sq[a * M + b] / n - mean * mean;
                const double se = std::sqrt(var / (n - 1.0));
                const double z = std::abs(mean - (a == b ? 1.0 : 0.0)) / se;
                ++pairs;
                if (z > worst) {
                    worst = z;
                    wa = a;
                    wb = b;
                }
            }
        }
        c.pass = worst <= n_se;
        c.detail = fmt("%zu features, %d pairs, %llu draws; worst |mean - delta| = %.2f SE at (%s, %s)", M, pairs,
                       static_cast<unsigned long long>(draws), worst, ordering[wa].to_string().c_str(),
                       ordering[wb].to_string().c_str());
    });
}

// ---------------------------------------------------------------------------
// phi42

OuMonteCarlo ou_monte_carlo(std::uint64_t trajectories, double rel_tol, double n_se, std::uint64_t seed) {
    OuMonteCarlo out;
    std::vector<double> var_mean(3), var_sq(3), w2(3), w2_sq(3), w3(3), w3_sq(3), a_val(3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        phi42::Config cfg;
        cfg.dt = 0.01;
        cfg.n_save = 10;
        const phi42::Plan plan(cfg);
        const std::int64_t targets[] = {10, 50, 100};
        for (int s = 0; s < 3; ++s) a_val[s] = plan.a_at_step[targets[s]];
        std::vector<double> inc(cfg.grid.total());
        phi42::StochasticConvolution sc(plan);
        for (std::uint64_t m = 0; m < trajectories; ++m) {
            const NoiseSource src(SeedSpec{seed, m}, cfg.noise_params());
            sc.reset();
            int s = 0;
            for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
                src.increment(n, inc);
                sc.advance(inc);
                if (n + 1 != targets[s]) continue;
                const RealField x = sc.field();
                const double a = a_val[s];
                double m2 = 0.0, m_w2 = 0.0, m_w3 = 0.0;
                for (double v : x.values) {
                    m2 += v * v;
                    m_w2 += v * v - a;
                    m_w3 += v * v * v - 3.0 * a * v;
                }
                const double inv = 1.0 / static_cast<double>(x.values.size());
                m2 *= inv;
                m_w2 *= inv;
                m_w3 *= inv;
                var_mean[s] += m2;
                var_sq[s] += m2 * m2;
                w2[s] += m_w2;
                w2_sq[s] += m_w2 * m_w2;
                w3[s] += m_w3;
                w3_sq[s] += m_w3 * m_w3;
                ++s;
                if (s == 3) break;
            }
        }
        const double M = static_cast<double>(trajectories);
        auto se = [M](double sum, double sq) {
            const double mean = sum / M;
            return std::sqrt(std::max(0.0, sq / M - mean * mean) / (M - 1.0));
        };
        const double times[] = {0.1, 0.5, 1.0};
        bool var_ok = true, mean_ok = true;
        std::string vd, md;
        for (int s = 0; s < 3; ++s) {
            const double est = var_mean[s] / M;
            const double rel = std::abs(est - a_val[s]) / a_val[s];
            var_ok = var_ok && rel <= rel_tol;
            vd += fmt("%st=%.1f a=%.5f mc=%.5f (rel %.2e, se %.1e)", s ? "; " : "", times[s], a_val[s], est, rel,
                      se(var_mean[s], var_sq[s]) / a_val[s]);
            const double z2 = std::abs(w2[s] / M) / se(w2[s], w2_sq[s]);
            const double z3 = std::abs(w3[s] / M) / se(w3[s], w3_sq[s]);
            mean_ok = mean_ok && z2 <= n_se && z3 <= n_se;
            md += fmt("%st=%.1f |X<>2| %.2f SE, |X<>3| %.2f SE", s ? "; " : "", times[s], z2, z3);
        }
        out.variance.pass = var_ok;
        out.variance.detail = fmt("%llu trajectories: ", static_cast<unsigned long long>(trajectories)) + vd;
        out.mean_zero.pass = mean_ok;
        out.mean_zero.detail = md;
    } catch (const std::exception& e) {
        out.variance.detail = out.mean_zero.detail = std::string("exception: ") + e.what();
    }
    out.variance.name = "renormalization oracle (OU variance)";
    out.mean_zero.name = "wick powers mean zero";
    out.variance.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

Check renorm_shape() {
    return timed("renormalization shape", [](Check& c) {
        const GridSpec g(2, 32, phi42::kDefaultLength);
        bool zero = true, increasing = true;
        for (int N : {4, 8, 16}) zero = zero && phi42::renorm_value(g, N, 1.0, 0.0) == 0.0;
        std::string d;
        for (double t : {0.1, 0.5, 1.0}) {
            const double a4 = phi42::renorm_value(g, 4, 1.0, t);
            const double a8 = phi42::renorm_value(g, 8, 1.0, t);
            const double a16 = phi42::renorm_value(g, 16, 1.0, t);
            increasing = increasing && a4 < a8 && a8 < a16;
            d += fmt("t=%.1f: %.5f < %.5f < %.5f; ", t, a4, a8, a16);
        }
        c.pass = zero && increasing;
        c.detail = std::string(zero ? "a(0) == 0; " : "a(0) != 0; ") + d;
    });
}

Check dpdd_equivalence(double tol, std::uint64_t seed) {
    return timed("DPDD equivalence", [&](Check& c) {
        phi42::Config fine;
        fine.dt = 1e-4;
        fine.n_save = 1;
        const NoiseSource path(SeedSpec{seed, 0}, fine.noise_params());
        std::vector<double> gaps;
        for (int factor : {4, 2, 1}) {
            phi42::Config cfg = fine;
            cfg.dt = fine.dt * factor;
            const NoiseSource src = path.coarsened(factor);
            const RealField u0(cfg.grid);
            const auto v = phi42::solve_shift_equation(cfg, src, u0);
            const auto x = phi42::stochastic_convolution(cfg, src);
            const auto d = phi42::solve_direct_renormalized(cfg, src, u0);
            std::vector<double> sum(v.fields.back().values);
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x.fields.back().values[i];
            gaps.push_back(rel_l2(sum, d.fields.back().values));
        }
        const bool monotone = gaps[0] > gaps[1] && gaps[1] > gaps[2];
        c.pass = monotone && gaps[2] <= tol;
        c.detail = fmt("gap at dt=4e-4, 2e-4, 1e-4: %.3e, %.3e, %.3e (%s)", gaps[0], gaps[1], gaps[2],
                       monotone ? "decreasing" : "NOT decreasing");
    });
}

Check phi42_linear_exactness(double tol) {
    return timed("phi42 linear exactness", [&](Check& c) {
        phi42::Config cfg;
        cfg.nonlinear = false;
        cfg.dt = 1e-3;
        cfg.horizon = 0.1;
        cfg.n_save = 1;
        const phi42::Plan plan(cfg);
        const RealField v0 = InitialCondition{InitialCondition::Kind::white_noise, 1.0}.realize(cfg.grid, {3, 0});
        phi42::ShiftSolver solver(plan, v0);
        const auto start = solver.spectrum();
        const std::vector<std::complex<double>> zero(start.size());
        const int steps = static_cast<int>(cfg.n_steps());
        for (int n = 0; n < steps; ++n) solver.advance(zero, 0.0, n);
        const double err = multiplier_error(cfg.grid, start, solver.spectrum(), cfg.dt, steps, false);
        c.pass = err <= tol;
        c.detail = fmt("32^2, %d steps: max per-mode rel error of (1+dt lambda)^-n = %.2e", steps, err);
    });
}

Check phi42_self_convergence(double min_factor, std::uint64_t seed) {
    return timed("phi42 self-convergence", [&](Check& c) {
        phi42::Config base;
        base.horizon = 0.5;
        base.n_save = 1;
        base.dt = 1e-3 / 8;
        const NoiseSource fine(SeedSpec{seed, 0}, base.noise_params());
        std::vector<std::vector<double>> u;
        for (int factor : {8, 4, 2, 1}) {
            phi42::Config cfg = base;
            cfg.dt = base.dt * factor;
            const phi42::Plan plan(cfg);
            u.push_back(phi42::run(plan, SeedSpec{seed, 0}, fine.coarsened(factor)).u.fields.back().values);
        }
        const double d0 = l2_diff(u[0], u[1]), d1 = l2_diff(u[1], u[2]), d2 = l2_diff(u[2], u[3]);
        const double f1 = d0 / d1, f2 = d1 / d2;
        c.pass = f1 >= min_factor && f2 >= min_factor;
        c.detail = fmt("u = v + X at T=0.5, dt=1e-3..1.25e-4: successive diffs %.3e %.3e %.3e, factors %.2f %.2f", d0,
                       d1, d2, f1, f2);
    });
}

// ---------------------------------------------------------------------------
// phi43

Check c0_brute_force(double tol) {
    return timed("C0 brute force at 4^3", [&](Check& c) {
        double worst = 0.0;
        std::string d;
        for (double L : {1.0, phi43::kDefaultLength}) {
            const GridSpec g(3, 4, L);
            double sum = 0.0;
            int terms = 0;
            for (int a = -2; a < 2; ++a) {
                for (int b = -2; b < 2; ++b) {
                    for (int e = -2; e < 2; ++e) {
                        if (a == 0 && b == 0 && e == 0) continue;
                        sum += 1.0 / (2.0 * lattice_symbol(g, {a, b, e}));
                        ++terms;
                    }
                }
            }
            const double ref = sum / (L * L * L);
            const double got = phi43::compute_c0(g);
            const double rel = std::abs(got - ref) / ref;
            worst = std::max(worst, rel);
            d += fmt("L=%.4g: %d terms, C0=%.17g, rel %.1e; ", L, terms, got, rel);
        }
        c.pass = worst <= tol;
        c.detail = d;
    });
}

Check c0_monte_carlo(double rel_tol, std::uint64_t seed) {
    return timed("C0 vs free-field Monte Carlo at 8^3", [&](Check& c) {
        phi43::Config cfg;
        cfg.grid = GridSpec(3, 8, phi43::kDefaultLength);
        cfg.dt = 1e-3;
        cfg.horizon = 50.0;
        cfg.n_save = 1;
        const double burn_in = 5.0;
        const int every = 10;
        const int runs = 8;
        const double c0 = phi43::compute_c0(cfg.grid);
        std::vector<double> run_means;
        std::vector<double> inc(cfg.grid.total());
        for (int r = 0; r < runs; ++r) {
            phi43::Stepper stepper(cfg.grid, cfg.dt, 0.0, false);
            const NoiseSource src(SeedSpec{seed, static_cast<std::uint64_t>(r)}, cfg.noise_params());
            RealField phi(cfg.grid);
            double acc = 0.0;
            int count = 0;
            for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
                src.increment(n, inc);
                stepper.step(phi, inc, n);
                if (static_cast<double>(n + 1) * cfg.dt >= burn_in && (n + 1) % every == 0) {
                    acc += spatial_variance(phi.values);
                    ++count;
                }
            }
            run_means.push_back(acc / count);
        }
        double mean = 0.0, sq = 0.0;
        for (double v : run_means) mean += v;
        mean /= runs;
        for (double v : run_means) sq += (v - mean) * (v - mean);
        const double se = std::sqrt(sq / (runs - 1) / runs);
        const double rel = std::abs(mean - c0) / c0;
        c.pass = rel <= rel_tol;
        c.detail = fmt("C0=%.6f, MC stationary variance %.6f +- %.6f (rel diff %.2e)", c0, mean, se, rel);
    });
}

Check c11_self_convergence(double rel_tol) {
    return timed("C11 quadrature self-convergence", [&](Check& c) {
        bool ok = true;
        std::string d;
        for (int n : {8, 32}) {
            const GridSpec g(3, n, phi43::kDefaultLength);
            const double q = phi43::c11_simpson(g, 64);
            const double q2 = phi43::c11_simpson(g, 128);
            const double rel = std::abs(q - q2) / std::abs(q2);
            ok = ok && rel < rel_tol;
            d += fmt("%d^3: Q=64 %.10g, Q=128 %.10g, rel %.2e; ", n, q, q2, rel);
        }
        c.pass = ok;
        c.detail = d;
    });
}

Check c11_dense_oracle(double tol) {
    return timed("C11 dense oracle at 4^3", [&](Check& c) {
        const GridSpec g(3, 4, phi43::kDefaultLength);
        const int n = g.n();
        std::vector<std::array<int, 3>> modes;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int e = 0; e < n; ++e)
                    if (a || b || e) modes.push_back({a, b, e});
        double sum = 0.0;
        for (const auto& k1 : modes) {
            const double l1 = lattice_symbol(g, k1);
            for (const auto& k2 : modes) {
                const double l2 = lattice_symbol(g, k2);
                const std::array<int, 3> k12{(k1[0] + k2[0]) % n, (k1[1] + k2[1]) % n, (k1[2] + k2[2]) % n};
                const double l12 = lattice_symbol(g, k12);
                sum += 1.0 / (4.0 * l1 * l2 * (l1 + l2 + l12));
            }
        }
        const double L = g.length();
        const double ref = sum / std::pow(L, 6);
        const int q = 512;
        const double got = phi43::c11_simpson(g, q);
        const double rel = std::abs(got - ref) / ref;
        c.pass = rel <= tol;
        c.detail = fmt("%zu^2 mode pairs: oracle %.15g, quadrature (Q=%d) %.15g, rel %.2e", modes.size(), ref, q,
                       got, rel);
    });
}

Check phi43_linear_exactness(double tol) {
    return timed("phi43 linear exactness", [&](Check& c) {
        const GridSpec g(3, 8, phi43::kDefaultLength);
        const double dt = 1e-3;
        const int steps = 100;
        phi43::Stepper stepper(g, dt, 0.0, false);
        RealField phi = InitialCondition{InitialCondition::Kind::white_noise, 1.0}.realize(g, {4, 0});
        std::vector<std::complex<double>> start(g.spectral_size()), end(g.spectral_size());
        const Fft fft(g);
        fft.forward(phi.values, start);
        const std::vector<double> zero(g.total(), 0.0);
        for (int n = 0; n < steps; ++n) stepper.step(phi, zero, n);
        fft.forward(phi.values, end);
        const double err = multiplier_error(g, start, end, dt, steps, true);
        c.pass = err <= tol;
        c.detail = fmt("8^3, %d steps: max per-mode rel error of (1+dt lambda_eps)^-n = %.2e", steps, err);
    });
}

Check phi43_stability(std::uint64_t seed) {
    return timed("phi43 stability (white-noise start, 32^3)", [&](Check& c) {
        const phi43::Config cfg;
        const auto ct = phi43::compute_counterterms(cfg);
        const auto tr = phi43::run(cfg, ct, SeedSpec{seed, 0});
        bool finite = true;
        std::string d;
        std::vector<double> var;
        for (std::size_t s = 0; s < tr.phi.fields.size(); ++s) {
            finite = finite && all_finite(tr.phi.fields[s].values);
            var.push_back(spatial_variance(tr.phi.fields[s].values));
            d += fmt("var(t=%.2g)=%.5g; ", tr.phi.times[s], var.back());
        }
        const double ratio = var.back() / var[var.size() - 2];
        c.pass = finite && ratio <= 10.0 && ratio >= 0.1;
        c.detail = d + fmt("%s, var(1)/var(0.5)=%.3f", finite ? "all finite" : "NON-FINITE", ratio);
    });
}

Check phi43_self_convergence(double min_factor, std::uint64_t seed) {
    return timed("phi43 self-convergence", [&](Check& c) {
        phi43::Config base;
        base.grid = GridSpec(3, 16, phi43::kDefaultLength);
        base.horizon = 0.2;
        base.n_save = 1;
        base.dt = 2e-3 / 8;
        const auto ct = phi43::compute_counterterms(base);
        const NoiseSource fine(SeedSpec{seed, 0}, base.noise_params());
        std::vector<std::vector<double>> u;
        for (int factor : {8, 4, 2, 1}) {
            phi43::Config cfg = base;
            cfg.dt = base.dt * factor;
            u.push_back(phi43::run(cfg, ct, SeedSpec{seed, 0}, fine.coarsened(factor)).phi.fields.back().values);
        }
        const double d0 = l2_diff(u[0], u[1]), d1 = l2_diff(u[1], u[2]), d2 = l2_diff(u[2], u[3]);
        const double f1 = d0 / d1, f2 = d1 / d2;
        c.pass = f1 >= min_factor && f2 >= min_factor;
        c.detail = fmt("16^3 at T=0.2, dt=2e-3..2.5e-4: successive diffs %.3e %.3e %.3e, factors %.2f %.2f", d0, d1,
                       d2, f1, f2);
    });
}

// ---------------------------------------------------------------------------
// io

Check io_round_trip() {
    return timed("dataset round trip", [](Check& c) {
        std::string d;
        int variant = 0;
        for (RunSpec spec : {small_phi42_spec(3), small_phi42_spec(2), small_phi43_spec(2)}) {
            if (variant == 1) {
                spec.field_dtype = DType::f64;
                spec.store_noise = true;
            }
            TempDir a("rt-a" + std::to_string(variant)), b("rt-b" + std::to_string(variant));
            simulate(spec, a.path, one_thread());
            const auto ds = dataset::read_dataset(a.path);
            const auto ct = run_counterterms(spec);
            for (std::uint64_t i = 0; i < spec.n_trajectories; ++i) {
                if (!(ds.records[i] == simulate_trajectory(spec, i, ct))) {
                    c.detail = fmt("variant %d trajectory %llu: read record differs from simulation", variant,
                                   static_cast<unsigned long long>(i));
                    return;
                }
            }
            dataset::write_dataset(ds.records, ds.manifest, b.path);
            std::string why;
            if (!same_tree(a.path, b.path, why)) {
                c.detail = fmt("variant %d: rewrite not byte-identical: %s", variant, why.c_str());
                return;
            }
            d += fmt("%s/%s %zu files ok; ", to_string(spec.equation).c_str(), to_string(spec.field_dtype).c_str(),
                     ds.manifest.files.size());
            ++variant;
        }
        c.pass = true;
        c.detail = d;
    });
}

Check io_tamper() {
    return timed("checksum tamper rejected", [](Check& c) {
        TempDir dir("tamper");
        simulate(small_phi42_spec(2), dir.path, one_thread());
        const auto m = dataset::read_manifest(dir.path);
        int rejected = 0, tried = 0;
        for (const std::size_t which : {std::size_t{0}, m.files.size() - 1}) {
            for (const std::uint64_t offset : {std::uint64_t{5}, m.files[which].bytes - 1}) {
                const fs::path p = dir.path / m.files[which].path;
                auto bytes = slurp(p);
                bytes[offset] = static_cast<char>(bytes[offset] ^ 0x10);
                std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
                ++tried;
                try {
                    dataset::read_dataset(dir.path);
                } catch (const ChecksumError&) {
                    ++rejected;
                }
                bytes[offset] = static_cast<char>(bytes[offset] ^ 0x10);
                std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            }
        }
        dataset::read_dataset(dir.path);
        c.pass = rejected == tried;
        c.detail = fmt("%d of %d single-byte flips rejected with a checksum error; restored copy reads", rejected,
                       tried);
    });
}

Check io_truncation() {
    return timed("truncated file rejected", [](Check& c) {
        TempDir dir("trunc");
        simulate(small_phi42_spec(1), dir.path, one_thread());
        const auto m = dataset::read_manifest(dir.path);
        const fs::path p = dir.path / m.files[0].path;
        auto bytes = slurp(p);
        bool header_check = false;
        try {
            std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 4);
            dataset::decode_tensor(cut);
        } catch (const FormatError&) {
            header_check = true;
        }
        bytes.resize(bytes.size() - 4);
        std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        bool read_check = false;
        try {
            dataset::read_dataset(dir.path);
        } catch (const FormatError&) {
            read_check = true;
        }
        c.pass = header_check && read_check;
        c.detail = fmt("decoder rejects header/length mismatch: %s; reader rejects truncated file: %s",
                       header_check ? "yes" : "no", read_check ? "yes" : "no");
    });
}

Check io_version() {
    return timed("format version mismatch rejected", [](Check& c) {
        TempDir dir("version");
        simulate(small_phi42_spec(1), dir.path, one_thread());
        const fs::path p = dir.path / dataset::kManifestName;
        auto j = nlohmann::json::parse(slurp(p));
        j["format_version"] = dataset::kFormatVersion + 1;
        std::ofstream(p) << j.dump(2);
        try {
            dataset::read_dataset(dir.path);
            c.detail = "manifest with a future format_version was accepted";
        } catch (const FormatError& e) {
            c.pass = true;
            c.detail = e.what();
        }
    });
}

Check io_empty() {
    return timed("empty dataset", [](Check& c) {
        TempDir dir("empty");
        simulate(small_phi42_spec(0), dir.path, one_thread());
        std::size_t files = 0;
        for (const auto& e : fs::recursive_directory_iterator(dir.path)) files += e.is_regular_file();
        const auto ds = dataset::read_dataset(dir.path);
        c.pass = files == 1 && ds.records.empty() && ds.manifest.files.empty();
        c.detail = fmt("%zu file(s) on disk, %zu records read", files, ds.records.size());
    });
}

Check io_regeneration() {
    return timed("regeneration from manifest", [](Check& c) {
        std::string d;
        for (const RunSpec& spec : {small_phi42_spec(4), small_phi43_spec(3)}) {
            TempDir a("regen-a"), b("regen-b");
            simulate(spec, a.path, one_thread());
            const RunSpec again = load_run_spec(a.path / dataset::kManifestName);
            SimulateOptions two;
            two.threads = 2;
            simulate(again, b.path, two);
            std::string why;
            if (!same_tree(a.path, b.path, why)) {
                c.detail = to_string(spec.equation) + ": " + why;
                return;
            }
            d += to_string(spec.equation) + " byte-identical (1 vs 2 threads); ";
        }
        c.pass = true;
        c.detail = d;
    });
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() { return {"chaos", "phi42", "phi43", "io"}; }

std::vector<Check> run_suite(const std::string& suite, bool stop_on_failure) {
    std::vector<std::function<std::vector<Check>()>> steps;
    auto one = [](auto f) { return std::function<std::vector<Check>()>([f] { return std::vector<Check>{f()}; }); };
    if (suite == "chaos") {
        steps = {one([] { return chaos_count_law(); }), one([] { return hermite_values(); }),
                 one([] { return chaos_orthonormality(); })};
    } else if (suite == "phi42") {
        steps = {one([] { return renorm_shape(); }),
                 [] {
                     auto mc = ou_monte_carlo();
                     return std::vector<Check>{mc.variance, mc.mean_zero};
                 },
                 one([] { return dpdd_equivalence(); }), one([] { return phi42_linear_exactness(); }),
                 one([] { return phi42_self_convergence(); })};
    } else if (suite == "phi43") {
        steps = {one([] { return c0_brute_force(); }),       one([] { return c0_monte_carlo(); }),
                 one([] { return c11_self_convergence(); }), one([] { return c11_dense_oracle(); }),
                 one([] { return phi43_linear_exactness(); }), one([] { return phi43_self_convergence(); }),
                 one([] { return phi43_stability(); })};
    } else if (suite == "io") {
        steps = {one([] { return io_round_trip(); }), one([] { return io_tamper(); }),
                 one([] { return io_truncation(); }), one([] { return io_version(); }),
                 one([] { return io_empty(); }),      one([] { return io_regeneration(); })};
    } else {
        throw ConfigError("unknown verify suite '" + suite + "'");
    }
    std::vector<Check> out;
    for (auto& s : steps) {
        for (auto& c : s()) {
            out.push_back(std::move(c));
            if (stop_on_failure && !out.back().pass) return out;
        }
    }
    return out;
}

}  // namespace wickpde::verify
