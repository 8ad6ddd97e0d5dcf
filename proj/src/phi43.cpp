#include "wickpde/phi43.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wickpde/error.hpp"
#include "wickpde/kernels.hpp"

namespace wickpde::phi43 {

std::int64_t Config::n_steps() const { return static_cast<std::int64_t>(std::llround(horizon / dt)); }

std::int64_t Config::save_every() const { return n_steps() / n_save; }

NoiseParams Config::noise_params() const {
    return NoiseParams{grid, n_steps(), dt, NoiseKind::lattice_white_3d, 0, 1.0};
}

void Config::validate() const {
    if (grid.dim() != 3) throw ConfigError("phi43: grid must be 3-d");
    if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("phi43: dt and T must be positive");
    if (dt > horizon) throw ConfigError("phi43: dt exceeds T");
    const auto n = n_steps();
    if (std::abs(static_cast<double>(n) * dt - horizon) > 1e-9 * horizon) {
        throw ConfigError("phi43: T / dt is not an integer");
    }
    if (n_save < 1 || n % n_save != 0) {
        throw ConfigError("phi43: n_save = " + std::to_string(n_save) + " does not divide " + std::to_string(n) +
                          " steps");
    }
    if (quadrature_points < 16 || quadrature_points % 2 != 0) {
        throw ConfigError("phi43: quadrature_points must be even and >= 16");
    }
}

namespace {

double multiplicity(const GridSpec& g, const std::array<int, 3>& k) {
    const int last = k[g.dim() - 1];
    return (last == 0 || last == g.nyquist()) ? 1.0 : 2.0;
}

}  // namespace

double compute_c0(const GridSpec& grid) {
    if (grid.dim() != 3) throw ConfigError("compute_c0: grid must be 3-d");
    const auto table = discrete_laplacian_symbol(grid);
    double sum = 0.0;
    for (std::size_t i = 1; i < table.modes.size(); ++i) {
        sum += multiplicity(grid, table.modes[i]) / (2.0 * table.discrete[i]);
    }
    return sum / grid.volume();
}

double c11_integrand(const GridSpec& grid, double s) {
    const auto table = discrete_laplacian_symbol(grid);
    const Fft fft(grid);
    const std::size_t m = grid.spectral_size();
    std::vector<std::complex<double>> p_hat(m), c_hat(m), scratch(m);
    // Continuum-normalized kernels: f(x) = L^-3 sum_k fhat_k e^{ikx} = IFFT(n^3 L^-3 fhat).
    const double scale = static_cast<double>(grid.total()) / grid.volume();
    for (std::size_t i = 0; i < m; ++i) {
        const double lam = table.discrete[i];
        const double e = std::exp(-s * lam);
        p_hat[i] = scale * e;
        c_hat[i] = i == 0 ? 0.0 : scale * e / (2.0 * lam);
    }
    std::vector<double> p(grid.total()), c(grid.total());
    fft.inverse(p_hat, p, scratch);
    fft.inverse(c_hat, c, scratch);
    double sum = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) sum += p[x] * c[x] * c[x];
    return sum * std::pow(grid.spacing(), 3);
}

std::pair<double, double> c11_window(const GridSpec& grid) {
    const auto table = discrete_laplacian_symbol(grid);
    double lam_min = table.discrete[1];
    double lam_max = 0.0;
    for (std::size_t i = 1; i < table.discrete.size(); ++i) {
        lam_min = std::min(lam_min, table.discrete[i]);
        lam_max = std::max(lam_max, table.discrete[i]);
    }
    // G(u) = s g(s), s = e^u: rises like e^u, decays like exp(-2 lambda_min s).
    auto G = [&](double u) { return std::exp(u) * c11_integrand(grid, std::exp(u)); };
    const double u_a = std::log(1e-2 / lam_max);
    const double u_b = std::log(10.0 / lam_min);
    double peak = 0.0;
    for (double u = u_a; u <= u_b; u += 0.5) peak = std::max(peak, G(u));
    const double floor = 1e-14 * peak;
    double lo = u_a;
    while (G(lo) >= floor) lo -= 1.0;
    double hi = u_b;
    while (G(hi) >= floor) hi += 0.5;
    return {lo, hi};
}

double c11_simpson(const GridSpec& grid, int intervals) {
    if (grid.dim() != 3) throw ConfigError("compute_c11: grid must be 3-d");
    if (intervals < 2 || intervals % 2 != 0) throw ConfigError("compute_c11: interval count must be even");
    const auto [lo, hi] = c11_window(grid);
    const double h = (hi - lo) / intervals;
    double sum = 0.0;
    for (int q = 0; q <= intervals; ++q) {
        const double u = lo + q * h;
        const double w = (q == 0 || q == intervals) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
        const double s = std::exp(u);
        sum += w * s * c11_integrand(grid, s);
    }
    return sum * h / 3.0;
}

double compute_c11(const GridSpec& grid, int quadrature_points) {
    if (quadrature_points < 16) throw ConfigError("compute_c11: quadrature_points must be >= 16");
    const double coarse = c11_simpson(grid, quadrature_points);
    const double fine = c11_simpson(grid, 2 * quadrature_points);
    const double rel = std::abs(fine - coarse) / std::abs(fine);
    if (!(rel <= 0.01)) {
        throw Error("compute_c11: quadrature not converged (" + std::to_string(quadrature_points) + " -> " +
                    std::to_string(2 * quadrature_points) + " intervals changed the value by " +
                    std::to_string(100.0 * rel) + "%)");
    }
    return fine;
}

Counterterms compute_counterterms(const Config& cfg) {
    cfg.validate();
    return Counterterms{compute_c0(cfg.grid), compute_c11(cfg.grid, cfg.quadrature_points), cfg.c12};
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const GridSpec& grid, double dt, double mass, bool nonlinear)
    : grid_(grid),
      dt_(dt),
      mass_(mass),
      nonlinear_(nonlinear),
      nl_(grid),
      phi_hat_(grid.spectral_size()),
      cube_hat_(grid.spectral_size()),
      inc_hat_(grid.spectral_size()),
      next_(grid.spectral_size()),
      scratch_(grid.spectral_size()) {
    if (!(dt > 0.0)) throw ConfigError("phi43 stepper: dt must be positive");
    const auto table = discrete_laplacian_symbol(grid);
    inv_.resize(table.discrete.size());
    for (std::size_t i = 0; i < inv_.size(); ++i) inv_[i] = 1.0 / (1.0 + dt * table.discrete[i]);
}

void Stepper::step(RealField& phi, std::span<const double> increment, std::int64_t step_index) {
    const auto& k = kernels::active();
    const Fft& fft = nl_.fft();
    fft.forward(phi.values, phi_hat_);
    if (nonlinear_) {
        nl_.low_pass_to_physical(phi_hat_, nl_.phys_a);
        k.cube(nl_.phys_a.data(), nl_.phys_out.data(), nl_.phys_out.size());
        if (!all_finite(nl_.phys_out)) throw BlowUpError("phi43 stepper", step_index);
        nl_.to_spectral_low_pass(nl_.phys_out, cube_hat_);
    } else {
        std::fill(cube_hat_.begin(), cube_hat_.end(), 0.0);
    }
    fft.forward(increment, inc_hat_);
    k.semi_implicit_noisy(phi_hat_.data(), cube_hat_.data(), inc_hat_.data(), inv_.data(), dt_, mass_, 1.0,
                          next_.data(), next_.size());
    fft.inverse(next_, phi.values, scratch_);
    if (!all_finite(phi.values)) throw BlowUpError("phi43 stepper", step_index);
}

RealField phi43_step(const RealField& state, const Counterterms& ct, double dt, std::span<const double> increment) {
    require_finite(state.values, "phi43_step");
    RealField out = state;
    Stepper(state.grid, dt, ct.mass()).step(out, increment);
    return out;
}

Trajectory run(const Config& cfg, const Counterterms& ct, const SeedSpec& seed, const IncrementProvider& noise) {
    cfg.validate();
    const auto& p = noise.params();
    if (p.grid != cfg.grid || p.n_steps != cfg.n_steps() || p.kind != NoiseKind::lattice_white_3d ||
        std::abs(p.dt - cfg.dt) > 1e-12 * cfg.dt) {
        throw ConfigError("phi43: noise path does not match the configuration (grid, dt, steps)");
    }
    Trajectory tr;
    tr.config = cfg;
    tr.seed = seed;
    tr.counterterms = ct;

    RealField phi = cfg.u0.realize(cfg.grid, seed);
    require_finite(phi.values, "phi43 initial condition");
    Stepper stepper(cfg.grid, cfg.dt, ct.mass(), cfg.nonlinear);
    GaussianIntegrals xi(cfg.noise_params(), cfg.channel, cfg.chaos.I, cfg.chaos.J);

    tr.phi.times.push_back(0.0);
    tr.phi.fields.push_back(phi);
    std::vector<double> inc(cfg.grid.total());
    const auto every = cfg.save_every();
    for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
        noise.increment(n, inc);
        xi.add(n, inc);
        stepper.step(phi, inc, n);
        if ((n + 1) % every == 0) {
            tr.phi.times.push_back(static_cast<double>(n + 1) * cfg.dt);
            tr.phi.fields.push_back(phi);
        }
    }
    tr.gaussian_integrals = xi.values();
    tr.wick = chaos::wick_features(tr.gaussian_integrals, cfg.chaos);
    return tr;
}

Trajectory run(const Config& cfg, const Counterterms& ct, const SeedSpec& seed) {
    const NoiseSource noise(seed, cfg.noise_params());
    return run(cfg, ct, seed, noise);
}

Trajectory run(const Config& cfg, const SeedSpec& seed) { return run(cfg, compute_counterterms(cfg), seed); }

}  // namespace wickpde::phi43
