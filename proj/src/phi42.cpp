#include "wickpde/phi42.hpp"

#include <cmath>
#include <string>

#include "wickpde/error.hpp"
#include "wickpde/kernels.hpp"

namespace wickpde::phi42 {

std::int64_t Config::n_steps() const {
    return static_cast<std::int64_t>(std::llround(horizon / dt));
}

std::int64_t Config::save_every() const { return n_steps() / n_save; }

NoiseParams Config::noise_params() const {
    return NoiseParams{grid, n_steps(), dt, NoiseKind::spectral_truncated_2d, cutoff, sigma};
}

void Config::validate() const {
    if (grid.dim() != 2) throw ConfigError("phi42: grid must be 2-d");
    if (!(sigma > 0.0)) throw ConfigError("phi42: sigma must be positive");
    if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("phi42: dt and T must be positive");
    if (dt > horizon) throw ConfigError("phi42: dt exceeds T");
    const auto n = n_steps();
    if (std::abs(static_cast<double>(n) * dt - horizon) > 1e-9 * horizon) {
        throw ConfigError("phi42: T / dt is not an integer");
    }
    if (n_save < 1 || n % n_save != 0) {
        throw ConfigError("phi42: n_save = " + std::to_string(n_save) + " does not divide " + std::to_string(n) +
                          " steps");
    }
    if (cutoff < 0 || cutoff > grid.nyquist()) throw ConfigError("phi42: cutoff outside [0, n/2]");
}

double renorm_value(const GridSpec& grid, int cutoff, double sigma, double t) {
    const auto table = discrete_laplacian_symbol(grid);
    const int last_max = grid.nyquist();
    double sum = 0.0;
    for (std::size_t i = 0; i < table.modes.size(); ++i) {
        const auto& k = table.modes[i];
        if (max_norm(k) > cutoff) continue;
        const int last = k[grid.dim() - 1];
        const double mult = (last == 0 || last == last_max) ? 1.0 : 2.0;
        const double lam = table.continuous[i];
        const double var = lam == 0.0 ? t : -std::expm1(-2.0 * lam * t) / (2.0 * lam);
        sum += mult * var;
    }
    return sigma * sigma * sum / grid.volume();
}

Plan::Plan(const Config& c) : cfg(c) {
    cfg.validate();
    const auto table = discrete_laplacian_symbol(cfg.grid);
    lambda = table.continuous;
    mask = cutoff_mask(cfg.grid, cfg.cutoff);
    const std::size_t m = lambda.size();
    decay.resize(m);
    gain.resize(m);
    inv.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double h = lambda[i] * cfg.dt;
        decay[i] = std::exp(-h);
        const double c2 = h == 0.0 ? 1.0 : -std::expm1(-2.0 * h) / (2.0 * h);
        gain[i] = mask[i] * cfg.sigma * std::sqrt(c2);
        inv[i] = 1.0 / (1.0 + h);
    }
    // a(t) summed mode by mode, reusing the per-mode constants.
    const auto n = cfg.n_steps();
    a_at_step.resize(static_cast<std::size_t>(n + 1));
    for (std::int64_t s = 0; s <= n; ++s) {
        a_at_step[static_cast<std::size_t>(s)] =
            renorm_value(cfg.grid, cfg.cutoff, cfg.sigma, static_cast<double>(s) * cfg.dt);
    }
    ordering = chaos::enumerate_indices(cfg.chaos);
}

RenormConstant renorm_constant(const Config& cfg) {
    cfg.validate();
    RenormConstant r;
    const auto every = cfg.save_every();
    for (int s = 0; s <= cfg.n_save; ++s) {
        const double t = static_cast<double>(s * every) * cfg.dt;
        r.times.push_back(t);
        r.values.push_back(renorm_value(cfg.grid, cfg.cutoff, cfg.sigma, t));
    }
    return r;
}

namespace {

RealField to_field(const GridSpec& g, const std::vector<std::complex<double>>& spec) {
    RealField f(g);
    std::vector<std::complex<double>> scratch(spec.size());
    Fft(g).inverse(spec, f.values, scratch);
    return f;
}

}  // namespace

// ---------------------------------------------------------------------------

StochasticConvolution::StochasticConvolution(const Plan& plan)
    : plan_(&plan),
      fft_(plan.cfg.grid),
      state_(plan.cfg.grid.spectral_size()),
      inc_hat_(plan.cfg.grid.spectral_size()) {}

void StochasticConvolution::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

void StochasticConvolution::advance(std::span<const double> increment) {
    fft_.forward(increment, inc_hat_);
    kernels::active().ou_update(state_.data(), plan_->decay.data(), plan_->gain.data(), inc_hat_.data(),
                                state_.size());
}

RealField StochasticConvolution::field() const { return to_field(plan_->cfg.grid, state_); }

ShiftSolver::ShiftSolver(const Plan& plan, const RealField& v0)
    : plan_(&plan),
      nl_(plan.cfg.grid),
      state_(plan.cfg.grid.spectral_size()),
      drift_hat_(plan.cfg.grid.spectral_size()),
      next_(plan.cfg.grid.spectral_size()) {
    if (v0.grid != plan.cfg.grid) throw ConfigError("shift solver: initial field grid mismatch");
    require_finite(v0.values, "shift solver initial condition");
    nl_.fft().forward(v0.values, state_);
}

void ShiftSolver::advance(const std::vector<std::complex<double>>& x_hat, double a, std::int64_t step) {
    const auto& k = kernels::active();
    const auto& cfg = plan_->cfg;
    if (cfg.nonlinear) {
        nl_.low_pass_to_physical(state_, nl_.phys_a);
        nl_.low_pass_to_physical(x_hat, nl_.phys_b);
        k.shift_drift(nl_.phys_a.data(), nl_.phys_b.data(), a, nl_.phys_out.data(), nl_.phys_out.size());
        if (!all_finite(nl_.phys_out)) throw BlowUpError("phi42 shift equation", step);
        nl_.to_spectral_low_pass(nl_.phys_out, drift_hat_);
    } else {
        std::fill(drift_hat_.begin(), drift_hat_.end(), 0.0);
    }
    k.semi_implicit(state_.data(), drift_hat_.data(), plan_->inv.data(), cfg.dt, 0.0, next_.data(), state_.size());
    state_.swap(next_);
}

RealField ShiftSolver::field() const { return to_field(plan_->cfg.grid, state_); }

DirectSolver::DirectSolver(const Plan& plan, const RealField& u0)
    : plan_(&plan),
      nl_(plan.cfg.grid),
      state_(plan.cfg.grid.spectral_size()),
      drift_hat_(plan.cfg.grid.spectral_size()),
      inc_hat_(plan.cfg.grid.spectral_size()),
      next_(plan.cfg.grid.spectral_size()) {
    if (u0.grid != plan.cfg.grid) throw ConfigError("direct solver: initial field grid mismatch");
    require_finite(u0.values, "direct solver initial condition");
    nl_.fft().forward(u0.values, state_);
}

void DirectSolver::advance(std::span<const double> increment, double a, std::int64_t step) {
    const auto& k = kernels::active();
    const auto& cfg = plan_->cfg;
    if (cfg.nonlinear) {
        nl_.low_pass_to_physical(state_, nl_.phys_a);
        k.wick_cube(nl_.phys_a.data(), a, nl_.phys_out.data(), nl_.phys_out.size());
        if (!all_finite(nl_.phys_out)) throw BlowUpError("phi42 direct solver", step);
        nl_.to_spectral_low_pass(nl_.phys_out, drift_hat_);
    } else {
        std::fill(drift_hat_.begin(), drift_hat_.end(), 0.0);
    }
    nl_.fft().forward(increment, inc_hat_);
    k.scale_modes(inc_hat_.data(), plan_->mask.data(), inc_hat_.size());
    k.semi_implicit_noisy(state_.data(), drift_hat_.data(), inc_hat_.data(), plan_->inv.data(), cfg.dt, 0.0,
                          cfg.sigma, next_.data(), state_.size());
    state_.swap(next_);
}

RealField DirectSolver::field() const { return to_field(plan_->cfg.grid, state_); }

// ---------------------------------------------------------------------------

RealField wick_square(const RealField& x, double a) {
    if (a < 0.0) throw ConfigError("wick_square: a must be non-negative");
    RealField out(x.grid);
    kernels::active().wick_square(x.values.data(), a, out.values.data(), out.values.size());
    return out;
}

RealField wick_cube(const RealField& x, double a) {
    if (a < 0.0) throw ConfigError("wick_cube: a must be non-negative");
    // (P x)^3 - 3 a P x, then P; P is the dealiasing projection.
    DealiasedNonlinearity nl(x.grid);
    std::vector<std::complex<double>> spec(x.grid.spectral_size());
    nl.fft().forward(x.values, spec);
    nl.low_pass_to_physical(spec, nl.phys_a);
    kernels::active().wick_cube(nl.phys_a.data(), a, nl.phys_out.data(), nl.phys_out.size());
    nl.to_spectral_low_pass(nl.phys_out, spec);
    return to_field(x.grid, spec);
}

RealField project_initial(const Config& cfg, const RealField& u0) {
    if (u0.grid != cfg.grid) throw ConfigError("phi42: initial field grid mismatch");
    auto spec = forward_fft(u0);
    spectral_project_in_place(spec, cfg.cutoff);
    return inverse_fft(spec);
}

namespace {

void check_noise(const Plan& plan, const IncrementProvider& noise) {
    const auto& p = noise.params();
    const auto& c = plan.cfg;
    if (p.grid != c.grid || p.cutoff != c.cutoff || p.n_steps != c.n_steps() ||
        p.kind != NoiseKind::spectral_truncated_2d || std::abs(p.dt - c.dt) > 1e-12 * c.dt) {
        throw ConfigError("phi42: noise path does not match the configuration (grid, cutoff, dt, steps)");
    }
}

bool save_point(const Plan& plan, std::int64_t step) { return step % plan.cfg.save_every() == 0; }

}  // namespace

Snapshots stochastic_convolution(const Config& cfg, const IncrementProvider& noise) {
    const Plan plan(cfg);
    check_noise(plan, noise);
    StochasticConvolution x(plan);
    Snapshots out;
    std::vector<double> inc(cfg.grid.total());
    out.times.push_back(0.0);
    out.fields.push_back(x.field());
    for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
        noise.increment(n, inc);
        x.advance(inc);
        if (save_point(plan, n + 1)) {
            out.times.push_back(static_cast<double>(n + 1) * cfg.dt);
            out.fields.push_back(x.field());
        }
    }
    return out;
}

Snapshots solve_shift_equation(const Config& cfg, const IncrementProvider& noise, const RealField& u0) {
    const Plan plan(cfg);
    check_noise(plan, noise);
    StochasticConvolution x(plan);
    ShiftSolver v(plan, project_initial(cfg, u0));
    Snapshots out;
    std::vector<double> inc(cfg.grid.total());
    out.times.push_back(0.0);
    out.fields.push_back(v.field());
    for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
        v.advance(x.spectrum(), plan.a_at_step[static_cast<std::size_t>(n)], n);
        noise.increment(n, inc);
        x.advance(inc);
        if (save_point(plan, n + 1)) {
            out.times.push_back(static_cast<double>(n + 1) * cfg.dt);
            out.fields.push_back(v.field());
        }
    }
    return out;
}

Snapshots solve_direct_renormalized(const Config& cfg, const IncrementProvider& noise, const RealField& u0) {
    const Plan plan(cfg);
    check_noise(plan, noise);
    DirectSolver u(plan, project_initial(cfg, u0));
    Snapshots out;
    std::vector<double> inc(cfg.grid.total());
    out.times.push_back(0.0);
    out.fields.push_back(u.field());
    for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
        noise.increment(n, inc);
        u.advance(inc, plan.a_at_step[static_cast<std::size_t>(n)], n);
        if (save_point(plan, n + 1)) {
            out.times.push_back(static_cast<double>(n + 1) * cfg.dt);
            out.fields.push_back(u.field());
        }
    }
    return out;
}

Trajectory run(const Plan& plan, const SeedSpec& seed, const IncrementProvider& noise) {
    check_noise(plan, noise);
    const auto& cfg = plan.cfg;
    Trajectory tr;
    tr.config = cfg;
    tr.seed = seed;

    StochasticConvolution x(plan);
    ShiftSolver v(plan, project_initial(cfg, cfg.u0.realize(cfg.grid, seed)));
    GaussianIntegrals xi(cfg.noise_params(), cfg.channel, cfg.chaos.I, cfg.chaos.J);

    auto save = [&](std::int64_t step) {
        const double t = static_cast<double>(step) * cfg.dt;
        RealField xf = x.field();
        RealField vf = v.field();
        if (!all_finite(vf.values)) throw BlowUpError("phi42 shift equation", step);
        RealField uf(cfg.grid);
        for (std::size_t i = 0; i < uf.values.size(); ++i) uf.values[i] = vf.values[i] + xf.values[i];
        for (auto* s : {&tr.u, &tr.v, &tr.x}) s->times.push_back(t);
        tr.u.fields.push_back(std::move(uf));
        tr.v.fields.push_back(std::move(vf));
        tr.x.fields.push_back(std::move(xf));
        tr.renorm.times.push_back(t);
        tr.renorm.values.push_back(plan.a_at_step[static_cast<std::size_t>(step)]);
    };

    std::vector<double> inc(cfg.grid.total());
    save(0);
    for (std::int64_t n = 0; n < cfg.n_steps(); ++n) {
        v.advance(x.spectrum(), plan.a_at_step[static_cast<std::size_t>(n)], n);
        noise.increment(n, inc);
        xi.add(n, inc);
        x.advance(inc);
        if (save_point(plan, n + 1)) save(n + 1);
    }
    tr.gaussian_integrals = xi.values();
    tr.wick.basis = cfg.chaos;
    tr.wick.ordering = plan.ordering;
    tr.wick.values = chaos::wick_feature_values(tr.gaussian_integrals, cfg.chaos, plan.ordering);
    return tr;
}

Trajectory run(const Config& cfg, const SeedSpec& seed) {
    const Plan plan(cfg);
    const NoiseSource noise(seed, cfg.noise_params());
    return run(plan, seed, noise);
}

}  // namespace wickpde::phi42
