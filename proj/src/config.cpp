#include "wickpde/config.hpp"

#include <fstream>

#include "wickpde/error.hpp"

namespace wickpde {

using nlohmann::json;

std::string to_string(Equation e) { return e == Equation::phi42 ? "phi42" : "phi43"; }

std::string to_string(DType d) { return d == DType::f32 ? "f32" : "f64"; }

DType dtype_from_string(const std::string& s) {
    if (s == "f32") return DType::f32;
    if (s == "f64") return DType::f64;
    throw ConfigError("unknown dtype '" + s + "'");
}

const GridSpec& RunSpec::grid() const noexcept { return equation == Equation::phi42 ? phi42.grid : phi43.grid; }

const chaos::BasisSpec& RunSpec::chaos() const noexcept {
    return equation == Equation::phi42 ? phi42.chaos : phi43.chaos;
}

NoiseChannel RunSpec::channel() const noexcept {
    return equation == Equation::phi42 ? phi42.channel : phi43.channel;
}

int RunSpec::n_save() const noexcept { return equation == Equation::phi42 ? phi42.n_save : phi43.n_save; }

double RunSpec::dt() const noexcept { return equation == Equation::phi42 ? phi42.dt : phi43.dt; }

std::int64_t RunSpec::n_steps() const { return equation == Equation::phi42 ? phi42.n_steps() : phi43.n_steps(); }

void RunSpec::validate() const {
    if (equation == Equation::phi42) {
        phi42.validate();
    } else {
        phi43.validate();
    }
    const auto& c = chaos();
    chaos::index_count(c);
    if (c.J > GaussianIntegrals::max_temporal_modes(n_steps())) {
        throw ConfigError("chaos: J exceeds the number of time steps");
    }
    if (channel() == NoiseChannel::zero_mode && c.I != 1) {
        throw ConfigError("chaos: the zero-mode channel requires I = 1");
    }
}

namespace {

json initial_to_json(const InitialCondition& ic) {
    return json{{"kind", to_string(ic.kind)},
                {"amplitude", ic.amplitude},
                {"mode", {ic.mode[0], ic.mode[1], ic.mode[2]}},
                {"cutoff", ic.cutoff}};
}

InitialCondition initial_from_json(const json& j) {
    InitialCondition ic;
    ic.kind = initial_kind_from_string(j.at("kind").get<std::string>());
    ic.amplitude = j.value("amplitude", 0.0);
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::vector<int>>();
        if (m.size() > 3) throw ConfigError("initial_condition.mode has more than 3 entries");
        ic.mode = {0, 0, 0};
        for (std::size_t d = 0; d < m.size(); ++d) ic.mode[d] = m[d];
    }
    ic.cutoff = j.value("cutoff", 4);
    return ic;
}

json chaos_to_json(const chaos::BasisSpec& c, NoiseChannel ch) {
    return json{{"I", c.I}, {"J", c.J}, {"K", c.K}, {"temporal_basis", "cosine"}, {"channel", to_string(ch)}};
}

}  // namespace

json to_json(const RunSpec& s) {
    json j;
    j["format_version"] = 1;
    j["equation"] = to_string(s.equation);
    j["master_seed"] = s.master_seed;
    j["n_trajectories"] = s.n_trajectories;
    const GridSpec& g = s.grid();
    j["grid"] = {{"dim", g.dim()}, {"n_per_axis", g.n()}, {"domain_length", g.length()}};
    if (s.equation == Equation::phi42) {
        const auto& c = s.phi42;
        j["time"] = {{"T", c.horizon}, {"dt", c.dt}, {"n_save", c.n_save}};
        j["physics"] = {{"cutoff", c.cutoff}, {"sigma", c.sigma}, {"nonlinear", c.nonlinear}};
        j["initial_condition"] = initial_to_json(c.u0);
        j["chaos"] = chaos_to_json(c.chaos, c.channel);
    } else {
        const auto& c = s.phi43;
        j["time"] = {{"T", c.horizon}, {"dt", c.dt}, {"n_save", c.n_save}};
        j["physics"] = {{"sigma", 1.0},
                        {"quadrature_points", c.quadrature_points},
                        {"c12", c.c12},
                        {"nonlinear", c.nonlinear}};
        j["initial_condition"] = initial_to_json(c.u0);
        j["chaos"] = chaos_to_json(c.chaos, c.channel);
    }
    j["storage"] = {{"field_dtype", to_string(s.field_dtype)}, {"store_noise", s.store_noise}};
    return j;
}

RunSpec run_spec_from_json(const json& j) {
    try {
        RunSpec s;
        const auto eq = j.at("equation").get<std::string>();
        if (eq == "phi42") {
            s.equation = Equation::phi42;
        } else if (eq == "phi43") {
            s.equation = Equation::phi43;
        } else {
            throw ConfigError("equation must be 'phi42' or 'phi43', got '" + eq + "'");
        }
        s.master_seed = j.value("master_seed", std::uint64_t{0});
        s.n_trajectories = j.value("n_trajectories", std::uint64_t{1});

        const auto& jg = j.at("grid");
        const GridSpec grid(jg.at("dim").get<int>(), jg.at("n_per_axis").get<int>(),
                            jg.at("domain_length").get<double>());
        const auto& jt = j.at("time");
        const json jp = j.value("physics", json::object());
        const json jc = j.value("chaos", json::object());
        chaos::BasisSpec basis{jc.value("I", 1), jc.value("J", 4), jc.value("K", 3)};
        const auto basis_tag = jc.value("temporal_basis", std::string("cosine"));
        if (basis_tag != "cosine") throw ConfigError("chaos.temporal_basis must be 'cosine'");
        const auto channel = noise_channel_from_string(jc.value("channel", std::string("zero-mode")));

        if (s.equation == Equation::phi42) {
            auto& c = s.phi42;
            c.grid = grid;
            c.horizon = jt.at("T").get<double>();
            c.dt = jt.at("dt").get<double>();
            c.n_save = jt.at("n_save").get<int>();
            c.cutoff = jp.value("cutoff", c.cutoff);
            c.sigma = jp.value("sigma", c.sigma);
            c.nonlinear = jp.value("nonlinear", true);
            if (j.contains("initial_condition")) c.u0 = initial_from_json(j.at("initial_condition"));
            c.chaos = basis;
            c.channel = channel;
        } else {
            auto& c = s.phi43;
            c.grid = grid;
            c.horizon = jt.at("T").get<double>();
            c.dt = jt.at("dt").get<double>();
            c.n_save = jt.at("n_save").get<int>();
            if (jp.value("sigma", 1.0) != 1.0) throw ConfigError("phi43: the noise amplitude is fixed to 1");
            c.quadrature_points = jp.value("quadrature_points", c.quadrature_points);
            c.c12 = jp.value("c12", 0.0);
            c.nonlinear = jp.value("nonlinear", true);
            if (j.contains("initial_condition")) c.u0 = initial_from_json(j.at("initial_condition"));
            c.chaos = basis;
            c.channel = channel;
        }
        const json jst = j.value("storage", json::object());
        s.field_dtype = dtype_from_string(jst.value("field_dtype", std::string("f32")));
        s.store_noise = jst.value("store_noise", false);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return run_spec_from_json(j);
}

}  // namespace wickpde
