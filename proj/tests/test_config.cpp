#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "wickpde/config.hpp"
#include "wickpde/error.hpp"

using namespace wickpde;
using nlohmann::json;

TEST_CASE("emit and parse are inverse") {
    RunSpec s;
    s.phi42.sigma = 0.7;
    s.phi42.cutoff = 4;
    s.phi42.u0 = {InitialCondition::Kind::cosine, 0.3, {2, 1, 0}, 4};
    s.phi42.channel = NoiseChannel::per_mode;
    s.phi42.chaos = {2, 3, 2};
    s.master_seed = 0xffffffffffffffffull;
    s.n_trajectories = 12;
    s.store_noise = true;
    const auto back = run_spec_from_json(to_json(s));
    CHECK(to_json(back) == to_json(s));
    CHECK(back.master_seed == s.master_seed);
    CHECK(back.phi42.u0 == s.phi42.u0);
    CHECK(back.phi42.channel == NoiseChannel::per_mode);
    CHECK(back.phi42.grid == s.phi42.grid);

    RunSpec t;
    t.equation = Equation::phi43;
    t.phi43.c12 = 0.125;
    t.phi43.grid = GridSpec(3, 16, 0.1 + 0.2);
    const auto tb = run_spec_from_json(to_json(t));
    CHECK(tb.phi43.grid.length() == 0.1 + 0.2);  // shortest round-trip doubles
    CHECK(tb.phi43.c12 == 0.125);
    CHECK(to_json(tb) == to_json(t));
}

TEST_CASE("defaults for optional keys") {
    const json j = {{"equation", "phi42"},
                    {"grid", {{"dim", 2}, {"n_per_axis", 16}, {"domain_length", 1.0}}},
                    {"time", {{"T", 0.1}, {"dt", 0.01}, {"n_save", 5}}}};
    const auto s = run_spec_from_json(j);
    CHECK(s.n_trajectories == 1);
    CHECK(s.phi42.cutoff == 8);
    CHECK(s.field_dtype == DType::f32);
    CHECK(s.phi42.u0.kind == InitialCondition::Kind::zero);
}

TEST_CASE("malformed configs") {
    const json good = to_json(RunSpec{});
    auto bad = good;
    bad["equation"] = "phi44";
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad.erase("grid");
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["grid"]["n_per_axis"] = "many";
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["time"]["dt"] = 0.3;
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["chaos"]["temporal_basis"] = "legendre";
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["chaos"]["J"] = 5000;
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["initial_condition"]["kind"] = "gaussian";
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);
    bad = good;
    bad["storage"]["field_dtype"] = "f16";
    CHECK_THROWS_AS(run_spec_from_json(bad), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / ("wickpde-cfg-" + std::to_string(::getpid()));
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_run_spec(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_run_spec("/nonexistent/config.json"), ConfigError);
}
