#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "wickpde/dataset.hpp"
#include "wickpde/simulate.hpp"

using namespace wickpde;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::map<std::string, std::string> kv;
};

Result cli(const std::string& args) {
    Result r;
    const std::string cmd = std::string(WICKPDE_CLI) + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
}

struct Scratch {
    fs::path path;
    explicit Scratch(const std::string& tag)
        : path(fs::temp_directory_path() / ("wickpde-cli-" + std::to_string(::getpid()) + "-" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Scratch() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

RunSpec tiny42() {
    RunSpec s;
    s.phi42.grid = GridSpec(2, 8, 6.283185307179586);
    s.phi42.cutoff = 2;
    s.phi42.horizon = 0.05;
    s.phi42.dt = 0.01;
    s.phi42.n_save = 5;
    s.phi42.chaos = {1, 2, 2};
    s.n_trajectories = 3;
    return s;
}

RunSpec tiny43() {
    RunSpec s;
    s.equation = Equation::phi43;
    s.phi43.grid = GridSpec(3, 4, 6.283185307179586);
    s.phi43.horizon = 1.0;
    s.phi43.dt = 0.01;
    s.phi43.n_save = 2;
    s.phi43.chaos = {1, 2, 2};
    s.n_trajectories = 2;
    return s;
}

std::string write_config(const Scratch& dir, const std::string& name, const RunSpec& s) {
    std::ofstream(dir / name) << to_json(s).dump(2);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_tree(const fs::path& a, const fs::path& b) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file() && slurp(e.path()) != slurp(b / fs::relative(e.path(), a))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("argument and config errors exit 2") {
    Scratch d("args");
    CHECK(cli("").code == 2);
    CHECK(cli("simulate-phi42 /nonexistent.json --out " + d / "x").code == 2);
    std::ofstream(d / "broken.json") << "{ \"equation\": ";
    CHECK(cli("simulate-phi42 " + d / "broken.json --out " + d / "x").code == 2);
    const auto cfg43 = write_config(d, "c43.json", tiny43());
    CHECK(cli("simulate-phi42 " + cfg43 + " --out " + d / "x").code == 2);
    CHECK(cli("verify --suite nonsense").code == 2);
    CHECK(cli("verify").code == 2);
}

TEST_CASE("simulate writes a dataset and reports key=value lines") {
    Scratch d("sim");
    const auto cfg = write_config(d, "c.json", tiny42());
    const auto r = cli("simulate-phi42 " + cfg + " --master-seed 11 --n-trajectories 4 --threads 2 --out " + d / "a");
    REQUIRE(r.code == 0);
    CHECK(r.kv.at("equation") == "phi42");
    CHECK(r.kv.at("n_trajectories") == "4");
    CHECK(r.kv.at("master_seed") == "11");
    CHECK(r.kv.at("threads") == "2");
    CHECK(r.kv.at("files") == "24");
    CHECK(r.kv.count("trajectories_per_second") == 1);
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);) CHECK(line.find('=') != std::string::npos);

    const auto ds = dataset::read_dataset(d.path / "a");
    CHECK(ds.manifest.run.master_seed == 11);
    CHECK(ds.records.size() == 4);

    SUBCASE("same seed twice gives identical bytes, whatever the thread count") {
        REQUIRE(cli("simulate-phi42 " + cfg + " --master-seed 11 --n-trajectories 4 --threads 1 --out " + d / "b")
                    .code == 0);
        CHECK(same_tree(d.path / "a", d.path / "b"));
    }
    SUBCASE("the manifest regenerates the dataset") {
        REQUIRE(cli("simulate-phi42 " + d / "a/manifest.json --out " + d / "c").code == 0);
        CHECK(same_tree(d.path / "a", d.path / "c"));
    }
    SUBCASE("WICKPDE_THREADS sets the default worker count") {
        const auto e = cli("simulate-phi42 " + cfg + " --out " + d / "e");
        ::setenv("WICKPDE_THREADS", "3", 1);
        const auto t = cli("simulate-phi42 " + cfg + " --out " + d / "t");
        ::unsetenv("WICKPDE_THREADS");
        CHECK(t.kv.at("threads") == "3");
        CHECK(e.code == 0);
    }
}

TEST_CASE("zero trajectories is a valid empty dataset") {
    Scratch d("zero");
    const auto cfg = write_config(d, "c.json", tiny42());
    const auto r = cli("simulate-phi42 " + cfg + " --n-trajectories 0 --out " + d / "z");
    CHECK(r.code == 0);
    CHECK(dataset::read_dataset(d.path / "z").records.empty());
}

TEST_CASE("blow-up exits 3 without a manifest") {
    Scratch d("blow");
    auto s = tiny42();
    s.phi42.u0 = {InitialCondition::Kind::constant, 1e6};
    const auto cfg = write_config(d, "c.json", s);
    CHECK(cli("simulate-phi42 " + cfg + " --out " + d / "b").code == 3);
    CHECK_FALSE(fs::exists(d.path / "b" / "manifest.json"));
}

TEST_CASE("I/O failures exit 4") {
    Scratch d("io");
    const auto cfg = write_config(d, "c.json", tiny42());
    std::ofstream(d / "occupied") << "x";
    CHECK(cli("simulate-phi42 " + cfg + " --out " + d / "occupied").code == 4);
    CHECK(cli("export-snapshots " + d / "nothing-here --out " + d / "png").code == 4);

    REQUIRE(cli("simulate-phi42 " + cfg + " --out " + d / "ds").code == 0);
    const auto m = dataset::read_manifest(d.path / "ds");
    const auto victim = d.path / "ds" / m.files[0].path;
    auto bytes = slurp(victim);
    bytes[40] ^= 0x40;
    std::ofstream(victim, std::ios::binary) << bytes;
    CHECK(cli("export-snapshots " + d / "ds --out " + d / "png").code == 4);
}

TEST_CASE("phi43 run header counterterms match verify") {
    Scratch d("ct");
    const auto cfg = write_config(d, "c.json", tiny43());
    const auto run = cli("simulate-phi43 " + cfg + " --quiet --out " + d / "r");
    REQUIRE(run.code == 0);
    const auto ver = cli("verify --config " + cfg);
    REQUIRE(ver.code == 0);
    for (const char* key : {"c0", "c11", "c12", "mass"}) CHECK(run.kv.at(key) == ver.kv.at(key));
    const auto ds = dataset::read_dataset(d.path / "r");
    CHECK(std::stod(run.kv.at("c0")) == ds.manifest.counterterms->c0);
}

TEST_CASE("verify io suite passes") {
    const auto r = cli("verify --suite io");
    CHECK(r.code == 0);
    CHECK(r.kv.at("result") == "pass");
}

TEST_CASE("export-snapshots") {
    Scratch d("export");
    SUBCASE("csv reproduces stored floats") {
        const auto cfg = write_config(d, "c.json", tiny42());
        REQUIRE(cli("simulate-phi42 " + cfg + " --out " + d / "ds").code == 0);
        REQUIRE(cli("export-snapshots " + d / "ds --trajectory 2 --times 0.05 --field v --out " + d / "csv").code ==
                0);
        const auto rec = dataset::read_trajectory(d.path / "ds", dataset::read_manifest(d.path / "ds"), 2);
        const auto& v = rec.at("v");
        std::ifstream in(d.path / "csv" / "traj000002_v_s05.csv");
        std::size_t i = 5 * 64, rows = 0;
        for (std::string line; std::getline(in, line); ++rows) {
            std::istringstream cells(line);
            for (std::string cell; std::getline(cells, cell, ',');) {
                CHECK(std::stof(cell) == static_cast<float>(v.data[i++]));
            }
        }
        CHECK(rows == 8);
        CHECK(i == 6 * 64);
        const auto side = nlohmann::json::parse(slurp(d.path / "csv" / "traj000002_v_s05.json"));
        CHECK(side["min"].get<double>() <= side["max"].get<double>());

        CHECK(cli("export-snapshots " + d / "ds --times 0.033 --out " + d / "csv").code == 2);
        CHECK(cli("export-snapshots " + d / "ds --trajectory 3 --out " + d / "csv").code == 2);
        CHECK(cli("export-snapshots " + d / "ds --field phi --out " + d / "csv").code == 2);
    }
    SUBCASE("constant field gives a uniform pgm") {
        auto spec = tiny42();
        spec.n_trajectories = 1;
        auto rec = simulate_trajectory(spec, 0, std::nullopt);
        for (auto& x : rec.arrays[0].second.data) x = 0.25;
        dataset::write_dataset({rec}, dataset::make_manifest(spec), d.path / "const");
        REQUIRE(cli("export-snapshots " + d / "const --times 0.02 --format pgm --out " + d / "pgm").code == 0);
        const auto img = slurp(d.path / "pgm" / "traj000000_u_s02.pgm");
        const std::string header = "P5\n8 8\n255\n";
        REQUIRE(img.size() == header.size() + 64);
        CHECK(img.substr(0, header.size()) == header);
        for (std::size_t i = header.size(); i < img.size(); ++i) CHECK(img[i] == img[header.size()]);
        const auto side = nlohmann::json::parse(slurp(d.path / "pgm" / "traj000000_u_s02.json"));
        CHECK(side["min"] == 0.25);
        CHECK(side["max"] == 0.25);
    }
    SUBCASE("3-d slices at t = 0, 0.5, 1 after a white-noise start") {
        const auto cfg = write_config(d, "c43.json", tiny43());
        REQUIRE(cli("simulate-phi43 " + cfg + " --quiet --out " + d / "ds43").code == 0);
        const auto r = cli("export-snapshots " + d / "ds43 --times 0,0.5,1 --format pgm --z 2 --out " + d / "fig");
        REQUIRE(r.code == 0);
        for (int s = 0; s < 3; ++s) {
            const auto img = slurp(d.path / "fig" / ("traj000000_phi_s0" + std::to_string(s) + ".pgm"));
            CHECK(img.substr(0, 9) == "P5\n4 4\n25");
            CHECK(img.size() == std::string("P5\n4 4\n255\n").size() + 16);
            const auto side =
                nlohmann::json::parse(slurp(d.path / "fig" / ("traj000000_phi_s0" + std::to_string(s) + ".json")));
            CHECK(side["shape"] == nlohmann::json::array({4, 4}));
            CHECK(side["z_index"] == 2);
        }
    }
}
