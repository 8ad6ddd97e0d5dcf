#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "wickpde/dataset.hpp"
#include "wickpde/error.hpp"
#include "wickpde/simulate.hpp"

using namespace wickpde;
using namespace wickpde::dataset;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path path;
    explicit Scratch(const std::string& tag)
        : path(fs::temp_directory_path() / ("wickpde-test-" + std::to_string(::getpid()) + "-" + tag)) {
        fs::remove_all(path);
    }
    ~Scratch() { fs::remove_all(path); }
};

RunSpec tiny(std::uint64_t n) {
    RunSpec s;
    s.phi42.grid = GridSpec(2, 8, 6.283185307179586);
    s.phi42.cutoff = 2;
    s.phi42.horizon = 0.04;
    s.phi42.dt = 0.01;
    s.phi42.n_save = 2;
    s.phi42.chaos = {1, 2, 2};
    s.master_seed = 17;
    s.n_trajectories = n;
    return s;
}

std::vector<std::uint8_t> bytes_of(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put_bytes(const fs::path& p, const std::vector<std::uint8_t>& b) {
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("tensor wire format") {
    Tensor t;
    t.dtype = DType::f32;
    t.shape = {2, 3};
    t.data = {1, 2, 3, 4, 5, -0.5};
    const auto b = encode_tensor(t);
    REQUIRE(b.size() == 32 + 2 * 8 + 6 * 4);
    CHECK(std::memcmp(b.data(), "WCF1", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[8] == 2);
    for (int i = 12; i < 32; ++i) CHECK(b[i] == 0);
    CHECK(b[32] == 2);
    CHECK(b[40] == 3);
    float last;
    std::memcpy(&last, b.data() + b.size() - 4, 4);
    CHECK(last == -0.5f);
    CHECK(decode_tensor(b) == t);

    SUBCASE("f64 keeps every bit") {
        Tensor d;
        d.shape = {3};
        d.data = {0.1, -1e-300, 6.02214076e23};
        CHECK(decode_tensor(encode_tensor(d)) == d);
    }
    SUBCASE("rank 0 and empty tensors") {
        Tensor s;
        s.data = {4.0};
        CHECK(decode_tensor(encode_tensor(s)) == s);
        Tensor e;
        e.shape = {0, 5};
        CHECK(decode_tensor(encode_tensor(e)) == e);
    }
    SUBCASE("malformed input") {
        auto bad = b;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode_tensor(bad), FormatError);
        bad = b;
        bad[4] = 7;
        CHECK_THROWS_AS(decode_tensor(bad), FormatError);
        bad = b;
        bad.pop_back();
        CHECK_THROWS_AS(decode_tensor(bad), FormatError);
        bad = b;
        bad.push_back(0);
        CHECK_THROWS_AS(decode_tensor(bad), FormatError);
        bad = b;
        bad[31] = 1;
        CHECK_THROWS_AS(decode_tensor(bad), FormatError);
        CHECK_THROWS_AS(decode_tensor(std::vector<std::uint8_t>(10)), FormatError);
        Tensor wrong = t;
        wrong.data.pop_back();
        CHECK_THROWS_AS(encode_tensor(wrong), IoError);
    }
}

TEST_CASE("crc32 check value") {
    const std::string s = "123456789";
    CHECK(crc32(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())) == 0xCBF43926u);
}

TEST_CASE("manifest JSON round trip") {
    auto spec = tiny(2);
    spec.equation = Equation::phi43;
    spec.phi43.grid = GridSpec(3, 4, 1.0);
    spec.phi43.horizon = 0.01;
    spec.phi43.dt = 0.001;
    spec.phi43.chaos = {1, 2, 2};
    Manifest m = make_manifest(spec, phi43::Counterterms{0.1, 0.2, 0.0});
    m.files.push_back({"traj_000000/phi.wcf", 0, "phi", DType::f32, {3, 4, 4, 4}, 123, 0xdeadbeef});
    const auto j = to_json(m);
    CHECK(j["equation"] == "phi43");
    CHECK(j["chaos"]["ordering"].size() == 6);
    const auto back = manifest_from_json(j);
    CHECK(back.files == m.files);
    CHECK(back.times == m.times);
    CHECK(back.ordering_digest == m.ordering_digest);
    REQUIRE(back.counterterms.has_value());
    CHECK(back.counterterms->c11 == 0.2);

    auto j2 = j;
    j2["chaos"]["ordering_digest"] = "0000";
    CHECK_THROWS_AS(manifest_from_json(j2), FormatError);
    j2 = j;
    j2["files"][0]["path"] = "../escape.wcf";
    CHECK_THROWS_AS(manifest_from_json(j2), FormatError);
    j2 = j;
    j2.erase("format_version");
    CHECK_THROWS_AS(manifest_from_json(j2), FormatError);
}

TEST_CASE("write and read") {
    Scratch dir("rw");
    const auto spec = tiny(3);
    SimulateOptions one;
    one.threads = 1;
    const auto result = simulate(spec, dir.path, one);
    CHECK(result.summary.n_trajectories == 3);
    CHECK(result.summary.n_files == 18);

    const auto ds = read_dataset(dir.path);
    REQUIRE(ds.records.size() == 3);
    const auto& r = ds.records[1];
    CHECK(r.seed == SeedSpec{17, 1});
    CHECK(r.at("u").shape == std::vector<std::uint64_t>{3, 8, 8});
    CHECK(r.at("u").dtype == DType::f32);
    CHECK(r.at("a_eps").dtype == DType::f64);
    CHECK(r.at("wick").data.size() == 6);
    CHECK(r.find("noise") == nullptr);
    CHECK_THROWS_AS(r.at("phi"), IoError);
    CHECK(r == simulate_trajectory(spec, 1, std::nullopt));

    SUBCASE("rewriting the records reproduces the bytes") {
        Scratch again("rw2");
        write_dataset(ds.records, ds.manifest, again.path);
        for (const auto& f : ds.manifest.files) CHECK(bytes_of(dir.path / f.path) == bytes_of(again.path / f.path));
        CHECK(bytes_of(dir.path / kManifestName) == bytes_of(again.path / kManifestName));
    }
    SUBCASE("a flipped byte is a checksum error") {
        const auto p = dir.path / ds.manifest.files[4].path;
        auto b = bytes_of(p);
        b[b.size() / 2] ^= 1;
        put_bytes(p, b);
        CHECK_THROWS_AS(read_dataset(dir.path), ChecksumError);
    }
    SUBCASE("a short file is a format error") {
        const auto p = dir.path / ds.manifest.files[0].path;
        auto b = bytes_of(p);
        b.resize(b.size() - 8);
        put_bytes(p, b);
        CHECK_THROWS_AS(read_dataset(dir.path), FormatError);
    }
    SUBCASE("a missing file is an I/O error") {
        fs::remove(dir.path / ds.manifest.files[2].path);
        CHECK_THROWS_AS(read_dataset(dir.path), IoError);
    }
    SUBCASE("a future format version is rejected") {
        auto j = nlohmann::json::parse(bytes_of(dir.path / kManifestName));
        j["format_version"] = 2;
        std::ofstream(dir.path / kManifestName) << j.dump();
        CHECK_THROWS_AS(read_manifest(dir.path), FormatError);
    }
    SUBCASE("an inventory that disagrees with the config is rejected") {
        auto j = nlohmann::json::parse(bytes_of(dir.path / kManifestName));
        j["files"][0]["shape"] = {3, 8, 9};
        std::ofstream(dir.path / kManifestName) << j.dump();
        CHECK_THROWS_AS(read_manifest(dir.path), FormatError);
    }
}

TEST_CASE("writer consistency checks") {
    Scratch dir("writer");
    const auto spec = tiny(2);
    const auto rec = simulate_trajectory(spec, 0, std::nullopt);
    const auto m = make_manifest(spec);

    CHECK_THROWS_AS(write_dataset({rec}, m, dir.path), IoError);  // count mismatch
    {
        Writer w(dir.path, m);
        auto bad = rec;
        bad.arrays[0].second.shape = {3, 8, 4};
        CHECK_THROWS_AS(w.add(bad), IoError);
        bad = rec;
        bad.trajectory_index = 5;
        CHECK_THROWS_AS(w.add(bad), IoError);
        bad = rec;
        bad.seed.master_seed = 1;
        CHECK_THROWS_AS(w.add(bad), IoError);
        w.add(rec);
        CHECK_THROWS_AS(w.add(rec), IoError);
        CHECK_THROWS_AS(w.finish(), IoError);  // trajectory 1 missing
    }
    CHECK_FALSE(fs::exists(dir.path / kManifestName));
}

TEST_CASE("empty dataset") {
    Scratch dir("empty");
    write_dataset({}, make_manifest(tiny(0)), dir.path);
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir.path)) files += e.is_regular_file();
    CHECK(files == 1);
    const auto ds = read_dataset(dir.path);
    CHECK(ds.records.empty());
    CHECK(ds.manifest.run.n_trajectories == 0);
}

TEST_CASE("stored noise and f64 fields") {
    Scratch dir("noise");
    auto spec = tiny(1);
    spec.store_noise = true;
    spec.field_dtype = DType::f64;
    simulate(spec, dir.path);
    const auto ds = read_dataset(dir.path);
    const auto& noise = ds.records[0].at("noise");
    CHECK(noise.shape == std::vector<std::uint64_t>{4, 8, 8});
    const auto path = sample_noise_path({17, 0}, spec.phi42.grid, 4, 0.01, NoiseKind::spectral_truncated_2d, 2, 1.0);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(std::equal(path.increments[n].begin(), path.increments[n].end(), noise.data.begin() + n * 64));
    }
    const auto direct = phi42::run(spec.phi42, {17, 0});
    CHECK(ds.records[0].at("u").data.size() == 3 * 64);
    CHECK(std::equal(direct.u.fields[2].values.begin(), direct.u.fields[2].values.end(),
                     ds.records[0].at("u").data.begin() + 2 * 64));
}
