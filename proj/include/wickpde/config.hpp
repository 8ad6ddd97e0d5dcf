#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "wickpde/phi42.hpp"
#include "wickpde/phi43.hpp"

namespace wickpde {

enum class Equation { phi42, phi43 };
enum class DType : std::uint32_t { f32 = 1, f64 = 2 };

std::string to_string(Equation e);
std::string to_string(DType d);
DType dtype_from_string(const std::string& s);

/// Everything needed to (re)generate a dataset. The same JSON schema serves
/// as run configuration and as the dataset manifest; manifest-only keys
/// (files, times, counterterms, ordering) are ignored when reading a config.
struct RunSpec {
    Equation equation = Equation::phi42;
    phi42::Config phi42{};
    phi43::Config phi43{};
    std::uint64_t master_seed = 0;
    std::uint64_t n_trajectories = 1;
    DType field_dtype = DType::f32;
    bool store_noise = false;

    const GridSpec& grid() const noexcept;
    const chaos::BasisSpec& chaos() const noexcept;
    NoiseChannel channel() const noexcept;
    int n_save() const noexcept;
    double dt() const noexcept;
    std::int64_t n_steps() const;
    void validate() const;
};

nlohmann::json to_json(const RunSpec& spec);
/// Throws ConfigError on missing or malformed keys.
RunSpec run_spec_from_json(const nlohmann::json& j);
/// Reads and parses a JSON config or manifest file; throws ConfigError.
RunSpec load_run_spec(const std::filesystem::path& path);

}  // namespace wickpde
