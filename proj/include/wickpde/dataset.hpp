#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wickpde/config.hpp"
#include "wickpde/noise.hpp"
#include "wickpde/phi42.hpp"
#include "wickpde/phi43.hpp"

namespace wickpde::dataset {

inline constexpr int kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 32;
inline constexpr char kManifestName[] = "manifest.json";

/// Values are held as doubles; f32 tensors hold values already rounded to float.
struct Tensor {
    DType dtype = DType::f64;
    std::vector<std::uint64_t> shape;
    std::vector<double> data;

    std::uint64_t elements() const noexcept;
    bool operator==(const Tensor&) const = default;
};

/// Wire encoding: 32-byte header ("WCF1", u32 dtype, u32 rank, 20 reserved
/// zero bytes), rank u64 dimensions, then row-major little-endian data.
std::vector<std::uint8_t> encode_tensor(const Tensor& t);
/// Throws FormatError on bad magic, unknown dtype, or a byte length that
/// disagrees with the header-implied size.
Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::string& what = "tensor");
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

struct FileEntry {
    std::string path;  // relative to the dataset root
    std::uint64_t trajectory_index = 0;
    std::string array;
    DType dtype = DType::f64;
    std::vector<std::uint64_t> shape;
    std::uint64_t bytes = 0;
    std::uint32_t crc32 = 0;

    bool operator==(const FileEntry&) const = default;
};

struct TrajectoryRecord {
    std::uint64_t trajectory_index = 0;
    SeedSpec seed;
    /// Named arrays in file order: u, v, X, a_eps, xi, wick[, noise] for phi42;
    /// phi, xi, wick[, noise] for phi43.
    std::vector<std::pair<std::string, Tensor>> arrays;

    const Tensor* find(const std::string& name) const noexcept;
    /// Throws IoError if absent.
    const Tensor& at(const std::string& name) const;
    bool operator==(const TrajectoryRecord&) const = default;
};

struct Manifest {
    RunSpec run;
    std::vector<double> times;
    std::vector<std::string> ordering;
    std::string ordering_digest;
    std::optional<phi43::Counterterms> counterterms;
    std::vector<FileEntry> files;
};

/// Manifest for a run: snapshot times and chaos ordering filled in, no files.
Manifest make_manifest(const RunSpec& run, std::optional<phi43::Counterterms> ct = std::nullopt);

nlohmann::json to_json(const Manifest& m);
/// Throws FormatError on a format_version mismatch, ConfigError on a bad config part.
Manifest manifest_from_json(const nlohmann::json& j);

struct ArraySpec {
    std::string name;
    DType dtype;
    std::vector<std::uint64_t> shape;
};

/// Arrays every record of this manifest must carry, in file order.
std::vector<ArraySpec> expected_arrays(const Manifest& m);

TrajectoryRecord make_record(const phi42::Trajectory& t, DType field_dtype, const NoisePath* noise = nullptr);
TrajectoryRecord make_record(const phi43::Trajectory& t, DType field_dtype, const NoisePath* noise = nullptr);

struct Summary {
    std::uint64_t n_trajectories = 0;
    std::uint64_t n_files = 0;
    std::uint64_t bytes = 0;
};

/// Single-owner writer for one destination. Records may arrive in any order
/// and from several threads; the manifest is written by finish() with files
/// sorted by trajectory, so the result is independent of arrival order.
class Writer {
public:
    Writer(std::filesystem::path destination, Manifest manifest);

    /// Throws IoError if the record disagrees with the manifest.
    void add(const TrajectoryRecord& record);
    Summary finish();

private:
    std::filesystem::path dest_;
    Manifest manifest_;
    std::vector<ArraySpec> expected_;
    std::vector<bool> seen_;
    std::mutex mutex_;
    bool finished_ = false;
};

Summary write_dataset(const std::vector<TrajectoryRecord>& records, const Manifest& manifest,
                      const std::filesystem::path& destination);

struct Dataset {
    Manifest manifest;
    std::vector<TrajectoryRecord> records;
};

Manifest read_manifest(const std::filesystem::path& source);
/// One trajectory, with checksum, length, and shape checks.
TrajectoryRecord read_trajectory(const std::filesystem::path& source, const Manifest& manifest,
                                 std::uint64_t trajectory_index);
Dataset read_dataset(const std::filesystem::path& source);

}  // namespace wickpde::dataset
