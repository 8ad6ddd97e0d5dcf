#include "wickpde/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <zlib.h>

#include "wickpde/error.hpp"

static_assert(std::endian::native == std::endian::little, "the tensor wire format assumes a little-endian host");

namespace wickpde::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t Tensor::elements() const noexcept {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

namespace {

std::size_t element_size(DType d) { return d == DType::f32 ? 4 : 8; }

template <class T>
void put(std::vector<std::uint8_t>& out, std::size_t offset, T v) {
    std::memcpy(out.data() + offset, &v, sizeof(T));
}

template <class T>
T get(std::span<const std::uint8_t> in, std::size_t offset) {
    T v;
    std::memcpy(&v, in.data() + offset, sizeof(T));
    return v;
}

std::string shape_string(const std::vector<std::uint64_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}

std::vector<std::uint8_t> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + p.string());
    return bytes;
}

void write_file(const fs::path& p, std::span<const std::uint8_t> bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + p.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("write failed: " + p.string());
}

std::string trajectory_dir(std::uint64_t index) {
    std::ostringstream os;
    os << "traj_" << std::setw(6) << std::setfill('0') << index;
    return os.str();
}

Tensor stack(const std::vector<RealField>& fields, DType dtype) {
    Tensor t;
    t.dtype = dtype;
    if (fields.empty()) throw IoError("no snapshots to store");
    const GridSpec& g = fields.front().grid;
    t.shape.push_back(fields.size());
    for (int d = 0; d < g.dim(); ++d) t.shape.push_back(static_cast<std::uint64_t>(g.n()));
    t.data.reserve(fields.size() * g.total());
    for (const auto& f : fields) {
        for (double v : f.values) t.data.push_back(dtype == DType::f32 ? static_cast<double>(static_cast<float>(v)) : v);
    }
    return t;
}

Tensor vector_tensor(std::vector<double> v, std::vector<std::uint64_t> shape) {
    Tensor t;
    t.dtype = DType::f64;
    t.shape = std::move(shape);
    t.data = std::move(v);
    return t;
}

Tensor noise_tensor(const NoisePath& p) {
    Tensor t;
    t.dtype = DType::f64;
    t.shape.push_back(p.increments.size());
    for (int d = 0; d < p.noise.grid.dim(); ++d) t.shape.push_back(static_cast<std::uint64_t>(p.noise.grid.n()));
    for (const auto& inc : p.increments) t.data.insert(t.data.end(), inc.begin(), inc.end());
    return t;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong c = ::crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
        c = ::crc32(c, bytes.data() + off, chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
    if (t.elements() != t.data.size()) throw IoError("tensor data length disagrees with shape " + shape_string(t.shape));
    const std::size_t es = element_size(t.dtype);
    const std::size_t dims_at = kHeaderBytes;
    const std::size_t data_at = dims_at + 8 * t.shape.size();
    std::vector<std::uint8_t> out(data_at + es * t.data.size(), 0);
    std::memcpy(out.data(), "WCF1", 4);
    put<std::uint32_t>(out, 4, static_cast<std::uint32_t>(t.dtype));
    put<std::uint32_t>(out, 8, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t r = 0; r < t.shape.size(); ++r) put<std::uint64_t>(out, dims_at + 8 * r, t.shape[r]);
    if (t.dtype == DType::f32) {
        for (std::size_t i = 0; i < t.data.size(); ++i) put<float>(out, data_at + 4 * i, static_cast<float>(t.data[i]));
    } else {
        std::memcpy(out.data() + data_at, t.data.data(), 8 * t.data.size());
    }
    return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::string& what) {
    if (bytes.size() < kHeaderBytes) throw FormatError(what + ": truncated header");
    if (std::memcmp(bytes.data(), "WCF1", 4) != 0) throw FormatError(what + ": bad magic");
    Tensor t;
    const auto code = get<std::uint32_t>(bytes, 4);
    if (code != 1 && code != 2) throw FormatError(what + ": unknown dtype code " + std::to_string(code));
    t.dtype = static_cast<DType>(code);
    const auto rank = get<std::uint32_t>(bytes, 8);
    if (rank > 16) throw FormatError(what + ": implausible rank " + std::to_string(rank));
    for (std::size_t i = 12; i < kHeaderBytes; ++i) {
        if (bytes[i] != 0) throw FormatError(what + ": non-zero reserved header bytes");
    }
    const std::size_t data_at = kHeaderBytes + 8 * std::size_t{rank};
    if (bytes.size() < data_at) throw FormatError(what + ": truncated dimension block");
    std::uint64_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
        t.shape.push_back(get<std::uint64_t>(bytes, kHeaderBytes + 8 * r));
        if (t.shape.back() != 0 && count > (UINT64_MAX / 16) / t.shape.back()) throw FormatError(what + ": shape overflow");
        count *= t.shape.back();
    }
    const std::size_t es = element_size(t.dtype);
    const std::uint64_t implied = data_at + es * count;
    if (bytes.size() != implied) {
        throw FormatError(what + ": " + std::to_string(bytes.size()) + " bytes, header implies " +
                          std::to_string(implied) + (bytes.size() < implied ? " (truncated)" : ""));
    }
    t.data.resize(count);
    if (t.dtype == DType::f32) {
        for (std::size_t i = 0; i < count; ++i) t.data[i] = get<float>(bytes, data_at + 4 * i);
    } else {
        std::memcpy(t.data.data(), bytes.data() + data_at, 8 * count);
    }
    return t;
}

const Tensor* TrajectoryRecord::find(const std::string& name) const noexcept {
    for (const auto& [n, t] : arrays) {
        if (n == name) return &t;
    }
    return nullptr;
}

const Tensor& TrajectoryRecord::at(const std::string& name) const {
    if (const Tensor* t = find(name)) return *t;
    throw IoError("trajectory " + std::to_string(trajectory_index) + " has no array '" + name + "'");
}

Manifest make_manifest(const RunSpec& run, std::optional<phi43::Counterterms> ct) {
    run.validate();
    Manifest m;
    m.run = run;
    const double dt = run.dt();
    const auto every = run.n_steps() / run.n_save();
    for (int s = 0; s <= run.n_save(); ++s) m.times.push_back(static_cast<double>(s * every) * dt);
    const auto ordering = chaos::enumerate_indices(run.chaos());
    for (const auto& a : ordering) m.ordering.push_back(a.to_string());
    m.ordering_digest = chaos::ordering_digest(ordering);
    if (run.equation == Equation::phi43) m.counterterms = ct;
    return m;
}

json to_json(const Manifest& m) {
    json j = to_json(m.run);
    j["format_version"] = kFormatVersion;
    j["times"] = m.times;
    j["chaos"]["ordering"] = m.ordering;
    j["chaos"]["ordering_digest"] = m.ordering_digest;
    if (m.counterterms) {
        const auto& c = *m.counterterms;
        j["counterterms"] = {{"c0", c.c0}, {"c11", c.c11}, {"c12", c.c12}, {"mass", c.mass()}};
    }
    json files = json::array();
    for (const auto& f : m.files) {
        files.push_back({{"path", f.path},
                         {"trajectory_index", f.trajectory_index},
                         {"array", f.array},
                         {"dtype", to_string(f.dtype)},
                         {"shape", f.shape},
                         {"bytes", f.bytes},
                         {"crc32", f.crc32}});
    }
    j["files"] = files;
    return j;
}

Manifest manifest_from_json(const json& j) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw FormatError("manifest: missing format_version");
    }
    const int version = j["format_version"].get<int>();
    if (version != kFormatVersion) {
        throw FormatError("manifest: format_version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kFormatVersion) + ")");
    }
    try {
        Manifest m = make_manifest(run_spec_from_json(j));
        if (j.contains("times") && j["times"].get<std::vector<double>>() != m.times) {
            throw FormatError("manifest: times disagree with the time discretization");
        }
        const auto& jc = j.at("chaos");
        if (jc.contains("ordering_digest") && jc["ordering_digest"].get<std::string>() != m.ordering_digest) {
            throw FormatError("manifest: chaos ordering digest mismatch");
        }
        if (j.contains("counterterms")) {
            const auto& c = j["counterterms"];
            m.counterterms = phi43::Counterterms{c.at("c0").get<double>(), c.at("c11").get<double>(),
                                                 c.at("c12").get<double>()};
        }
        for (const auto& f : j.value("files", json::array())) {
            FileEntry e;
            e.path = f.at("path").get<std::string>();
            e.trajectory_index = f.at("trajectory_index").get<std::uint64_t>();
            e.array = f.at("array").get<std::string>();
            e.dtype = dtype_from_string(f.at("dtype").get<std::string>());
            e.shape = f.at("shape").get<std::vector<std::uint64_t>>();
            e.bytes = f.at("bytes").get<std::uint64_t>();
            e.crc32 = f.at("crc32").get<std::uint32_t>();
            if (e.path.empty() || e.path.find("..") != std::string::npos || e.path.front() == '/') {
                throw FormatError("manifest: unsafe file path '" + e.path + "'");
            }
            m.files.push_back(std::move(e));
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
}

std::vector<ArraySpec> expected_arrays(const Manifest& m) {
    const RunSpec& r = m.run;
    const GridSpec& g = r.grid();
    const auto n = static_cast<std::uint64_t>(g.n());
    const auto S = static_cast<std::uint64_t>(r.n_save() + 1);
    std::vector<std::uint64_t> field{S, n, n};
    std::vector<std::uint64_t> noise{static_cast<std::uint64_t>(r.n_steps()), n, n};
    if (g.dim() == 3) {
        field.push_back(n);
        noise.push_back(n);
    }
    const auto& c = r.chaos();
    std::vector<ArraySpec> out;
    if (r.equation == Equation::phi42) {
        out.push_back({"u", r.field_dtype, field});
        out.push_back({"v", r.field_dtype, field});
        out.push_back({"X", r.field_dtype, field});
        out.push_back({"a_eps", DType::f64, {S}});
    } else {
        out.push_back({"phi", r.field_dtype, field});
    }
    out.push_back({"xi", DType::f64, {static_cast<std::uint64_t>(c.I), static_cast<std::uint64_t>(c.J)}});
    out.push_back({"wick", DType::f64, {static_cast<std::uint64_t>(m.ordering.size())}});
    if (r.store_noise) out.push_back({"noise", DType::f64, noise});
    return out;
}

TrajectoryRecord make_record(const phi42::Trajectory& t, DType field_dtype, const NoisePath* noise) {
    TrajectoryRecord r;
    r.trajectory_index = t.seed.trajectory_index;
    r.seed = t.seed;
    const auto& c = t.config.chaos;
    r.arrays.emplace_back("u", stack(t.u.fields, field_dtype));
    r.arrays.emplace_back("v", stack(t.v.fields, field_dtype));
    r.arrays.emplace_back("X", stack(t.x.fields, field_dtype));
    r.arrays.emplace_back("a_eps", vector_tensor(t.renorm.values, {t.renorm.values.size()}));
    r.arrays.emplace_back("xi", vector_tensor(t.gaussian_integrals, {static_cast<std::uint64_t>(c.I),
                                                                     static_cast<std::uint64_t>(c.J)}));
    r.arrays.emplace_back("wick", vector_tensor(t.wick.values, {t.wick.values.size()}));
    if (noise) r.arrays.emplace_back("noise", noise_tensor(*noise));
    return r;
}

TrajectoryRecord make_record(const phi43::Trajectory& t, DType field_dtype, const NoisePath* noise) {
    TrajectoryRecord r;
    r.trajectory_index = t.seed.trajectory_index;
    r.seed = t.seed;
    const auto& c = t.config.chaos;
    r.arrays.emplace_back("phi", stack(t.phi.fields, field_dtype));
    r.arrays.emplace_back("xi", vector_tensor(t.gaussian_integrals, {static_cast<std::uint64_t>(c.I),
                                                                     static_cast<std::uint64_t>(c.J)}));
    r.arrays.emplace_back("wick", vector_tensor(t.wick.values, {t.wick.values.size()}));
    if (noise) r.arrays.emplace_back("noise", noise_tensor(*noise));
    return r;
}

// ---------------------------------------------------------------------------

Writer::Writer(fs::path destination, Manifest manifest)
    : dest_(std::move(destination)), manifest_(std::move(manifest)) {
    manifest_.files.clear();
    expected_ = expected_arrays(manifest_);
    seen_.assign(manifest_.run.n_trajectories, false);
    std::error_code ec;
    fs::create_directories(dest_, ec);
    if (ec || !fs::is_directory(dest_)) throw IoError("cannot create dataset directory " + dest_.string());
}

void Writer::add(const TrajectoryRecord& rec) {
    const auto idx = rec.trajectory_index;
    if (idx >= seen_.size()) {
        throw IoError("trajectory " + std::to_string(idx) + " outside [0, n_trajectories)");
    }
    if (rec.seed != SeedSpec{manifest_.run.master_seed, idx}) {
        throw IoError("trajectory " + std::to_string(idx) + ": seed disagrees with the manifest");
    }
    if (rec.arrays.size() != expected_.size()) {
        throw IoError("trajectory " + std::to_string(idx) + ": expected " + std::to_string(expected_.size()) +
                      " arrays, got " + std::to_string(rec.arrays.size()));
    }
    for (std::size_t a = 0; a < expected_.size(); ++a) {
        const auto& [name, t] = rec.arrays[a];
        const auto& want = expected_[a];
        if (name != want.name || t.dtype != want.dtype || t.shape != want.shape) {
            throw IoError("trajectory " + std::to_string(idx) + ": array '" + name + "' " + to_string(t.dtype) +
                          shape_string(t.shape) + " does not match manifest '" + want.name + "' " +
                          to_string(want.dtype) + shape_string(want.shape));
        }
    }
    {
        std::lock_guard lock(mutex_);
        if (finished_) throw IoError("writer already finished");
        if (seen_[idx]) throw IoError("trajectory " + std::to_string(idx) + " added twice");
        seen_[idx] = true;
    }

    const std::string dir = trajectory_dir(idx);
    std::error_code ec;
    fs::create_directories(dest_ / dir, ec);
    if (ec) throw IoError("cannot create " + (dest_ / dir).string());
    std::vector<FileEntry> entries;
    for (const auto& [name, t] : rec.arrays) {
        const auto bytes = encode_tensor(t);
        FileEntry e;
        e.path = dir + "/" + name + ".wcf";
        e.trajectory_index = idx;
        e.array = name;
        e.dtype = t.dtype;
        e.shape = t.shape;
        e.bytes = bytes.size();
        e.crc32 = crc32(bytes);
        write_file(dest_ / e.path, bytes);
        entries.push_back(std::move(e));
    }
    std::lock_guard lock(mutex_);
    manifest_.files.insert(manifest_.files.end(), entries.begin(), entries.end());
}

Summary Writer::finish() {
    std::lock_guard lock(mutex_);
    if (finished_) throw IoError("writer already finished");
    for (std::size_t i = 0; i < seen_.size(); ++i) {
        if (!seen_[i]) throw IoError("trajectory " + std::to_string(i) + " missing from dataset");
    }
    finished_ = true;
    // Arrays of one trajectory were appended together and in order.
    std::stable_sort(manifest_.files.begin(), manifest_.files.end(),
                     [](const FileEntry& a, const FileEntry& b) { return a.trajectory_index < b.trajectory_index; });
    Summary s;
    s.n_trajectories = seen_.size();
    s.n_files = manifest_.files.size();
    for (const auto& f : manifest_.files) s.bytes += f.bytes;
    const std::string text = to_json(manifest_).dump(2) + "\n";
    write_file(dest_ / kManifestName, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    s.bytes += text.size();
    return s;
}

Summary write_dataset(const std::vector<TrajectoryRecord>& records, const Manifest& manifest,
                      const fs::path& destination) {
    if (records.size() != manifest.run.n_trajectories) {
        throw IoError("manifest declares " + std::to_string(manifest.run.n_trajectories) + " trajectories, got " +
                      std::to_string(records.size()));
    }
    Writer w(destination, manifest);
    for (const auto& r : records) w.add(r);
    return w.finish();
}

Manifest read_manifest(const fs::path& source) {
    const auto bytes = read_file(source / kManifestName);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw FormatError("manifest: " + std::string(e.what()));
    }
    Manifest m = manifest_from_json(j);
    const auto expected = expected_arrays(m);
    if (m.files.size() != expected.size() * m.run.n_trajectories) {
        throw FormatError("manifest: file inventory has " + std::to_string(m.files.size()) + " entries, expected " +
                          std::to_string(expected.size() * m.run.n_trajectories));
    }
    for (std::size_t i = 0; i < m.files.size(); ++i) {
        const auto& f = m.files[i];
        const auto& want = expected[i % expected.size()];
        if (f.trajectory_index != i / expected.size() || f.array != want.name || f.dtype != want.dtype ||
            f.shape != want.shape) {
            throw FormatError("manifest: inventory entry " + f.path + " does not match the configuration");
        }
    }
    return m;
}

TrajectoryRecord read_trajectory(const fs::path& source, const Manifest& m, std::uint64_t index) {
    if (index >= m.run.n_trajectories) {
        throw IoError("trajectory " + std::to_string(index) + " not in dataset (" +
                      std::to_string(m.run.n_trajectories) + " trajectories)");
    }
    const std::size_t per = expected_arrays(m).size();
    TrajectoryRecord r;
    r.trajectory_index = index;
    r.seed = SeedSpec{m.run.master_seed, index};
    for (std::size_t a = 0; a < per; ++a) {
        const FileEntry& f = m.files[index * per + a];
        const auto bytes = read_file(source / f.path);
        if (bytes.size() != f.bytes) {
            throw FormatError(f.path + ": " + std::to_string(bytes.size()) + " bytes, manifest declares " +
                              std::to_string(f.bytes) + (bytes.size() < f.bytes ? " (truncated)" : ""));
        }
        const auto crc = crc32(bytes);
        if (crc != f.crc32) {
            std::ostringstream os;
            os << f.path << ": CRC-32 " << std::hex << crc << " does not match manifest " << f.crc32;
            throw ChecksumError(os.str());
        }
        Tensor t = decode_tensor(bytes, f.path);
        if (t.dtype != f.dtype || t.shape != f.shape) {
            throw FormatError(f.path + ": header " + to_string(t.dtype) + shape_string(t.shape) +
                              " disagrees with manifest " + to_string(f.dtype) + shape_string(f.shape));
        }
        r.arrays.emplace_back(f.array, std::move(t));
    }
    return r;
}

Dataset read_dataset(const fs::path& source) {
    Dataset d;
    d.manifest = read_manifest(source);
    for (std::uint64_t i = 0; i < d.manifest.run.n_trajectories; ++i) {
        d.records.push_back(read_trajectory(source, d.manifest, i));
    }
    return d;
}

}  // namespace wickpde::dataset
