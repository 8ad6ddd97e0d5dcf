// wickpde command-line tool.
//
// Exit codes: 0 ok, 1 verification failure, 2 bad arguments or config,
// 3 trajectory blow-up, 4 I/O or dataset integrity error.
// stdout carries key=value summaries; diagnostics go to stderr.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wickpde/config.hpp"
#include "wickpde/dataset.hpp"
#include "wickpde/error.hpp"
#include "wickpde/kernels.hpp"
#include "wickpde/simulate.hpp"
#include "wickpde/verify.hpp"

namespace fs = std::filesystem;
using namespace wickpde;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kBlowUp = 3, kIo = 4 };

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_counterterms(const phi43::Counterterms& ct) {
    std::cout << "c0=" << g17(ct.c0) << "\n"
              << "c11=" << g17(ct.c11) << "\n"
              << "c12=" << g17(ct.c12) << "\n"
              << "mass=" << g17(ct.mass()) << "\n";
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::uint64_t> n_trajectories;
    std::string out;
    unsigned threads = 0;
    bool quiet = false;
};

int run_simulate(Equation eq, const SimulateArgs& a) {
    RunSpec spec = load_run_spec(a.config);
    if (spec.equation != eq) {
        throw ConfigError("config is for " + to_string(spec.equation) + ", not " + to_string(eq));
    }
    if (a.master_seed) spec.master_seed = *a.master_seed;
    if (a.n_trajectories) spec.n_trajectories = *a.n_trajectories;

    SimulateOptions opt;
    opt.threads = a.threads;
    opt.on_start = [&](const std::optional<phi43::Counterterms>& ct, unsigned threads) {
        std::cout << "equation=" << to_string(spec.equation) << "\n"
                  << "master_seed=" << spec.master_seed << "\n"
                  << "n_trajectories=" << spec.n_trajectories << "\n"
                  << "threads=" << threads << "\n"
                  << "kernels=" << kernels::active().name << "\n";
        if (ct) print_counterterms(*ct);
        std::cout.flush();
    };
    const std::uint64_t stride = std::max<std::uint64_t>(1, spec.n_trajectories / 20);
    if (!a.quiet) {
        opt.progress = [stride](std::uint64_t done, std::uint64_t total) {
            if (done % stride == 0 || done == total) std::cerr << "progress " << done << "/" << total << "\n";
        };
    }
    const auto r = simulate(spec, a.out, opt);
    std::cout << "out=" << a.out << "\n"
              << "files=" << r.summary.n_files << "\n"
              << "bytes=" << r.summary.bytes << "\n"
              << "seconds=" << r.seconds << "\n"
              << "trajectories_per_second=" << (r.seconds > 0 ? r.summary.n_trajectories / r.seconds : 0.0) << "\n";
    return kOk;
}

int run_verify(const std::vector<std::string>& suites, const std::string& config, bool keep_going) {
    if (!config.empty()) {
        const RunSpec spec = load_run_spec(config);
        if (spec.equation != Equation::phi43) throw ConfigError("--config: counterterms need a phi43 config");
        print_counterterms(*run_counterterms(spec));
    }
    bool all = true;
    for (const auto& s : suites) {
        const auto checks = verify::run_suite(s, !keep_going);
        for (const auto& c : checks) {
            std::fprintf(stderr, "%-4s %-6s %-45s %7.2fs  %s\n", c.pass ? "PASS" : "FAIL", s.c_str(), c.name.c_str(),
                         c.seconds, c.detail.c_str());
            all = all && c.pass;
        }
        std::size_t passed = 0;
        for (const auto& c : checks) passed += c.pass;
        std::cout << "suite=" << s << "\n"
                  << "checks=" << checks.size() << "\n"
                  << "passed=" << passed << "\n";
        if (!all && !keep_going) {
            for (const auto& c : checks) {
                if (!c.pass) std::cerr << "first failure: " << c.name << ": " << c.detail << "\n";
            }
            break;
        }
    }
    std::cout << "result=" << (all ? "pass" : "fail") << "\n";
    return all ? kOk : kFailed;
}

struct ExportArgs {
    std::string dataset;
    std::uint64_t trajectory = 0;
    std::string times = "all";
    std::string format = "csv";
    std::string field;
    int z = -1;
    std::string out;
};

std::vector<double> parse_times(const std::string& s, const std::vector<double>& available) {
    if (s == "all") return available;
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("--times: cannot parse '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int run_export(const ExportArgs& a) {
    const auto manifest = dataset::read_manifest(a.dataset);
    if (a.trajectory >= manifest.run.n_trajectories) {
        throw ConfigError("trajectory " + std::to_string(a.trajectory) + " not in dataset (" +
                          std::to_string(manifest.run.n_trajectories) + " trajectories)");
    }
    const bool is42 = manifest.run.equation == Equation::phi42;
    const std::string field = a.field.empty() ? (is42 ? "u" : "phi") : a.field;
    if (is42 ? (field != "u" && field != "v" && field != "X") : field != "phi") {
        throw ConfigError("--field '" + field + "' is not stored for " + to_string(manifest.run.equation));
    }
    if (a.format != "csv" && a.format != "pgm") throw ConfigError("--format must be csv or pgm");
    const auto record = dataset::read_trajectory(a.dataset, manifest, a.trajectory);
    const auto& tensor = record.at(field);
    const GridSpec& g = manifest.run.grid();
    const std::size_t n = static_cast<std::size_t>(g.n());
    const int z = a.z < 0 ? 0 : a.z;
    if (g.dim() == 3 && z >= g.n()) throw ConfigError("--z outside the grid");
    const double span_t = manifest.times.back();

    fs::create_directories(a.out);
    for (double t : parse_times(a.times, manifest.times)) {
        std::size_t s = manifest.times.size();
        for (std::size_t i = 0; i < manifest.times.size(); ++i) {
            if (std::abs(manifest.times[i] - t) <= 1e-9 * std::max(1.0, span_t)) s = i;
        }
        if (s == manifest.times.size()) throw ConfigError("no snapshot at t=" + g17(t));

        std::vector<double> slice(n * n);
        const std::size_t base = s * g.total();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                slice[i * n + j] = g.dim() == 2 ? tensor.data[base + i * n + j]
                                                : tensor.data[base + (i * n + j) * n + static_cast<std::size_t>(z)];
            }
        }
        const auto [lo, hi] = std::minmax_element(slice.begin(), slice.end());
        char stem[128];
        std::snprintf(stem, sizeof stem, "traj%06llu_%s_s%02zu", static_cast<unsigned long long>(a.trajectory),
                      field.c_str(), s);
        const fs::path img = fs::path(a.out) / (std::string(stem) + "." + a.format);
        std::ofstream os(img, std::ios::binary);
        if (a.format == "csv") {
            const char* spec = tensor.dtype == DType::f32 ? "%.9g" : "%.17g";
            char buf[40];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::snprintf(buf, sizeof buf, spec, slice[i * n + j]);
                    os << (j ? "," : "") << buf;
                }
                os << "\n";
            }
        } else {
            os << "P5\n" << n << " " << n << "\n255\n";
            const double range = *hi - *lo;
            for (double v : slice) {
                const int level = range > 0 ? static_cast<int>(std::lround(255.0 * (v - *lo) / range)) : 128;
                os.put(static_cast<char>(level));
            }
        }
        if (!os) throw IoError("cannot write " + img.string());
        nlohmann::json side{{"file", img.filename().string()},
                            {"field", field},
                            {"trajectory_index", a.trajectory},
                            {"time", manifest.times[s]},
                            {"shape", {n, n}},
                            {"min", *lo},
                            {"max", *hi}};
        if (g.dim() == 3) side["z_index"] = z;
        std::ofstream(fs::path(a.out) / (std::string(stem) + ".json")) << side.dump(2) << "\n";
        std::cout << "wrote=" << img.string() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renormalized Phi^4 trajectories and Wick chaos features"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto add_sim = [&](const char* name, const char* what) {
        auto* c = app.add_subcommand(name, what);
        c->add_option("config", sim.config, "JSON config or dataset manifest")->required()->check(CLI::ExistingFile);
        c->add_option("--master-seed", sim.master_seed, "override the config's master seed");
        c->add_option("--n-trajectories", sim.n_trajectories, "override the config's trajectory count");
        c->add_option("--out", sim.out, "destination directory")->required();
        c->add_option("--threads", sim.threads, "worker cap (default: WICKPDE_THREADS or all cores)");
        c->add_flag("--quiet", sim.quiet, "no progress on stderr");
        return c;
    };
    auto* s42 = add_sim("simulate-phi42", "simulate the renormalized 2-d model");
    auto* s43 = add_sim("simulate-phi43", "simulate the renormalized 3-d model");

    std::vector<std::string> suites;
    std::string verify_config;
    bool keep_going = false;
    auto* ver = app.add_subcommand("verify", "run an oracle suite; with --config print phi43 counterterms");
    ver->add_option("--suite", suites, "chaos, phi42, phi43, io (repeatable)")
        ->check(CLI::IsMember(verify::suite_names()));
    ver->add_option("--config", verify_config, "phi43 config whose counterterms to print")
        ->check(CLI::ExistingFile);
    ver->add_flag("--keep-going", keep_going, "run every check even after a failure");

    ExportArgs ex;
    auto* exp = app.add_subcommand("export-snapshots", "write 2-d slices of stored snapshots");
    exp->add_option("dataset", ex.dataset, "dataset directory")->required();
    exp->add_option("--trajectory", ex.trajectory, "trajectory index");
    exp->add_option("--times", ex.times, "comma-separated saved times, or 'all'");
    exp->add_option("--format", ex.format, "csv or pgm")->check(CLI::IsMember({"csv", "pgm"}));
    exp->add_option("--field", ex.field, "u, v, X (phi42) or phi (phi43)");
    exp->add_option("--z", ex.z, "z index of the slice for 3-d fields (default 0)");
    exp->add_option("--out", ex.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*s42) return run_simulate(Equation::phi42, sim);
        if (*s43) return run_simulate(Equation::phi43, sim);
        if (*ver) {
            if (suites.empty() && verify_config.empty()) throw ConfigError("verify: give --suite and/or --config");
            return run_verify(suites, verify_config, keep_going);
        }
        if (*exp) return run_export(ex);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kBlowUp;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
