#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "wickpde/config.hpp"
#include "wickpde/dataset.hpp"

namespace wickpde {

/// WICKPDE_THREADS if set to a positive integer, else the hardware concurrency.
unsigned default_thread_count();

struct SimulateOptions {
    /// Worker cap; 0 means default_thread_count().
    unsigned threads = 0;
    /// Called after each finished trajectory (from a worker thread, serialized).
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
    /// Called once before any trajectory starts, with the counterterms (phi43)
    /// and the resolved worker count.
    std::function<void(const std::optional<phi43::Counterterms>&, unsigned threads)> on_start;
};

struct SimulateResult {
    dataset::Summary summary;
    std::optional<phi43::Counterterms> counterterms;
    unsigned threads = 1;
    double seconds = 0.0;
};

/// Computes counterterms for phi43 runs; nullopt for phi42.
std::optional<phi43::Counterterms> run_counterterms(const RunSpec& spec);

/// Simulates trajectories [0, n_trajectories) in parallel and writes the
/// dataset. Output bytes do not depend on the thread count. On a blow-up the
/// lowest failing trajectory is reported as BlowUpError and no manifest is
/// written.
SimulateResult simulate(const RunSpec& spec, const std::filesystem::path& destination,
                        const SimulateOptions& options = {});

/// The record of one trajectory, exactly as simulate() would store it.
dataset::TrajectoryRecord simulate_trajectory(const RunSpec& spec, std::uint64_t trajectory_index,
                                              const std::optional<phi43::Counterterms>& ct);

}  // namespace wickpde
