#include "wickpde/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wickpde/error.hpp"

namespace wickpde {

unsigned default_thread_count() {
    if (const char* env = std::getenv("WICKPDE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::optional<phi43::Counterterms> run_counterterms(const RunSpec& spec) {
    if (spec.equation != Equation::phi43) return std::nullopt;
    return phi43::compute_counterterms(spec.phi43);
}

namespace {

dataset::TrajectoryRecord one(const RunSpec& spec, const phi42::Plan* plan, std::uint64_t index,
                              const std::optional<phi43::Counterterms>& ct) {
    const SeedSpec seed{spec.master_seed, index};
    if (spec.equation == Equation::phi42) {
        const auto& c = spec.phi42;
        if (spec.store_noise) {
            const auto np = c.noise_params();
            const auto path = sample_noise_path(seed, np.grid, np.n_steps, np.dt, np.kind, np.cutoff, np.sigma);
            return dataset::make_record(phi42::run(*plan, seed, path), spec.field_dtype, &path);
        }
        return dataset::make_record(phi42::run(*plan, seed, NoiseSource(seed, c.noise_params())), spec.field_dtype);
    }
    const auto& c = spec.phi43;
    if (spec.store_noise) {
        const auto np = c.noise_params();
        const auto path = sample_noise_path(seed, np.grid, np.n_steps, np.dt, np.kind, np.cutoff, np.sigma);
        return dataset::make_record(phi43::run(c, *ct, seed, path), spec.field_dtype, &path);
    }
    return dataset::make_record(phi43::run(c, *ct, seed), spec.field_dtype);
}

}  // namespace

dataset::TrajectoryRecord simulate_trajectory(const RunSpec& spec, std::uint64_t trajectory_index,
                                              const std::optional<phi43::Counterterms>& ct) {
    spec.validate();
    if (spec.equation == Equation::phi42) {
        const phi42::Plan plan(spec.phi42);
        return one(spec, &plan, trajectory_index, ct);
    }
    if (!ct) throw ConfigError("phi43 trajectory requires counterterms");
    return one(spec, nullptr, trajectory_index, ct);
}

SimulateResult simulate(const RunSpec& spec, const std::filesystem::path& destination,
                        const SimulateOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    spec.validate();
    SimulateResult result;
    result.counterterms = run_counterterms(spec);
    std::optional<phi42::Plan> plan;
    if (spec.equation == Equation::phi42) plan.emplace(spec.phi42);

    dataset::Writer writer(destination, dataset::make_manifest(spec, result.counterterms));
    const std::uint64_t total = spec.n_trajectories;
    unsigned threads = options.threads ? options.threads : default_thread_count();
    if (total < threads) threads = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
    result.threads = threads;
    if (options.on_start) options.on_start(result.counterterms, threads);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mutex;
    std::uint64_t done = 0;
    std::uint64_t failed_index = std::numeric_limits<std::uint64_t>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                writer.add(one(spec, plan ? &*plan : nullptr, i, result.counterterms));
            } catch (const BlowUpError& e) {
                std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::make_exception_ptr(BlowUpError("trajectory " + std::to_string(i), e.step()));
                }
                stop = true;
                return;
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
                stop = true;
                return;
            }
            std::lock_guard lock(mutex);
            ++done;
            if (options.progress) options.progress(done, total);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.summary = writer.finish();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace wickpde
