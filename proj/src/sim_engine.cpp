#include "lamperti/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

namespace lamperti::sim {

std::vector<std::int64_t> dyadic_grid(int k_min, int k_max) {
    if (k_min < 0 || k_max < k_min || k_max > 62) throw ValidationError("dyadic grid requires 0 <= k_min <= k_max <= 62");
    std::vector<std::int64_t> grid;
    for (int k = k_min; k <= k_max; ++k) grid.push_back(std::int64_t{1} << k);
    return grid;
}

void validate(const SimConfig& cfg) {
    if (cfg.workers < 1) throw ValidationError("sim.workers must be positive");
    if (cfg.horizon < 1) throw ValidationError("sim.horizon must be positive");
    if (cfg.excursion_cap && *cfg.excursion_cap < 2) throw ValidationError("sim.excursion_cap must be >= 2");
    if (!std::is_sorted(cfg.grid.begin(), cfg.grid.end())) throw ValidationError("sim.grid must be ascending");
    if (!cfg.grid.empty() && cfg.grid.front() < 1) throw ValidationError("sim.grid times must be >= 1");
    if (!cfg.grid.empty() && cfg.grid.back() > cfg.horizon) {
        throw ValidationError("sim.horizon must be >= the largest grid time");
    }
    if (!std::is_sorted(cfg.alphas.begin(), cfg.alphas.end())) throw ValidationError("sim.alphas must be ascending");
    if (!cfg.alphas.empty() && cfg.alphas.front() < 0.0) throw ValidationError("sim.alphas must be nonnegative");
}

std::vector<ExcursionRecord> sample_excursions(const ChainSpec& spec, std::size_t n, const SimConfig& cfg) {
    validate(cfg);
    const auto params = lamperti_params(spec);
    if (params.cls == RecurrenceClass::Transient && !cfg.excursion_cap) {
        throw ValidationError("sample_excursions: chain is transient (r = " + std::to_string(params.r) +
                              " < -1); excursions may never end, so an excursion cap is required");
    }

    std::vector<ExcursionRecord> records(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        constexpr std::size_t kChunk = 256;
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) {
                auto stream = derive_stream(cfg.master_seed, i);
                records[i] = sample_excursion(spec, cfg, stream);
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(n / 256 + 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return records;
}

PathSeries run_trajectory(const ChainSpec& spec, const SimConfig& cfg) {
    auto stream = derive_stream(cfg.master_seed, 0);
    return run_trajectory(spec, cfg, stream);
}

std::vector<PathSeries> run_replicas(const ChainSpec& spec, const SimConfig& cfg, std::size_t replicas) {
    std::vector<PathSeries> out(replicas);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) {
            SimConfig local = cfg;
            local.master_seed = replica_seed(cfg.master_seed, r);
            out[r] = run_trajectory(spec, local);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(replicas)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

} // namespace lamperti::sim
