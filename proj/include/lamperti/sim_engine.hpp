#pragma once

// Reproducible excursion and trajectory sampling.
//
// Excursion i always draws from derive_stream(master_seed, i), so a batch is
// identical for any worker count. A trajectory is a single stream; replica r
// of a batch of trajectories runs with master seed replica_seed(master, r).

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lamperti/chain_models.hpp"
#include "lamperti/functionals.hpp"
#include "lamperti/random.hpp"

namespace lamperti::sim {

struct SimConfig {
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    /// Longest excursion simulated in full; nullopt means uncapped.
    std::optional<std::int64_t> excursion_cap = 1'000'000;
    std::int64_t horizon = std::int64_t{1} << 20;
    std::vector<std::int64_t> grid;
    std::vector<double> alphas;
    std::vector<double> tracked_sites;
};

/// {2^k : k_min <= k <= k_max}.
std::vector<std::int64_t> dyadic_grid(int k_min, int k_max);

void validate(const SimConfig& cfg);

namespace detail {

struct HalfLineWalker {
    double delta;
    std::int64_t x = 0;

    template <UniformSource S>
    void advance(S& s) { x = kernel::half_line_next(delta, x, s.uniform()); }
    double value() const { return static_cast<double>(x); }
    bool at_origin() const { return x == 0; }
};

struct TwoSidedWalker {
    TwoSided spec;
    std::int64_t x = 0;

    template <UniformSource S>
    void advance(S& s) { x = kernel::two_sided_next(spec, x, s.uniform()); }
    double value() const { return static_cast<double>(x); }
    bool at_origin() const { return x == 0; }
};

struct CentralBiasWalker {
    CentralBias spec;
    LatticePoint point;
    std::int64_t norm2 = 0;

    explicit CentralBiasWalker(const CentralBias& s) : spec(s), point(LatticePoint::Zero(s.dimension)) {}

    template <UniformSource S>
    void advance(S& s) {
        const int axis = kernel::central_bias_axis(spec, s.uniform());
        const double beta = kernel::central_bias_beta(spec, point(axis), norm2);
        const auto dir = kernel::central_bias_direction(beta, s.uniform());
        norm2 += 2 * dir * point(axis) + 1;
        point(axis) += dir;
    }
    double value() const { return std::sqrt(static_cast<double>(norm2)); }
    bool at_origin() const { return norm2 == 0; }
};

struct UrnWalker {
    const KappaTable* kappa;
    std::int64_t z = 1;

    template <UniformSource S>
    void advance(S& s) { z = urn::traverse_quadrant(*kappa, z, s).z_next; }
    double value() const { return std::sqrt(static_cast<double>(z - 1)); }
    bool at_origin() const { return z == 1; }
};

/// Calls fn(walker) with a walker for `spec` placed at its origin.
template <class Fn>
decltype(auto) with_walker(const ChainSpec& spec, Fn&& fn) {
    return std::visit(
        [&](const auto& family) -> decltype(auto) {
            using F = std::decay_t<decltype(family)>;
            if constexpr (std::is_same_v<F, HalfLineDelta>) {
                return fn(HalfLineWalker{family.delta});
            } else if constexpr (std::is_same_v<F, TwoSided>) {
                return fn(TwoSidedWalker{family});
            } else if constexpr (std::is_same_v<F, CentralBias>) {
                return fn(CentralBiasWalker{family});
            } else {
                return fn(UrnWalker{&family.kappa});
            }
        },
        spec);
}

inline void count_site(std::vector<std::int64_t>& counts, const std::vector<double>& sites, double x) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
        if (sites[j] == x) ++counts[j];
    }
}

template <class W, UniformSource S>
ExcursionRecord run_excursion(W walker, S& stream, const SimConfig& cfg) {
    const auto cap = cfg.excursion_cap.value_or(std::numeric_limits<std::int64_t>::max());
    ExcursionRecord rec;
    rec.eta = 1;
    rec.max = walker.value();
    rec.xi.resize(cfg.alphas.size());
    for (std::size_t j = 0; j < cfg.alphas.size(); ++j) rec.xi[j] = alpha_power(rec.max, cfg.alphas[j]);
    rec.occupation.assign(cfg.tracked_sites.size(), 0);
    count_site(rec.occupation, cfg.tracked_sites, walker.value());
    for (;;) {
        walker.advance(stream);
        if (walker.at_origin()) return rec;
        if (rec.eta == cap) {
            rec.censored = true;
            return rec;
        }
        ++rec.eta;
        const double x = walker.value();
        rec.max = std::max(rec.max, x);
        for (std::size_t j = 0; j < cfg.alphas.size(); ++j) rec.xi[j] += alpha_power(x, cfg.alphas[j]);
        if (!cfg.tracked_sites.empty()) count_site(rec.occupation, cfg.tracked_sites, x);
    }
}

template <class W, UniformSource S>
PathSeries run_path(W walker, S& stream, const SimConfig& cfg) {
    PathSeries series;
    series.alphas = cfg.alphas;
    series.sites = cfg.tracked_sites;
    series.points.reserve(cfg.grid.size());

    std::int64_t returns = 0;
    double x = walker.value();
    double running_max = x, running_min = x, total = x;
    std::vector<double> sums(cfg.alphas.size());
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] = alpha_power(x, cfg.alphas[j]);
    std::vector<std::int64_t> occupation(cfg.tracked_sites.size(), 0);
    count_site(occupation, cfg.tracked_sites, x);

    std::size_t next = 0;
    auto record = [&](std::int64_t t) {
        while (next < cfg.grid.size() && cfg.grid[next] == t) {
            series.points.push_back({t, returns, running_max, running_min, sums, total / static_cast<double>(t),
                                     occupation});
            ++next;
        }
    };
    record(1);
    for (std::int64_t t = 2; t <= cfg.horizon && next < cfg.grid.size(); ++t) {
        walker.advance(stream);
        x = walker.value();
        if (walker.at_origin()) ++returns;
        running_max = std::max(running_max, x);
        running_min = std::min(running_min, x);
        total += x;
        for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += alpha_power(x, cfg.alphas[j]);
        if (!occupation.empty()) count_site(occupation, cfg.tracked_sites, x);
        record(t);
    }
    return series;
}

} // namespace detail

/// One excursion from the origin drawn from `stream`.
template <UniformSource S>
ExcursionRecord sample_excursion(const ChainSpec& spec, const SimConfig& cfg, S& stream) {
    return detail::with_walker(spec, [&](auto walker) { return detail::run_excursion(walker, stream, cfg); });
}

/// n excursions; record i comes from derive_stream(cfg.master_seed, i).
/// Transient specs require a finite cap.
std::vector<ExcursionRecord> sample_excursions(const ChainSpec& spec, std::size_t n, const SimConfig& cfg);

/// One trajectory X_1 = 0, X_2, ..., X_horizon with functionals recorded at
/// cfg.grid, in one pass and constant memory.
template <UniformSource S>
PathSeries run_trajectory(const ChainSpec& spec, const SimConfig& cfg, S& stream) {
    validate(spec);
    validate(cfg);
    return detail::with_walker(spec, [&](auto walker) { return detail::run_path(walker, stream, cfg); });
}

/// Trajectory from stream 0 of cfg.master_seed.
PathSeries run_trajectory(const ChainSpec& spec, const SimConfig& cfg);

/// Independent replicas; replica r uses master seed replica_seed(cfg.master_seed, r).
std::vector<PathSeries> run_replicas(const ChainSpec& spec, const SimConfig& cfg, std::size_t replicas);

/// Explicit path X_1..X_length built with chain_models::step, for cross-checks
/// against the streaming walkers (consumes variates in the same order).
template <UniformSource S>
std::vector<double> explicit_path(const ChainSpec& spec, std::int64_t length, S& stream) {
    std::vector<double> path;
    path.reserve(static_cast<std::size_t>(length));
    ChainState state = origin(spec);
    path.push_back(observe(spec, state));
    for (std::int64_t t = 2; t <= length; ++t) {
        state = step(spec, state, stream);
        path.push_back(observe(spec, state));
    }
    return path;
}

} // namespace lamperti::sim
