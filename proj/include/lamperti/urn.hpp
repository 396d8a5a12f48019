#pragma once

// Noisy simple harmonic urn (A_t, B_t) on Z^2 \ {(0,0)}, its axis-visit
// times, the embedded axis-distance chain Z and the time tau to reach
// |A| + |B| = 1.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

#include "lamperti/kappa.hpp"
#include "lamperti/random.hpp"

namespace lamperti::urn {

struct UrnState {
    std::int64_t a = 1;
    std::int64_t b = 0;
    std::int64_t t = 1;

    bool on_axis() const { return a == 0 || b == 0; }
    std::int64_t l1() const { return std::llabs(a) + std::llabs(b); }
};

struct UrnRun {
    std::vector<std::int64_t> nu;   ///< axis-visit times nu_1 < nu_2 < ...
    std::vector<std::int64_t> z;    ///< z[n-1] = |A| + |B| at nu_n
    std::optional<std::int64_t> tau_q; ///< 1-based index into nu/z
    std::optional<std::int64_t> tau;
    std::int64_t steps = 0;         ///< last time index reached

    bool censored() const { return !tau.has_value(); }
};

namespace detail {
inline std::int64_t sgn(std::int64_t v) { return v > 0 ? 1 : -1; }
} // namespace detail

/// One transition. Off-axis: unit step, increasing |B| (resp. moving A
/// toward 0) with probability |a|/(|a|+|b|) (resp. |b|/(|a|+|b|)).
/// On-axis: leave the axis anti-clockwise with a kappa jump truncated at 1.
/// Consumes exactly one variate.
template <UniformSource S>
UrnState urn_step(UrnState s, const KappaTable& kappa, S& rand) {
    const double u = rand.uniform();
    if (s.a != 0 && s.b != 0) {
        const auto abs_a = std::llabs(s.a);
        const auto abs_b = std::llabs(s.b);
        if (u * static_cast<double>(abs_a + abs_b) < static_cast<double>(abs_a)) {
            s.b += detail::sgn(s.a);
        } else {
            s.a -= detail::sgn(s.b);
        }
    } else if (s.b == 0) {
        const auto k = sample_kappa(kappa, u);
        const auto sa = detail::sgn(s.a);
        s.a = sa * std::max<std::int64_t>(1, std::llabs(s.a) - k);
        s.b = sa;
    } else {
        const auto k = sample_kappa(kappa, u);
        const auto sb = detail::sgn(s.b);
        s.a = -sb;
        s.b = sb * std::max<std::int64_t>(1, std::llabs(s.b) - k);
    }
    ++s.t;
    return s;
}

struct Traversal {
    std::int64_t z_next;
    std::int64_t steps;
};

/// Single quadrant traversal: start on the axis at (z, 0) and run to the next
/// axis visit. This is one step of the embedded chain Z.
template <UniformSource S>
Traversal traverse_quadrant(const KappaTable& kappa, std::int64_t z, S& rand) {
    UrnState s{z, 0, 0};
    do {
        s = urn_step(s, kappa, rand);
    } while (!s.on_axis());
    return {s.l1(), s.t};
}

/// Runs from (A_1, B_1) = (1, 0) until tau or `horizon`, whichever is first.
/// nu_1 = 1 and Z_1 = 1 are recorded; tau_q is the first index n > 1 with
/// Z_n = 1, and tau is found independently from the raw state.
/// If `path` is non-null every visited state is appended to it.
template <UniformSource S>
UrnRun run_urn(const KappaTable& kappa, std::int64_t horizon, S& rand, bool stop_at_tau = true,
               std::vector<UrnState>* path = nullptr) {
    UrnRun run;
    UrnState s{};
    run.nu.push_back(s.t);
    run.z.push_back(s.l1());
    if (path) path->push_back(s);
    while (s.t < horizon) {
        s = urn_step(s, kappa, rand);
        if (path) path->push_back(s);
        if (!run.tau && s.l1() == 1) run.tau = s.t;
        if (s.on_axis()) {
            run.nu.push_back(s.t);
            run.z.push_back(s.l1());
            if (!run.tau_q && s.l1() == 1) run.tau_q = static_cast<std::int64_t>(run.z.size());
        }
        if (stop_at_tau && run.tau) break;
    }
    run.steps = s.t;
    return run;
}

struct EmbeddedMoments {
    double mean;
    double mean_stderr;
    double second_moment;
    double second_moment_stderr;
    std::size_t samples;
};

/// Monte Carlo E[D | Z = x] and E[D^2 | Z = x] from independent traversals;
/// traversal i draws from derive_stream(seed, i).
EmbeddedMoments embedded_moment_check(const KappaTable& kappa, std::int64_t x, std::size_t n_samples,
                                      std::uint64_t seed);

/// Moment threshold for tau: E[tau^p] < infinity iff p < (3 E[kappa] - 1) / 2.
inline double tau_threshold(double expected_kappa) { return (3.0 * expected_kappa - 1.0) / 2.0; }

/// Re-derives (nu, Z) from a stored raw path, independently of run_urn.
void axis_visits_from_path(const std::vector<UrnState>& path, std::vector<std::int64_t>& nu,
                           std::vector<std::int64_t>& z);

} // namespace lamperti::urn
