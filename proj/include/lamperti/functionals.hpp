#pragma once

// Per-excursion and per-path functionals shared by the streaming engine and
// the reference decomposition.

#include <cmath>
#include <cstdint>
#include <vector>

namespace lamperti {

/// |x|^alpha with 0^0 = 1, so that xi^(0) counts every time step.
inline double alpha_power(double x, double alpha) {
    const double ax = std::abs(x);
    if (alpha == 0.0) return 1.0;
    if (alpha == 1.0) return ax;
    if (alpha == 2.0) return ax * ax;
    return std::pow(ax, alpha);
}

/// One excursion E_n = (X_t) for tau_{n-1} <= t < tau_n.
struct ExcursionRecord {
    std::int64_t eta = 0;                  ///< duration, counting the initial 0
    double max = 0.0;                      ///< M_n
    std::vector<double> xi;                ///< xi^(alpha) per configured alpha
    std::vector<std::int64_t> occupation;  ///< ell_n(x) per tracked site
    bool censored = false;                 ///< cut at the cap: eta == cap < true duration

    bool operator==(const ExcursionRecord&) const = default;
};

/// Path functionals at one grid time t.
struct SeriesPoint {
    std::int64_t t = 0;
    std::int64_t excursions = 0;            ///< N_t: returns tau_n <= t, n >= 1
    double running_max = 0.0;
    double running_min = 0.0;               ///< only informative for two-sided chains
    std::vector<double> s_alpha;            ///< S^(alpha)_t = sum |X_s|^alpha
    double g = 0.0;                         ///< G_t = t^{-1} sum X_s (signed)
    std::vector<std::int64_t> occupation;   ///< L_t(x) per tracked site

    bool operator==(const SeriesPoint&) const = default;
};

struct PathSeries {
    std::vector<double> alphas;
    std::vector<double> sites;
    std::vector<SeriesPoint> points;

    bool operator==(const PathSeries&) const = default;
};

} // namespace lamperti
