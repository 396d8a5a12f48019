#pragma once

// Tail-exponent and growth-exponent estimation from simulated samples.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lamperti/functionals.hpp"

namespace lamperti::est {

struct Observation {
    double value;
    bool censored;   ///< value is a lower bound for the true value
};

/// How censored observations limit the usable thresholds.
enum class ValueKind {
    /// Censoring happens exactly at value > cap: thresholds up to the smallest
    /// censored value are exact.
    Duration,
    /// Max- or sum-type values of capped excursions: threshold x is valid only
    /// if the censored fraction among records with value < x is below 1e-3.
    Extremal,
};

inline constexpr double kExtremalCensoredFraction = 1e-3;

struct SurvivalPoint {
    double threshold;
    double probability;   ///< P[Z >= threshold]
    double std_error;
    std::size_t exceedances;
};

struct RejectedThreshold {
    double threshold;
    std::string reason;
};

struct SurvivalCurve {
    std::vector<SurvivalPoint> points;
    std::vector<RejectedThreshold> rejected;
    std::size_t sample_size = 0;
};

SurvivalCurve empirical_survival(std::span<const Observation> values, std::span<const double> thresholds,
                                 ValueKind kind = ValueKind::Duration);

enum class TailMethod { RankRegression, Hill };

std::string_view to_string(TailMethod m);

struct TailFit {
    double exponent;        ///< theta in P[Z >= x] ~ x^-theta
    double x_lo;
    double x_hi;
    double std_error;
    std::size_t n_effective;
    TailMethod method;
};

/// Least-squares slope of log survival against log threshold over
/// [x_lo, x_hi], negated. Points with zero probability are dropped; at least 4
/// must remain.
TailFit fit_tail(const SurvivalCurve& curve, double x_lo, double x_hi);

/// Hill estimator on the top k order statistics of positive values.
TailFit hill(std::span<const double> values, std::size_t k);

/// Empirical quantile (type-7 interpolation) of `values`; q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Geometrically spaced distinct integer thresholds covering [lo, hi].
std::vector<double> log_spaced_thresholds(double lo, double hi, std::size_t count);

/// Default window: 90th to 99.9th percentile of the uncensored values.
struct Window {
    double lo;
    double hi;
};

Window default_tail_window(std::span<const Observation> values, double lo_quantile = 0.90,
                           double hi_quantile = 0.999);

// ---------------------------------------------------------------------------
// Growth exponents from trajectories
// ---------------------------------------------------------------------------

struct Functional {
    enum class Kind { Count, RunningMax, RunningMinAbs, PathIntegral, CentreOfMass, Occupation };
    Kind kind;
    std::size_t index = 0;   ///< alpha index for PathIntegral, site index for Occupation

    static Functional count() { return {Kind::Count}; }
    static Functional running_max() { return {Kind::RunningMax}; }
    static Functional running_min_abs() { return {Kind::RunningMinAbs}; }
    static Functional path_integral(std::size_t alpha_index) { return {Kind::PathIntegral, alpha_index}; }
    static Functional centre_of_mass() { return {Kind::CentreOfMass}; }
    static Functional occupation(std::size_t site_index) { return {Kind::Occupation, site_index}; }
};

std::string describe(const Functional& f, const PathSeries& layout);

double evaluate(const SeriesPoint& p, const Functional& f);

struct ScalingFit {
    double slope;
    double intercept;
    std::int64_t t_lo;
    std::int64_t t_hi;
    double residual_max;
    std::size_t replicas;
    std::size_t points;
};

/// Median across replicas at each grid time in [t_lo, t_hi], then the
/// least-squares slope of log median against log t. Needs >= 3 replicas with
/// the same grid and >= 3 grid points in the window.
ScalingFit fit_scaling(std::span<const PathSeries> replicas, const Functional& f, std::int64_t t_lo,
                       std::int64_t t_hi);

/// Window covering the last `points` grid times.
std::pair<std::int64_t, std::int64_t> top_grid_window(const PathSeries& series, std::size_t points = 6);

/// Median of `f` across replicas at grid index `i`.
double replica_median(std::span<const PathSeries> replicas, const Functional& f, std::size_t i);

} // namespace lamperti::est
