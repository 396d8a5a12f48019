#include "lamperti/estimators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lamperti/errors.hpp"

namespace lamperti::est {

namespace {

struct LineFit {
    double slope;
    double intercept;
    double slope_se;
    double residual_max;
};

LineFit least_squares(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto n = x.size();
    Eigen::MatrixXd design(n, 2);
    design.col(0).setOnes();
    design.col(1) = x;
    const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd residual = y - design * beta;
    const double sxx = (x.array() - x.mean()).square().sum();
    const double sigma2 = n > 2 ? residual.squaredNorm() / static_cast<double>(n - 2) : 0.0;
    return {beta(1), beta(0), std::sqrt(sigma2 / sxx), residual.cwiseAbs().maxCoeff()};
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

std::string_view to_string(TailMethod m) {
    return m == TailMethod::Hill ? "hill" : "rank-regression";
}

SurvivalCurve empirical_survival(std::span<const Observation> values, std::span<const double> thresholds,
                                 ValueKind kind) {
    SurvivalCurve curve;
    curve.sample_size = values.size();
    if (values.empty()) throw ValidationError("empirical_survival: no observations");

    std::vector<double> all, censored;
    all.reserve(values.size());
    for (const auto& o : values) {
        all.push_back(o.value);
        if (o.censored) censored.push_back(o.value);
    }
    std::sort(all.begin(), all.end());
    std::sort(censored.begin(), censored.end());
    const auto n = static_cast<double>(values.size());

    for (double x : thresholds) {
        const auto below = static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), x) - all.begin());
        const auto censored_below =
            static_cast<std::size_t>(std::lower_bound(censored.begin(), censored.end(), x) - censored.begin());
        if (kind == ValueKind::Duration && censored_below > 0) {
            curve.rejected.push_back({x, "threshold exceeds the censoring cap " + fmt(censored.front())});
            continue;
        }
        if (kind == ValueKind::Extremal && below > 0 &&
            static_cast<double>(censored_below) / static_cast<double>(below) >= kExtremalCensoredFraction) {
            curve.rejected.push_back({x, "censored fraction below threshold is not under 1e-3"});
            continue;
        }
        const std::size_t exceed = all.size() - below;
        const double p = static_cast<double>(exceed) / n;
        curve.points.push_back({x, p, std::sqrt(p * (1.0 - p) / n), exceed});
    }
    return curve;
}

TailFit fit_tail(const SurvivalCurve& curve, double x_lo, double x_hi) {
    if (!(x_lo < x_hi)) throw ValidationError("fit_tail: window requires x_lo < x_hi");
    std::vector<const SurvivalPoint*> used;
    for (const auto& p : curve.points) {
        if (p.threshold >= x_lo && p.threshold <= x_hi && p.probability > 0.0) used.push_back(&p);
    }
    if (used.size() < 4) {
        throw ValidationError("fit_tail: degenerate window, need >= 4 points with positive probability (got " +
                              std::to_string(used.size()) + ")");
    }
    const bool flat = std::all_of(used.begin(), used.end(),
                                  [&](const SurvivalPoint* p) { return p->probability == used.front()->probability; });
    if (flat) throw ValidationError("fit_tail: survival is constant on the window; zero slope window rejected");

    Eigen::VectorXd lx(static_cast<Eigen::Index>(used.size())), ly(lx.size());
    for (Eigen::Index i = 0; i < lx.size(); ++i) {
        lx(i) = std::log(used[static_cast<std::size_t>(i)]->threshold);
        ly(i) = std::log(used[static_cast<std::size_t>(i)]->probability);
    }
    const auto line = least_squares(lx, ly);
    return {-line.slope, used.front()->threshold, used.back()->threshold, line.slope_se,
            used.front()->exceedances, TailMethod::RankRegression};
}

TailFit hill(std::span<const double> values, std::size_t k) {
    if (k == 0 || k >= values.size()) throw ValidationError("hill: need 0 < k < number of values");
    std::vector<double> sorted(values.begin(), values.end());
    if (std::any_of(sorted.begin(), sorted.end(), [](double v) { return !(v > 0.0); })) {
        throw ValidationError("hill: values must be positive");
    }
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                     std::greater<>());
    const double pivot = sorted[k];
    double denom = 0.0;
    for (std::size_t i = 0; i < k; ++i) denom += std::log(sorted[i] / pivot);
    if (!(denom > 0.0)) {
        throw ValidationError(
            "hill: top order statistics are tied (discrete data); use the threshold-based rank-regression fit");
    }
    const double theta = static_cast<double>(k) / denom;
    const double top = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k));
    return {theta, pivot, top, theta / std::sqrt(static_cast<double>(k)), k, TailMethod::Hill};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("quantile: no values");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> log_spaced_thresholds(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) throw ValidationError("log_spaced_thresholds: need 0 < lo < hi, count >= 2");
    std::vector<double> out;
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = std::round(lo * std::exp(ratio * static_cast<double>(i)));
        if (out.empty() || x > out.back()) out.push_back(x);
    }
    return out;
}

Window default_tail_window(std::span<const Observation> values, double lo_quantile, double hi_quantile) {
    std::vector<double> uncensored;
    for (const auto& o : values) {
        if (!o.censored) uncensored.push_back(o.value);
    }
    if (uncensored.empty()) throw ValidationError("default_tail_window: no uncensored values");
    std::sort(uncensored.begin(), uncensored.end());
    return {std::max(1.0, quantile(uncensored, lo_quantile)), quantile(uncensored, hi_quantile)};
}

std::string describe(const Functional& f, const PathSeries& layout) {
    std::ostringstream os;
    switch (f.kind) {
    case Functional::Kind::Count: return "N";
    case Functional::Kind::RunningMax: return "running_max";
    case Functional::Kind::RunningMinAbs: return "running_min_abs";
    case Functional::Kind::CentreOfMass: return "G";
    case Functional::Kind::PathIntegral: os << "S_" << layout.alphas.at(f.index); return os.str();
    case Functional::Kind::Occupation: os << "L_" << layout.sites.at(f.index); return os.str();
    }
    return "?";
}

double evaluate(const SeriesPoint& p, const Functional& f) {
    switch (f.kind) {
    case Functional::Kind::Count: return static_cast<double>(p.excursions);
    case Functional::Kind::RunningMax: return p.running_max;
    case Functional::Kind::RunningMinAbs: return std::abs(p.running_min);
    case Functional::Kind::CentreOfMass: return p.g;
    case Functional::Kind::PathIntegral: return p.s_alpha.at(f.index);
    case Functional::Kind::Occupation: return static_cast<double>(p.occupation.at(f.index));
    }
    return 0.0;
}

double replica_median(std::span<const PathSeries> replicas, const Functional& f, std::size_t i) {
    std::vector<double> v;
    v.reserve(replicas.size());
    for (const auto& s : replicas) v.push_back(evaluate(s.points.at(i), f));
    return quantile(std::move(v), 0.5);
}

ScalingFit fit_scaling(std::span<const PathSeries> replicas, const Functional& f, std::int64_t t_lo,
                       std::int64_t t_hi) {
    if (replicas.size() < 3) throw ValidationError("fit_scaling: need >= 3 replicas");
    const auto& grid = replicas.front().points;
    for (const auto& s : replicas) {
        if (s.points.size() != grid.size()) throw ValidationError("fit_scaling: replicas have different grids");
    }
    std::vector<double> lt, lm;
    bool all_zero = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto t = grid[i].t;
        if (t < t_lo || t > t_hi) continue;
        const double m = replica_median(replicas, f, i);
        if (m != 0.0) all_zero = false;
        if (!(m > 0.0)) {
            if (all_zero) continue;
            throw ValidationError("fit_scaling: nonpositive median at t = " + std::to_string(t));
        }
        lt.push_back(std::log(static_cast<double>(t)));
        lm.push_back(std::log(m));
    }
    if (all_zero) throw ValidationError("fit_scaling: functional identically 0 on the window");
    if (lt.size() < 3) throw ValidationError("fit_scaling: need >= 3 grid points in the window");
    const auto line = least_squares(Eigen::Map<const Eigen::VectorXd>(lt.data(), static_cast<Eigen::Index>(lt.size())),
                                    Eigen::Map<const Eigen::VectorXd>(lm.data(), static_cast<Eigen::Index>(lm.size())));
    return {line.slope, line.intercept, t_lo, t_hi, line.residual_max, replicas.size(), lt.size()};
}

std::pair<std::int64_t, std::int64_t> top_grid_window(const PathSeries& series, std::size_t points) {
    if (series.points.size() < points || points == 0) {
        throw ValidationError("top_grid_window: grid has fewer points than requested");
    }
    return {series.points[series.points.size() - points].t, series.points.back().t};
}

} // namespace lamperti::est
