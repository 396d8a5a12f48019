#include "lamperti/excursion_stats.hpp"

#include <algorithm>

#include "lamperti/errors.hpp"

namespace lamperti::excursion {

ExcursionRecord functionals(std::span<const double> segment, std::span<const double> alphas,
                            std::span<const double> sites) {
    if (segment.empty() || segment.front() != 0.0) {
        throw ValidationError("excursion segment must start at 0");
    }
    if (std::find(segment.begin() + 1, segment.end(), 0.0) != segment.end()) {
        throw ValidationError("excursion segment contains an interior zero");
    }
    ExcursionRecord rec;
    rec.eta = static_cast<std::int64_t>(segment.size());
    rec.max = *std::max_element(segment.begin(), segment.end());
    for (double alpha : alphas) {
        double sum = 0.0;
        for (double x : segment) sum += alpha_power(x, alpha);
        rec.xi.push_back(sum);
    }
    for (double site : sites) {
        rec.occupation.push_back(std::count(segment.begin(), segment.end(), site));
    }
    return rec;
}

Decomposition decompose(std::span<const double> path, std::span<const double> alphas,
                        std::span<const double> sites) {
    if (path.empty()) throw ValidationError("path must be nonempty");
    if (path.front() != 0.0) throw ValidationError("path must start at 0");

    Decomposition out;
    std::size_t start = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (path[i] == 0.0) {
            out.excursions.push_back(functionals(path.subspan(start, i - start), alphas, sites));
            out.starts.push_back(start);
            start = i;
        }
    }
    out.trailing.assign(path.begin() + static_cast<std::ptrdiff_t>(start), path.end());
    return out;
}

PathSeries series_functionals(std::span<const double> path, std::span<const std::int64_t> grid,
                              std::span<const double> alphas, std::span<const double> sites) {
    PathSeries series;
    series.alphas.assign(alphas.begin(), alphas.end());
    series.sites.assign(sites.begin(), sites.end());
    for (std::int64_t t : grid) {
        if (t < 1 || t > static_cast<std::int64_t>(path.size())) {
            throw ValidationError("grid time outside the path");
        }
        const auto prefix = path.first(static_cast<std::size_t>(t));
        SeriesPoint p;
        p.t = t;
        p.excursions = std::count(prefix.begin() + 1, prefix.end(), 0.0);
        p.running_max = *std::max_element(prefix.begin(), prefix.end());
        p.running_min = *std::min_element(prefix.begin(), prefix.end());
        for (double alpha : alphas) {
            double sum = 0.0;
            for (double x : prefix) sum += alpha_power(x, alpha);
            p.s_alpha.push_back(sum);
        }
        double total = 0.0;
        for (double x : prefix) total += x;
        p.g = total / static_cast<double>(t);
        for (double site : sites) p.occupation.push_back(std::count(prefix.begin(), prefix.end(), site));
        series.points.push_back(std::move(p));
    }
    return series;
}

} // namespace lamperti::excursion
