#pragma once

// Reference (non-streaming) excursion decomposition of an explicit path.
// Slow and simple on purpose: the streaming engine is checked against it.

#include <cstdint>
#include <span>
#include <vector>

#include "lamperti/functionals.hpp"

namespace lamperti::excursion {

struct Decomposition {
    std::vector<ExcursionRecord> excursions;
    std::vector<std::size_t> starts;   ///< index of tau_{n-1} for each excursion
    std::vector<double> trailing;      ///< incomplete final segment (starts at 0 when nonempty)
};

/// Splits a path starting at 0 into completed excursions and the trailing
/// incomplete segment. Throws ValidationError if path is empty or path[0] != 0.
Decomposition decompose(std::span<const double> path, std::span<const double> alphas = {},
                        std::span<const double> sites = {});

/// Functionals of one excursion segment: starts at 0, no other zero.
ExcursionRecord functionals(std::span<const double> segment, std::span<const double> alphas,
                            std::span<const double> sites = {});

/// Exact N_t, running max/min, S^(alpha)_t, G_t and L_t(x) at each grid time
/// (1-based times, grid ascending, all <= path length).
PathSeries series_functionals(std::span<const double> path, std::span<const std::int64_t> grid,
                              std::span<const double> alphas, std::span<const double> sites = {});

} // namespace lamperti::excursion
