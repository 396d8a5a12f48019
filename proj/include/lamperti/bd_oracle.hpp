#pragma once

// Exact birth-death computations for nearest-neighbour chains: hitting
// probabilities, the law of the excursion maximum, invariant weights, and the
// stationary quantities of the positive-recurrent half-line chain.
//
// Products of q/p ratios are accumulated as compensated sums of logarithms;
// the ratios approach 1 and naive products drift over many sites.

#include <cstdint>
#include <span>
#include <vector>

#include "lamperti/chain_models.hpp"
#include "lamperti/functionals.hpp"

namespace lamperti::oracle {

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// P[hit `upper` before `lower` | start], lower < start < upper.
double ruin_probability(const ChainSpec& spec, std::int64_t lower, std::int64_t upper, std::int64_t start);

/// P[M_1 >= x] for the half-line chain with the 0 -> 1 boundary; x >= 1.
double max_tail_exact(const ChainSpec& spec, std::int64_t x);

/// Invariant weights normalised by w(0) = 1, i.e. E[ell_1(x)].
double green_per_excursion(const ChainSpec& spec, std::int64_t x);

struct NuValue {
    double alpha;
    bool finite;
    double value;        ///< sum_{x <= truncation} x^alpha pi(x); a lower bound
    double tail_bound;   ///< certified bound on the omitted sum_{x > truncation} x^alpha pi(x)
};

struct StationaryReport {
    std::vector<double> pi;        ///< pi(0..truncation)
    double truncation_bound;       ///< exact mass of pi beyond the truncation
    double expected_eta;           ///< E[eta_1] = 1 / pi(0)
    std::vector<NuValue> nu;
};

/// Stationary distribution of the positive-recurrent half-line delta chain
/// (delta > 1). Sites are added until the remaining mass is below
/// `mass_tolerance` and at least `min_sites` have been summed.
StationaryReport stationary(const ChainSpec& spec, double mass_tolerance, std::span<const double> alphas = {},
                            std::int64_t min_sites = std::int64_t{1} << 20);

/// sum_{x > n} w(x) for the delta family with delta > 1 (unnormalised
/// weights), via the Beta-function identity for w.
double delta_weight_tail(double delta, std::int64_t n);

/// Total invariant weight sum_x w(x) = 2 delta / (delta - 1) of the delta
/// family, delta > 1.
inline double delta_weight_total(double delta) { return 2.0 * delta / (delta - 1.0); }

} // namespace lamperti::oracle
