#include "lamperti/bd_oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lamperti::oracle {

namespace {

constexpr std::int64_t kMaxSites = std::int64_t{1} << 24;

/// log(q_k / p_k) at an interior site.
double log_down_over_up(const ChainSpec& spec, std::int64_t k) {
    const auto bd = birth_death(spec, k);
    if (!(bd.up > 0.0 && bd.down > 0.0)) {
        throw ValidationError("ruin_probability: site " + std::to_string(k) + " is not interior for this chain");
    }
    return std::log(bd.down) - std::log(bd.up);
}

const HalfLineDelta& require_half_line(const ChainSpec& spec, const char* op) {
    validate(spec);
    if (const auto* s = std::get_if<HalfLineDelta>(&spec)) return *s;
    throw UnsupportedError(std::string(op) + ": only the half-line delta chain is supported (got " +
                           std::string(family_name(spec)) + ")");
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

} // namespace

double ruin_probability(const ChainSpec& spec, std::int64_t lower, std::int64_t upper, std::int64_t start) {
    validate(spec);
    if (!is_nearest_neighbour(spec)) {
        throw UnsupportedError("ruin_probability: family is not nearest-neighbour (" + std::string(family_name(spec)) +
                               ")");
    }
    if (!(lower < start && start < upper)) throw ValidationError("ruin_probability: requires lower < start < upper");
    if (std::holds_alternative<HalfLineDelta>(spec) && lower < 0) {
        throw ValidationError("ruin_probability: half-line chain requires lower >= 0");
    }

    // rho_k = prod_{j=lower+1..k} q_j / p_j, rho_lower = 1; scaled by the running max in log space.
    std::vector<double> log_rho;
    log_rho.reserve(static_cast<std::size_t>(upper - lower));
    CompensatedSum acc;
    log_rho.push_back(0.0);
    for (std::int64_t k = lower + 1; k < upper; ++k) {
        acc.add(log_down_over_up(spec, k));
        log_rho.push_back(acc.value());
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : log_rho) peak = std::max(peak, v);

    CompensatedSum numer, denom;
    for (std::int64_t k = lower; k < upper; ++k) {
        const double term = std::exp(log_rho[static_cast<std::size_t>(k - lower)] - peak);
        if (k < start) numer.add(term);
        denom.add(term);
    }
    return numer.value() / denom.value();
}

double max_tail_exact(const ChainSpec& spec, std::int64_t x) {
    require_half_line(spec, "max_tail_exact");
    if (x < 1) throw ValidationError("max_tail_exact: requires x >= 1");
    if (x == 1) return 1.0;
    return ruin_probability(spec, 0, x, 1);
}

double green_per_excursion(const ChainSpec& spec, std::int64_t x) {
    const auto& s = require_half_line(spec, "green_per_excursion");
    const auto params = lamperti_params(spec);
    if (params.cls == RecurrenceClass::Transient) {
        throw ValidationError("green_per_excursion: chain is transient (r = " + std::to_string(params.r) + ")");
    }
    if (x < 0) throw ValidationError("green_per_excursion: requires x >= 0");
    const ChainSpec chain = s;
    CompensatedSum log_w;
    for (std::int64_t k = 1; k <= x; ++k) {
        log_w.add(std::log(birth_death(chain, k - 1).up));
        log_w.add(-std::log(birth_death(chain, k).down));
    }
    return std::exp(log_w.value());
}

double delta_weight_tail(double delta, std::int64_t n) {
    if (!(delta > 1.0)) throw ValidationError("delta_weight_tail: requires delta > 1");
    const auto a = static_cast<double>(n);
    return delta * (std::exp(log_beta(a + 1.0, delta - 1.0)) + std::exp(log_beta(a + 2.0, delta - 1.0)));
}

StationaryReport stationary(const ChainSpec& spec, double mass_tolerance, std::span<const double> alphas,
                            std::int64_t min_sites) {
    const auto& s = require_half_line(spec, "stationary");
    const auto params = lamperti_params(spec);
    if (params.cls != RecurrenceClass::PositiveRecurrent) {
        throw ValidationError("stationary: chain is " + std::string(to_string(params.cls)) + " (r = " +
                              std::to_string(params.r) + "); a stationary distribution needs r > 1");
    }
    if (!(mass_tolerance > 0.0)) throw ValidationError("stationary: mass_tolerance must be positive");
    const double delta = s.delta;
    const ChainSpec chain = s;

    std::vector<double> weights{1.0};
    CompensatedSum total;
    total.add(1.0);
    std::vector<CompensatedSum> moments(alphas.size());
    CompensatedSum log_w;
    std::int64_t n = 0;
    while (true) {
        const bool enough = n >= min_sites && delta_weight_tail(delta, n) / (total.value() + delta_weight_tail(delta, n)) <
                                                  mass_tolerance;
        if (enough) break;
        if (n >= kMaxSites) {
            throw ValidationError("stationary: mass tolerance not reachable within " + std::to_string(kMaxSites) +
                                  " sites");
        }
        ++n;
        log_w.add(std::log(birth_death(chain, n - 1).up));
        log_w.add(-std::log(birth_death(chain, n).down));
        const double w = std::exp(log_w.value());
        weights.push_back(w);
        total.add(w);
        for (std::size_t j = 0; j < alphas.size(); ++j) moments[j].add(alpha_power(static_cast<double>(n), alphas[j]) * w);
    }

    const double tail = delta_weight_tail(delta, n);
    const double norm = total.value() + tail;
    StationaryReport report;
    report.pi.reserve(weights.size());
    for (double w : weights) report.pi.push_back(w / norm);
    report.truncation_bound = tail / norm;
    report.expected_eta = 1.0 / report.pi.front();

    // x^alpha w(x) <= 2 Gamma(1 + delta) (1 + delta / m) x^(alpha - delta) for x >= m = n + 1.
    const double m = static_cast<double>(n + 1);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        const double alpha = alphas[j];
        NuValue nu{alpha, alpha < delta - 1.0, std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
        if (nu.finite) {
            const double s_exp = delta - alpha;
            const double sum_bound = std::pow(m, -s_exp) + std::pow(m, 1.0 - s_exp) / (s_exp - 1.0);
            nu.value = moments[j].value() / norm;
            nu.tail_bound = 2.0 * std::tgamma(1.0 + delta) * (1.0 + delta / m) * sum_bound / norm;
        }
        report.nu.push_back(nu);
    }
    return report;
}

} // namespace lamperti::oracle
