#include "lamperti/lyapunov.hpp"

#include <string>

namespace lamperti::lyapunov {

double drift_f(const ChainSpec& spec, double gamma, double nu, std::int64_t x) {
    validate(spec);
    if (!std::holds_alternative<HalfLineDelta>(spec) && !std::holds_alternative<TwoSided>(spec)) {
        throw UnsupportedError("drift_f: needs a nearest-neighbour chain on the line (got " +
                               std::string(family_name(spec)) + ")");
    }
    if (std::holds_alternative<HalfLineDelta>(spec) && x < 1) throw ValidationError("drift_f: requires x >= 1");
    if (x == 0) throw ValidationError("drift_f: requires |x| >= 1");

    const auto bd = birth_death(spec, x);
    const auto ax = static_cast<double>(std::abs(x));
    // Moving away from 0 is +1 in |x|.
    const double away = x > 0 ? bd.up : bd.down;
    const double toward = x > 0 ? bd.down : bd.up;
    return away * increment(ax, 1.0, gamma, nu) + toward * increment(ax, -1.0, gamma, nu);
}

double leading_drift(const DriftParams& params, double nu, double x) {
    return nu * (1.0 + params.r) * (params.s2 / 2.0) * std::pow(x, params.r - 1.0) * std::pow(std::log(x), nu - 1.0);
}

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::Power: return "power";
    case Regime::Linear: return "linear";
    case Regime::Limit: return "limit";
    }
    return "unknown";
}

ExponentTable exponent_table(double r, std::span<const double> alphas) {
    ExponentTable table;
    table.r = r;
    table.cls = classify(r);
    table.boundary = r == -1.0 || r == 1.0;
    if (!(r > -1.0)) return table;

    table.m_tail = 1.0 + r;
    table.eta_tail = (1.0 + r) / 2.0;
    for (double a : alphas) {
        if (a < 0.0) throw ValidationError("exponent_table: alphas must be nonnegative");
        table.xi_tail[a] = (1.0 + r) / (a + 2.0);
    }

    if (r <= 1.0) {
        table.n_growth = GrowthLaw{Regime::Power, (1.0 + r) / 2.0, "N_t ~ t^((1+r)/2)"};
        table.max_growth = GrowthLaw{Regime::Power, 0.5, "max X_s ~ t^(1/2)"};
        table.g_growth = GrowthLaw{Regime::Power, 0.5, "G_t ~ t^(1/2)"};
    } else {
        table.n_growth = GrowthLaw{Regime::Linear, 1.0, "N_t / t -> pi(0)"};
        table.max_growth = GrowthLaw{Regime::Power, 1.0 / (1.0 + r), "max X_s ~ t^(1/(1+r))"};
        if (r <= 2.0) {
            table.g_growth = GrowthLaw{Regime::Power, (2.0 - r) / (1.0 + r), "G_t ~ t^((2-r)/(1+r))"};
        } else {
            table.g_growth = GrowthLaw{Regime::Limit, 0.0, "G_t -> nu_1"};
        }
    }
    for (double a : alphas) {
        if (r <= 1.0) {
            table.s_growth[a] = GrowthLaw{Regime::Power, (a + 2.0) / 2.0, "S_t ~ t^((alpha+2)/2)"};
        } else if (r <= 1.0 + a) {
            table.s_growth[a] = GrowthLaw{Regime::Power, (a + 2.0) / (1.0 + r), "S_t ~ t^((alpha+2)/(1+r))"};
        } else {
            table.s_growth[a] = GrowthLaw{Regime::Linear, 1.0, "S_t / t -> nu_alpha"};
        }
    }
    return table;
}

} // namespace lamperti::lyapunov
