#pragma once

// Lyapunov functions f_{gamma,nu}(x) = (e + x)^gamma log^nu(e + x), their exact
// one-step drift for nearest-neighbour chains, and the table of theoretical
// scaling exponents as a function of r.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "lamperti/chain_models.hpp"
#include "lamperti/errors.hpp"
#include "lamperti/recurrence.hpp"

namespace lamperti::lyapunov {

template <typename Scalar>
Scalar f(Scalar x, Scalar gamma, Scalar nu) {
    using std::log;
    using std::pow;
    if (x < Scalar(0)) throw ValidationError("f: requires x >= 0");
    const Scalar y = std::numbers::e_v<Scalar> + x;
    return pow(y, gamma) * pow(log(y), nu);
}

/// f(x + h) - f(x) without cancellation when h is small against e + x.
template <typename Scalar>
Scalar increment(Scalar x, Scalar h, Scalar gamma, Scalar nu) {
    using std::expm1;
    using std::log;
    using std::log1p;
    const Scalar y = std::numbers::e_v<Scalar> + x;
    const Scalar lr = log1p(h / y);                  // log((y + h) / y)
    const Scalar log_ratio = log1p(lr / log(y));     // log(log(y + h) / log(y))
    return f(x, gamma, nu) * expm1(gamma * lr + nu * log_ratio);
}

/// Exact E[f(X_{t+1}) - f(x) | X_t = x] for the half-line or two-sided chain.
/// For the two-sided chain f is applied to |X|; x must satisfy |x| >= 1.
double drift_f(const ChainSpec& spec, double gamma, double nu, std::int64_t x);

/// Leading-order drift nu (1 + r) (s^2 / 2) x^(r - 1) log^(nu - 1)(x) at x
/// with gamma = 1 + r.
double leading_drift(const DriftParams& params, double nu, double x);

using lamperti::classify;

enum class Regime {
    Power,    ///< functional grows like t^exponent
    Linear,   ///< functional / t converges to a positive constant
    Limit,    ///< functional converges (exponent 0)
};

std::string_view to_string(Regime regime);

struct GrowthLaw {
    Regime regime;
    double exponent;
    std::string note;
};

struct ExponentTable {
    double r = 0.0;
    RecurrenceClass cls = RecurrenceClass::NullRecurrent;
    bool boundary = false;   ///< r in {-1, 1}: log corrections dominate
    std::optional<double> m_tail;
    std::optional<double> eta_tail;
    std::map<double, double> xi_tail;
    std::optional<GrowthLaw> n_growth;
    std::optional<GrowthLaw> max_growth;
    std::map<double, GrowthLaw> s_growth;
    std::optional<GrowthLaw> g_growth;
};

/// Every entry needs r > -1; for r <= -1 the table only carries r and its class.
ExponentTable exponent_table(double r, std::span<const double> alphas = {});

} // namespace lamperti::lyapunov
