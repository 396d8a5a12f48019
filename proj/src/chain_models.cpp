#include "lamperti/chain_models.hpp"

#include <numeric>
#include <sstream>
#include <type_traits>

namespace lamperti {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

DriftParams make_params(double c, double s2, double r) { return {c, s2, r, classify(r)}; }

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

void validate_kappa(const KappaTable& table) {
    if (table.empty()) throw ValidationError("kappa table must be nonempty");
    double total = 0.0;
    for (const auto& atom : table) {
        if (!(atom.probability >= 0.0 && atom.probability <= 1.0)) {
            throw ValidationError("kappa probabilities must lie in [0, 1]");
        }
        total += atom.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("kappa table probabilities must sum to 1 (got " + fmt(total) + ")");
    }
}

double kappa_mean(const KappaTable& table) {
    return std::accumulate(table.begin(), table.end(), 0.0, [](double acc, const KappaAtom& a) {
        return acc + static_cast<double>(a.value) * a.probability;
    });
}

std::string_view family_name(const ChainSpec& spec) {
    return std::visit(overloaded{[](const HalfLineDelta&) { return std::string_view{"half-line-delta"}; },
                                 [](const TwoSided&) { return std::string_view{"two-sided"}; },
                                 [](const CentralBias&) { return std::string_view{"central-bias"}; },
                                 [](const UrnEmbedded&) { return std::string_view{"urn-embedded"}; }},
                      spec);
}

void validate(const ChainSpec& spec) {
    std::visit(overloaded{
                   [](const HalfLineDelta& s) {
                       if (!(s.delta > -2.0)) {
                           throw ValidationError("half-line-delta: requires delta > -2 (got " + fmt(s.delta) + ")");
                       }
                   },
                   [](const TwoSided& s) {
                       if (!(s.delta_plus > -2.0)) {
                           throw ValidationError("two-sided: requires delta_plus > -2 (got " + fmt(s.delta_plus) + ")");
                       }
                       if (!(s.delta_minus > -2.0)) {
                           throw ValidationError("two-sided: requires delta_minus > -2 (got " + fmt(s.delta_minus) +
                                                 ")");
                       }
                       if (!(s.q0 > 0.0 && s.q0 < 1.0)) {
                           throw ValidationError("two-sided: requires q0 in (0, 1) (got " + fmt(s.q0) + ")");
                       }
                   },
                   [](const CentralBias& s) {
                       if (s.dimension < 1) throw ValidationError("central-bias: requires dimension d >= 1");
                       if (!std::isfinite(s.rho)) throw ValidationError("central-bias: rho must be finite");
                   },
                   [](const UrnEmbedded& s) { validate_kappa(s.kappa); },
               },
               spec);
}

DriftParams lamperti_params(const ChainSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const HalfLineDelta& s) { return make_params(-s.delta / 2.0, 1.0, s.delta); },
                          [](const TwoSided& s) { return two_sided_params(s)[0]; },
                          [](const CentralBias& s) {
                              const double d = s.dimension;
                              const double sigma2 = 1.0 / d;
                              const double c = s.rho + (d - 1.0) * sigma2 / 2.0;
                              return make_params(c, sigma2, 1.0 - d - 2.0 * s.rho / sigma2);
                          },
                          [](const UrnEmbedded& s) {
                              const double mean = kappa_mean(s.kappa);
                              return make_params((1.0 - 2.0 * mean) / 4.0, 1.0 / 6.0, 6.0 * mean - 3.0);
                          },
                      },
                      spec);
}

std::array<DriftParams, 2> two_sided_params(const TwoSided& spec) {
    validate(spec);
    return {make_params(-spec.delta_plus / 2.0, 1.0, spec.delta_plus),
            make_params(-spec.delta_minus / 2.0, 1.0, spec.delta_minus)};
}

ChainState origin(const ChainSpec& spec) {
    return std::visit(overloaded{
                          [](const CentralBias& s) -> ChainState { return LatticePoint::Zero(s.dimension); },
                          [](const UrnEmbedded&) -> ChainState { return std::int64_t{1}; },
                          [](const auto&) -> ChainState { return std::int64_t{0}; },
                      },
                      spec);
}

double radial(const LatticePoint& point) { return std::sqrt(static_cast<double>(point.squaredNorm())); }

double observe(const ChainSpec& spec, const ChainState& state) {
    return std::visit(overloaded{
                          [&](const CentralBias&) { return radial(std::get<LatticePoint>(state)); },
                          [&](const UrnEmbedded&) {
                              return std::sqrt(static_cast<double>(std::get<std::int64_t>(state) - 1));
                          },
                          [&](const auto&) { return static_cast<double>(std::get<std::int64_t>(state)); },
                      },
                      spec);
}

bool is_nearest_neighbour(const ChainSpec& spec) {
    return std::holds_alternative<HalfLineDelta>(spec) || std::holds_alternative<TwoSided>(spec);
}

BirthDeath birth_death(const ChainSpec& spec, std::int64_t x) {
    return std::visit(overloaded{
                          [x](const HalfLineDelta& s) -> BirthDeath {
                              if (x < 0) throw ValidationError("half-line-delta: site must be >= 0");
                              if (x == 0) return {1.0, 0.0};
                              const double b = delta_bias(s.delta, x);
                              return {0.5 - b, 0.5 + b};
                          },
                          [x](const TwoSided& s) -> BirthDeath {
                              if (x == 0) return {s.q0, 1.0 - s.q0};
                              if (x > 0) {
                                  const double b = delta_bias(s.delta_plus, x);
                                  return {0.5 - b, 0.5 + b};
                              }
                              const double b = delta_bias(s.delta_minus, -x);
                              return {0.5 + b, 0.5 - b};
                          },
                          [](const auto&) -> BirthDeath {
                              throw UnsupportedError("birth_death: family is not nearest-neighbour");
                          },
                      },
                      spec);
}

std::vector<Successor> successors(const ChainSpec& spec, const ChainState& state) {
    return std::visit(
        overloaded{
            [&](const CentralBias& s) {
                const auto& x = std::get<LatticePoint>(state);
                const auto norm2 = x.squaredNorm();
                std::vector<Successor> out;
                out.reserve(2 * static_cast<std::size_t>(s.dimension));
                const double axis_p = 1.0 / s.dimension;
                for (int i = 0; i < s.dimension; ++i) {
                    const double beta = kernel::central_bias_beta(s, x(i), norm2);
                    LatticePoint plus = x, minus = x;
                    plus(i) += 1;
                    minus(i) -= 1;
                    out.push_back({plus, axis_p * 0.5 * (1.0 + beta)});
                    out.push_back({minus, axis_p * 0.5 * (1.0 - beta)});
                }
                return out;
            },
            [&](const UrnEmbedded&) -> std::vector<Successor> {
                throw UnsupportedError(
                    "urn-embedded: one-step law is only defined through the urn; use urn::embedded_moment_check");
            },
            [&](const auto&) {
                const auto x = std::get<std::int64_t>(state);
                const auto bd = birth_death(spec, x);
                std::vector<Successor> out;
                if (bd.up > 0.0) out.push_back({x + 1, bd.up});
                if (bd.down > 0.0) out.push_back({x - 1, bd.down});
                return out;
            },
        },
        spec);
}

Moments conditional_moments(const ChainSpec& spec, const ChainState& state) {
    const double x = observe(spec, state);
    Moments m{0.0, 0.0};
    for (const auto& next : successors(spec, state)) {
        const double d = observe(spec, next.state) - x;
        m.mean += next.probability * d;
        m.second_moment += next.probability * d * d;
    }
    return m;
}

LatticeMoments lattice_moments(const CentralBias& spec, const LatticePoint& point) {
    const ChainSpec wrapped = spec;
    LatticeMoments m{Eigen::VectorXd::Zero(spec.dimension), Eigen::MatrixXd::Zero(spec.dimension, spec.dimension)};
    for (const auto& next : successors(wrapped, point)) {
        const Eigen::VectorXd theta = (std::get<LatticePoint>(next.state) - point).cast<double>();
        m.mean += next.probability * theta;
        m.second_moment += next.probability * theta * theta.transpose();
    }
    return m;
}

} // namespace lamperti
