#pragma once

// Process families with exact, finitely supported one-step laws.
//
//  HalfLineDelta  nearest-neighbour walk on {0, 1, 2, ...}:
//                 P(x -> x -/+ 1) = 1/2 +/- delta / (4x + 2 delta), x >= 1,
//                 and 0 -> 1 deterministically.
//  TwoSided       the delta_plus walk on x > 0, its mirror image with
//                 delta_minus on x < 0, and 0 -> +1 (resp. -1) with
//                 probability q0 (resp. 1 - q0).
//  CentralBias    lattice walk on Z^d: uniform axis, then +/-1 with bias
//                 d rho x_i / |x|^2 clipped to [-1, 1].
//  UrnEmbedded    axis-distance chain Z of the noisy harmonic urn; observed
//                 through X = sqrt(Z - 1).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <type_traits>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "lamperti/errors.hpp"
#include "lamperti/kappa.hpp"
#include "lamperti/random.hpp"
#include "lamperti/recurrence.hpp"
#include "lamperti/urn.hpp"

namespace lamperti {

struct HalfLineDelta {
    double delta = 0.0;
};

struct TwoSided {
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double q0 = 0.5;
};

struct CentralBias {
    int dimension = 2;
    double rho = 0.0;
};

struct UrnEmbedded {
    KappaTable kappa;
};

using ChainSpec = std::variant<HalfLineDelta, TwoSided, CentralBias, UrnEmbedded>;

/// Lamperti constants: E[Delta | X = x] ~ c / x, E[Delta^2 | X = x] -> s2,
/// r = -2 c / s2.
struct DriftParams {
    double c;
    double s2;
    double r;
    RecurrenceClass cls;
};

using LatticePoint = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Site on the integers (half-line, two-sided, urn Z) or a lattice point.
using ChainState = std::variant<std::int64_t, LatticePoint>;

std::string_view family_name(const ChainSpec& spec);

/// Throws ValidationError naming the violated invariant.
void validate(const ChainSpec& spec);

/// Closed-form constants. For TwoSided this is the positive half; use
/// two_sided_params for both halves.
DriftParams lamperti_params(const ChainSpec& spec);

/// {positive half, negative half}; the negative half uses the convention
/// E[Delta | x] = -c_minus / |x| so that r_minus = delta_minus.
std::array<DriftParams, 2> two_sided_params(const TwoSided& spec);

/// Starting state: 0, the lattice origin, or Z = 1.
ChainState origin(const ChainSpec& spec);

/// The scalar process X fed to excursion analysis.
double observe(const ChainSpec& spec, const ChainState& state);

double radial(const LatticePoint& point);

bool is_nearest_neighbour(const ChainSpec& spec);

// ---------------------------------------------------------------------------
// Transition kernels. Shared by step() and the simulation engine.
// ---------------------------------------------------------------------------

/// delta / (4x + 2 delta) for x >= 1. Where this reaches 1/2 in absolute value
/// (only at small x when delta <= -1) it is replaced by +/-1/4 so that both
/// moves keep positive probability.
inline double delta_bias(double delta, std::int64_t x) {
    const double b = delta / (4.0 * static_cast<double>(x) + 2.0 * delta);
    return std::abs(b) < 0.5 ? b : std::copysign(0.25, b);
}

/// P(x -> x + 1) and P(x -> x - 1) for nearest-neighbour families.
struct BirthDeath {
    double up;
    double down;
};

BirthDeath birth_death(const ChainSpec& spec, std::int64_t x);

namespace kernel {

inline std::int64_t half_line_next(double delta, std::int64_t x, double u) {
    if (x == 0) return 1;
    return u < 0.5 - delta_bias(delta, x) ? x + 1 : x - 1;
}

inline std::int64_t two_sided_next(const TwoSided& spec, std::int64_t x, double u) {
    if (x > 0) return u < 0.5 - delta_bias(spec.delta_plus, x) ? x + 1 : x - 1;
    if (x < 0) return u < 0.5 - delta_bias(spec.delta_minus, -x) ? x - 1 : x + 1;
    return u < spec.q0 ? 1 : -1;
}

/// Bias along axis i at `point`, given |point|^2.
inline double central_bias_beta(const CentralBias& spec, std::int64_t coord, std::int64_t norm2) {
    if (norm2 == 0) return 0.0;
    const double beta = spec.dimension * spec.rho * static_cast<double>(coord) / static_cast<double>(norm2);
    return std::clamp(beta, -1.0, 1.0);
}

/// Axis from u_axis, direction from u_dir.
inline int central_bias_axis(const CentralBias& spec, double u_axis) {
    return std::min(spec.dimension - 1, static_cast<int>(u_axis * spec.dimension));
}

inline std::int64_t central_bias_direction(double beta, double u_dir) {
    return u_dir < 0.5 * (1.0 + beta) ? 1 : -1;
}

} // namespace kernel

/// One transition sampled from the exact law.
template <UniformSource S>
ChainState step(const ChainSpec& spec, const ChainState& state, S& rand) {
    return std::visit(
        [&](const auto& family) -> ChainState {
            using F = std::decay_t<decltype(family)>;
            if constexpr (std::is_same_v<F, HalfLineDelta>) {
                return kernel::half_line_next(family.delta, std::get<std::int64_t>(state), rand.uniform());
            } else if constexpr (std::is_same_v<F, TwoSided>) {
                return kernel::two_sided_next(family, std::get<std::int64_t>(state), rand.uniform());
            } else if constexpr (std::is_same_v<F, CentralBias>) {
                LatticePoint next = std::get<LatticePoint>(state);
                const int axis = kernel::central_bias_axis(family, rand.uniform());
                const double beta = kernel::central_bias_beta(family, next(axis), next.squaredNorm());
                next(axis) += kernel::central_bias_direction(beta, rand.uniform());
                return next;
            } else {
                return urn::traverse_quadrant(family.kappa, std::get<std::int64_t>(state), rand).z_next;
            }
        },
        spec);
}

struct Successor {
    ChainState state;
    double probability;
};

/// Exact one-step law. UrnEmbedded is unsupported.
std::vector<Successor> successors(const ChainSpec& spec, const ChainState& state);

struct Moments {
    double mean;
    double second_moment;
};

/// Exact E[Delta] and E[Delta^2] of the observed scalar process, by finite
/// summation over successors.
Moments conditional_moments(const ChainSpec& spec, const ChainState& state);

/// Exact one-step mean vector and second-moment matrix of the lattice walk.
struct LatticeMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd second_moment;
};

LatticeMoments lattice_moments(const CentralBias& spec, const LatticePoint& point);

} // namespace lamperti
