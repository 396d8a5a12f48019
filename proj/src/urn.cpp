#include "lamperti/urn.hpp"

#include <algorithm>
#include <cmath>

#include "lamperti/errors.hpp"

namespace lamperti::urn {

EmbeddedMoments embedded_moment_check(const KappaTable& kappa, std::int64_t x, std::size_t n_samples,
                                      std::uint64_t seed) {
    validate_kappa(kappa);
    if (x < 2) throw ValidationError("embedded_moment_check: x must be >= 2");
    if (n_samples < 2) throw ValidationError("embedded_moment_check: need at least 2 samples");

    double sum1 = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto stream = derive_stream(seed, i);
        const auto d = static_cast<double>(traverse_quadrant(kappa, x, stream).z_next - x);
        const double d2 = d * d;
        sum1 += d;
        sum2 += d2;
        sum4 += d2 * d2;
    }
    const auto n = static_cast<double>(n_samples);
    const double m1 = sum1 / n;
    const double m2 = sum2 / n;
    const double var1 = (sum2 - n * m1 * m1) / (n - 1.0);
    const double var2 = (sum4 - n * m2 * m2) / (n - 1.0);
    return {m1, std::sqrt(var1 / n), m2, std::sqrt(std::max(var2, 0.0) / n), n_samples};
}

void axis_visits_from_path(const std::vector<UrnState>& path, std::vector<std::int64_t>& nu,
                           std::vector<std::int64_t>& z) {
    nu.clear();
    z.clear();
    for (const auto& s : path) {
        if (s.a * s.b == 0) {
            nu.push_back(s.t);
            z.push_back(std::llabs(s.a) + std::llabs(s.b));
        }
    }
}

} // namespace lamperti::urn
