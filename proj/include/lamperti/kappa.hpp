#pragma once

#include <cstdint>
#include <vector>

namespace lamperti {

/// One atom of the finitely supported jump law kappa.
struct KappaAtom {
    std::int64_t value;
    double probability;
};

using KappaTable = std::vector<KappaAtom>;

/// Throws ValidationError unless the table is nonempty, has probabilities in
/// [0, 1], and sums to 1 within 1e-12.
void validate_kappa(const KappaTable& table);

double kappa_mean(const KappaTable& table);

/// Inverse-CDF draw from the table using one uniform u in [0, 1).
inline std::int64_t sample_kappa(const KappaTable& table, double u) {
    double acc = 0.0;
    for (const auto& atom : table) {
        acc += atom.probability;
        if (u < acc) return atom.value;
    }
    return table.back().value;
}

} // namespace lamperti
