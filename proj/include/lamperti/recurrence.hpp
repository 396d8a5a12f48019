#pragma once

#include <string_view>

namespace lamperti {

enum class RecurrenceClass { Transient, NullRecurrent, PositiveRecurrent };

/// Transient iff r < -1, null-recurrent iff -1 <= r <= 1, positive-recurrent
/// iff r > 1. Boundary values belong to the null-recurrent class.
constexpr RecurrenceClass classify(double r) {
    if (r < -1.0) return RecurrenceClass::Transient;
    if (r <= 1.0) return RecurrenceClass::NullRecurrent;
    return RecurrenceClass::PositiveRecurrent;
}

constexpr std::string_view to_string(RecurrenceClass cls) {
    switch (cls) {
    case RecurrenceClass::Transient: return "transient";
    case RecurrenceClass::NullRecurrent: return "null-recurrent";
    case RecurrenceClass::PositiveRecurrent: return "positive-recurrent";
    }
    return "unknown";
}

} // namespace lamperti
