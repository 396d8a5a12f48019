#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace lamperti {

/// Anything that hands out uniform variates on [0, 1).
template <class S>
concept UniformSource = requires(S& s) {
    { s.uniform() } -> std::convertible_to<double>;
};

/// Deterministic 64-bit Mersenne Twister substream.
///
/// Uniforms are built from the top 53 bits of each draw, so the sequence is
/// bit-identical across standard library implementations (unlike
/// std::uniform_real_distribution).
class VariateStream {
public:
    explicit VariateStream(std::seed_seq& seq) : engine_(seq) {}

    std::uint64_t bits() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Substream `replica_index` of `master_seed`. The same pair always yields the
/// same stream, whatever the worker count or scheduling.
VariateStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index);

/// Seed for an independent trajectory replica; disjoint from derive_stream's
/// excursion substreams of the same master seed.
std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica);

} // namespace lamperti
