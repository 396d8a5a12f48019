#include "lamperti/random.hpp"

namespace lamperti {

namespace {

constexpr std::uint32_t kExcursionDomain = 0x45584355u; // "EXCU"
constexpr std::uint32_t kReplicaDomain = 0x5245504cu;   // "REPL"

std::seed_seq make_seq(std::uint32_t domain, std::uint64_t a, std::uint64_t b) {
    return std::seed_seq{domain,
                         static_cast<std::uint32_t>(a),
                         static_cast<std::uint32_t>(a >> 32),
                         static_cast<std::uint32_t>(b),
                         static_cast<std::uint32_t>(b >> 32)};
}

} // namespace

VariateStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index) {
    auto seq = make_seq(kExcursionDomain, master_seed, replica_index);
    return VariateStream(seq);
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
    auto seq = make_seq(kReplicaDomain, master_seed, replica);
    VariateStream s(seq);
    return s.bits();
}

} // namespace lamperti
