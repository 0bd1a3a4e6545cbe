#pragma once

#include <cstdint>

namespace sensorcast::ring {

/// Ring model of a multi-hop network: C average neighbours, D rings of hops.
struct RingNetwork {
    std::uint64_t neighbors = 1;
    std::uint64_t rings = 1;

    void validate() const;
};

/// 0 for the gateway's own ring (d = 0), C(2d - 1) otherwise.
std::uint64_t nodes_in_ring(const RingNetwork& net, std::uint64_t d);

/// C * D^2.
std::uint64_t total_nodes(const RingNetwork& net);

/// Hop transmissions per unit of time when every node originates one message:
/// sum over d of C d (2d - 1) = C D (D + 1)(4D - 1) / 6.
std::uint64_t total_transmissions(const RingNetwork& net);

/// (2/3) C D^3 - (1/2) C D^2 as printed in the original derivation. It does not
/// equal total_transmissions (C=5, D=3 gives 67.5 against 110); kept for
/// reference and never used for results.
double printed_closed_form(const RingNetwork& net);

/// floor(total_transmissions * percent / 100); percent must lie in [0, 100].
std::uint64_t network_savings(const RingNetwork& net, double saved_percent);

} // namespace sensorcast::ring
