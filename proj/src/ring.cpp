#include "sensorcast/ring.hpp"

#include "sensorcast/error.hpp"

#include <cmath>
#include <string>

namespace sensorcast::ring {

void RingNetwork::validate() const {
    if (neighbors < 1 || rings < 1) {
        throw InvalidArgument("ring network: C and D must both be at least 1");
    }
}

std::uint64_t nodes_in_ring(const RingNetwork& net, std::uint64_t d) {
    net.validate();
    if (d > net.rings) {
        throw InvalidArgument("nodes_in_ring: ring " + std::to_string(d) + " beyond D = " +
                              std::to_string(net.rings));
    }
    return d == 0 ? 0 : net.neighbors * (2 * d - 1);
}

std::uint64_t total_nodes(const RingNetwork& net) {
    net.validate();
    return net.neighbors * net.rings * net.rings;
}

std::uint64_t total_transmissions(const RingNetwork& net) {
    net.validate();
    const std::uint64_t d = net.rings;
    // D (D + 1)(4D - 1) is always divisible by 6.
    return net.neighbors * (d * (d + 1) * (4 * d - 1) / 6);
}

double printed_closed_form(const RingNetwork& net) {
    net.validate();
    const double c = static_cast<double>(net.neighbors);
    const double d = static_cast<double>(net.rings);
    return 2.0 / 3.0 * c * d * d * d - 0.5 * c * d * d;
}

std::uint64_t network_savings(const RingNetwork& net, double saved_percent) {
    if (!(saved_percent >= 0.0 && saved_percent <= 100.0)) {
        throw InvalidArgument("network_savings: percentage must lie in [0, 100]");
    }
    const auto total = static_cast<long double>(total_transmissions(net));
    return static_cast<std::uint64_t>(std::floor(total * saved_percent / 100.0L));
}

} // namespace sensorcast::ring
