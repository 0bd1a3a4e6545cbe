#include "oracles.hpp"

#include "sensorcast/error.hpp"
#include "sensorcast/ring.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace sensorcast;
using namespace sensorcast::ring;

TEST_CASE("nodes per ring") {
    CHECK(nodes_in_ring({5, 3}, 0) == 0);
    CHECK(nodes_in_ring({5, 3}, 1) == 5);
    CHECK(nodes_in_ring({5, 3}, 3) == 25);
    CHECK_THROWS_AS(nodes_in_ring({5, 3}, 4), InvalidArgument);
}

TEST_CASE("total nodes") {
    CHECK(total_nodes({5, 3}) == 45);
    CHECK(total_nodes({7, 1}) == 7);
    CHECK(total_nodes({2, 4}) == 32);
    for (std::uint64_t c = 1; c <= 9; ++c) {
        for (std::uint64_t d = 1; d <= 12; ++d) {
            std::uint64_t sum = 0;
            for (std::uint64_t r = 1; r <= d; ++r) {
                sum += nodes_in_ring({c, d}, r);
            }
            CHECK(total_nodes({c, d}) == sum);
            if (d > 1) {
                CHECK(total_nodes({c, d}) - total_nodes({c, d - 1}) == c * (2 * d - 1));
            }
        }
    }
}

TEST_CASE("total transmissions") {
    CHECK(total_transmissions({1, 1}) == 1);
    CHECK(total_transmissions({5, 3}) == 110);
    for (std::uint64_t c = 1; c <= 6; ++c) {
        for (std::uint64_t d = 1; d <= 8; ++d) {
            CHECK(total_transmissions({c, d}) == oracle::ring_hops_by_simulation(c, d));
        }
    }
    const double ratio = static_cast<double>(total_transmissions({3, 200})) /
                         static_cast<double>(total_transmissions({3, 100}));
    CHECK(ratio == Catch::Approx(8.0).margin(0.05));
}

TEST_CASE("printed closed form is reproduced") {
    CHECK(printed_closed_form({5, 3}) == 67.5);
    CHECK(printed_closed_form({3, 100}) == Catch::Approx(1985000.0).epsilon(1e-12));
    CHECK(printed_closed_form({5, 3}) != static_cast<double>(total_transmissions({5, 3})));
}

TEST_CASE("network savings") {
    CHECK(network_savings({5, 3}, 0.0) == 0);
    CHECK(network_savings({5, 3}, 100.0) == 110);
    CHECK(network_savings({5, 3}, 30.0) == 33);
    CHECK_THROWS_AS(network_savings({5, 3}, -1.0), InvalidArgument);
    CHECK_THROWS_AS(network_savings({5, 3}, 100.5), InvalidArgument);
}

TEST_CASE("network validation") {
    CHECK_THROWS_AS(total_nodes({0, 3}), InvalidArgument);
    CHECK_THROWS_AS(total_transmissions({3, 0}), InvalidArgument);
}
