#include <stdexcept>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "slp/rng.hpp"

using slp::philox4x32;
using slp::RandomStream;

TEST_CASE("philox4x32-10 reference vectors") {
    // Published known-answer vectors for the 10-round 4x32 configuration.
    auto r0 = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0 == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    auto r1 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(r1 == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    auto r2 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(r2 == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("stream draws are the counter blocks in order") {
    const std::uint64_t seed = 0x0123456789abcdefull;
    const std::uint64_t sid = 0xfedcba9876543210ull;
    RandomStream st(seed, sid);

    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    auto block = [&](std::uint64_t b) {
        return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                           static_cast<std::uint32_t>(sid), static_cast<std::uint32_t>(sid >> 32)},
                          key);
    };
    auto b0 = block(0), b1 = block(1);
    for (int i = 0; i < 4; ++i) CHECK(st.next_u32() == b0[i]);
    for (int i = 0; i < 4; ++i) CHECK(st.next_u32() == b1[i]);
}

TEST_CASE("u64 assembly and unit range") {
    RandomStream a(9, 4), b(9, 4);
    std::uint64_t lo = a.next_u32(), hi = a.next_u32();
    CHECK(b.next_u64() == ((hi << 32) | lo));
    RandomStream c(3, 7);
    for (int i = 0; i < 1000; ++i) {
        double u = c.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("streams are addressed, not positional") {
    RandomStream a(42, 1);
    (void)a.next_u32();
    (void)a.next_u32();
    RandomStream b(42, 2);
    RandomStream b_fresh(42, 2);
    // Consuming stream 1 first must not shift stream 2.
    std::vector<std::uint32_t> interleaved, fresh;
    for (int i = 0; i < 8; ++i) interleaved.push_back(b.next_u32());
    for (int i = 0; i < 8; ++i) fresh.push_back(b_fresh.next_u32());
    CHECK(interleaved == fresh);

    RandomStream other_seed(43, 2);
    bool all_equal = true;
    RandomStream b2(42, 2);
    for (int i = 0; i < 8; ++i) all_equal = all_equal && (other_seed.next_u32() == b2.next_u32());
    CHECK_FALSE(all_equal);
}

TEST_CASE("next_below stays in range and is roughly uniform") {
    RandomStream st(5, 0);
    std::array<int, 6> counts{};
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        int v = st.next_below(6);
        REQUIRE(v >= 0);
        REQUIRE(v < 6);
        ++counts[v];
    }
    for (int c : counts) {
        CHECK(c > draws / 6 - 500);
        CHECK(c < draws / 6 + 500);
    }
    CHECK_THROWS_AS(st.next_below(0), std::invalid_argument);
}

TEST_CASE("gaussian moments") {
    RandomStream st(11, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = st.next_gaussian();
        sum += g;
        sumsq += g * g;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}
