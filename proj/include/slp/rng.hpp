#pragma once

#include <array>
#include <cstdint>

namespace slp {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC'11). Counter-based: the output is a pure function of
// (counter, key), so any block can be generated independently of the others.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// A deterministic random stream addressed by (seed, stream_id). The seed is
// the Philox key; the 128-bit counter holds (block index, stream id). Two
// streams with different ids never share a counter block, which is what makes
// per-realization substreams safe to consume from different threads: the
// values drawn depend only on (seed, stream_id, draw position), never on
// execution order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_unit();

    // Standard normal via the explicit Box-Muller transform; generates pairs
    // and caches the second value.
    double next_gaussian();

    // Uniform on [0, n) without modulo bias (rejection on the top range).
    int next_below(int n);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;  // forces refill on first draw
    bool have_cached_gaussian_ = false;
    double cached_gaussian_ = 0.0;
};

}  // namespace slp
