#pragma once

#include <array>
#include <cstdint>

namespace bcp {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A block is a pure function of (key, counter), so any draw in any stream
// can be regenerated without replaying the stream before it.
namespace philox {

inline constexpr uint32_t kMult0 = 0xD2511F53u;
inline constexpr uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85u;

using Block = std::array<uint32_t, 4>;

inline void round_once(Block& x, uint32_t k0, uint32_t k1) {
    const uint64_t p0 = static_cast<uint64_t>(kMult0) * x[0];
    const uint64_t p1 = static_cast<uint64_t>(kMult1) * x[2];
    const uint32_t lo0 = static_cast<uint32_t>(p0), hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1), hi1 = static_cast<uint32_t>(p1 >> 32);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

inline Block block(Block counter, uint32_t k0, uint32_t k1) {
    for (int r = 0; r < 10; ++r) {
        round_once(counter, k0, k1);
        if (r < 9) {
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
    }
    return counter;
}

inline Block block(Block counter, uint64_t key) {
    return block(counter, static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
}

}  // namespace philox

// Streams are keyed by (seed, site, tag): the site and tag occupy the upper
// counter words, the 64-bit draw index the lower two. Distinct (site, tag)
// pairs give disjoint counter spaces for |site| < 2^59 and tag < 16.
inline philox::Block stream_block(uint64_t seed, int64_t site, uint32_t tag, uint64_t index) {
    const uint64_t s = static_cast<uint64_t>(site);
    philox::Block ctr = {static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
                         static_cast<uint32_t>(s),
                         (static_cast<uint32_t>(s >> 32) & 0x0FFFFFFFu) | (tag << 28)};
    return philox::block(ctr, seed);
}

inline uint64_t join64(uint32_t hi, uint32_t lo) {
    return (static_cast<uint64_t>(hi) << 32) | lo;
}

// Uniform on [0,1), 53-bit resolution.
inline double u01(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform on (0,1); never returns 0 or 1, safe under log().
inline double u01_open(uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Tag 15 is reserved for seed derivation so child streams can never collide
// with mark streams of the same seed.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    const philox::Block out = stream_block(seed, static_cast<int64_t>(a), 15u, b);
    return join64(out[0], out[1]) ^ (join64(out[2], out[3]) * 0xD1B54A32D192ED03ull);
}

}  // namespace bcp
