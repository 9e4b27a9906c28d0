#pragma once

#include <cmath>
#include <cstdint>

namespace ulln::rng {

// splitmix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Substream derivation. The exact chain below is part of the reproducibility
// contract: results must be bit-identical across machines and worker counts,
// so do not change the constants or the order of operations.
inline std::uint64_t substream_id(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (a + 0xd1b54a32d192ed03ull));
    h = mix64(h ^ (b + 0x8cb92ba72f3d8dd7ull));
    return h;
}

// xoshiro256** (Blackman/Vigna), state expanded from a 64-bit seed with
// splitmix64 as the authors recommend. We roll our own uniform/exponential
// transforms instead of <random> distributions so that streams are
// bit-identical across standard libraries.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            s += 0x9e3779b97f4a7c15ull;
            word = mix64(s);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Exponential with the given rate > 0.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace ulln::rng
