#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace focs {

// splitmix64 finalizer; used to derive independent stream keys.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. The engine is mt19937_64 (bit-exact across
// platforms); all value draws are hand-rolled because the standard library
// distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key), engine_(mix64(key)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, n); n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[uniform_index(i)]);
        }
    }

    // Child stream independent of this stream's position, keyed off the
    // original seed so (seed, a, b) always names the same stream.
    Rng split(std::uint64_t a, std::uint64_t b = 0) const {
        return Rng(mix64(mix64(key_ ^ 0x6a09e667f3bcc909ULL) ^ mix64(a)) ^ mix64(b + 0x3c6ef372fe94f82bULL));
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
};

}  // namespace focs
