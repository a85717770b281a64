#pragma once

#include <cstdint>
#include <random>

namespace forge {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seedable RNG wrapper. Index draws use modulo reduction on the raw 64-bit
/// stream instead of std::uniform_int_distribution so that results are
/// identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    std::size_t uniform_index(std::size_t n) {
        return n == 0 ? 0 : static_cast<std::size_t>(next() % n);
    }

    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Deterministic per-item child stream, independent of thread schedule.
    static Rng forked(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 1)));
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace forge
