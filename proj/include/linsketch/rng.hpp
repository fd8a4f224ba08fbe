#pragma once

#include <cstdint>

namespace linsketch {

/// Deterministic counter-mode generator (splitmix64 of key + counter). All
/// randomness in the library flows from one 64-bit master seed through this.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0)
        : key_(key ^ (stream * 0x9e3779b97f4a7c15ULL)), ctr_(0) {}

    std::uint64_t next() {
        std::uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        // 64-bit state, desk-scale bounds: modulo bias is negligible but we
        // reject the top sliver anyway to keep streams reproducible across
        // platforms.
        std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    double next_double() {
        return double(next() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

}  // namespace linsketch
