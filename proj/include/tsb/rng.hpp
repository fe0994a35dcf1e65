// Counter-based deterministic random numbers. Every draw is a pure function
// of (seed, stream, counter), so sample sets are stable no matter how the
// evaluation is ordered or distributed.
#pragma once

#include <cstdint>

namespace tsb {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return splitmix64(base_ + counter * 0x9E3779B97F4A7C15ull);
    }

    // uniform in [0, 1)
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    CounterRng substream(std::uint64_t stream) const {
        CounterRng r(0, 0);
        r.base_ = splitmix64(base_ ^ splitmix64(stream + 0xD1B54A32D192ED03ull));
        return r;
    }

  private:
    std::uint64_t base_;
};

} // namespace tsb
