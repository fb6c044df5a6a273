#pragma once

#include <cstdint>
#include <random>

namespace bridgeblock {

// Named, counter-based stream of randomness.  Streams derived from the same
// master seed but different id tuples are independent, so runs are
// reproducible regardless of how work is ordered across (chain, sweep, block).
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  // Derive a child stream from this stream's seed and an id tuple.
  template <class... Ids>
  RngStream fork(Ids... ids) const {
    std::uint64_t s = seed_;
    ((s = mix(s ^ static_cast<std::uint64_t>(ids))), ...);
    return RngStream(s, tag{});
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  long poisson(double rate) {
    if (rate <= 0.0) return 0;
    return std::poisson_distribution<long>(rate)(engine_);
  }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

private:
  struct tag {};
  RngStream(std::uint64_t s, tag) : seed_(s), engine_(mix(s)) {}

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace bridgeblock
