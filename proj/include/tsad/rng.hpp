#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace tsad {

// Portable pseudo-random source. Every synthetic corpus, tree and weight
// initialization in this project draws from it, so the exact algorithm is fixed:
//   engine   std::mt19937_64 seeded with the 64-bit seed (output fixed by the C++ standard)
//   uniform  (next() >> 11) * 2^-53, in [0, 1)
//   index(n) rejection sampling on next() below the largest multiple of n
//   normal   Box-Muller: u1 = 1 - uniform(), u2 = uniform(),
//            z0 = sqrt(-2 ln u1) cos(2 pi u2) returned first, z1 = ... sin(...) cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t index(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace tsad
