#pragma once

// Portable seeded randomness. The engine is std::mt19937_64 (its output
// sequence is fixed by the C++ standard). Derived draws avoid the
// implementation-defined std distributions:
//   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
//   index(n)   = min(n - 1, floor(uniform() * n))
//   shuffle    = Fisher-Yates from the back, swapping i with index(i + 1)
// Any implementation reproducing these three rules reproduces our instances.

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ramified/measure.hpp"

namespace ramified {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// `count` atoms uniform in the axis-aligned box [lo, hi] with masses drawn as
/// 0.05 + uniform() and normalized (the last mass absorbs the rounding).
AtomicMeasure random_measure(Rng& rng, std::size_t count, const Point& lo,
                             const Point& hi);

/// `count` atoms uniform in the box, each with mass 1 / count.
AtomicMeasure uniform_cloud(Rng& rng, std::size_t count, const Point& lo,
                            const Point& hi);

}  // namespace ramified
