#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "mstcam/cube.hpp"

namespace mstcam::detail {

// Distribution helpers written out so streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Word bits(int width) { return static_cast<Word>(engine_()) & low_mask(width); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mstcam::detail
