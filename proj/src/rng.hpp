#ifndef TORUSDEC_SRC_RNG_HPP_
#define TORUSDEC_SRC_RNG_HPP_

#include <cstdint>
#include <random>

namespace torusdec {

// mt19937_64 with portable bounded/real draws. std::*_distribution output is
// implementation-defined, which would break cross-toolchain reproducibility.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound), bound > 0, by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace torusdec

#endif  // TORUSDEC_SRC_RNG_HPP_
