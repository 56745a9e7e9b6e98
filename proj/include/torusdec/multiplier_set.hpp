#ifndef TORUSDEC_MULTIPLIER_SET_HPP_
#define TORUSDEC_MULTIPLIER_SET_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace torusdec {

// A finite set S of integers inside [L, 2L], sorted and duplicate free.
class MultiplierSet {
 public:
  // Throws InvalidInput unless every element lies in [L, 2L] and the set is
  // non-empty. Input order does not matter; duplicates are rejected.
  MultiplierSet(std::int64_t scale, std::vector<std::int64_t> elements);

  std::int64_t scale() const { return scale_; }
  std::span<const std::int64_t> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::int64_t max_element() const { return elements_.back(); }

  bool operator==(const MultiplierSet&) const = default;

 private:
  std::int64_t scale_;
  std::vector<std::int64_t> elements_;
};

enum class MultiplierKind { kRandom, kFull, kProgression, kDyadicLacunary };

struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::kFull;
  double beta = 1.0;       // kRandom: |S| = ceil(L^beta)
  std::uint64_t seed = 0;  // kRandom
  std::int64_t step = 1;   // kProgression
};

// Instance generator. kDyadicLacunary yields {L} U {L + 2^i : 2^i <= L}.
MultiplierSet generate_multipliers(const MultiplierSpec& spec, std::int64_t scale);

// Result of certifying (C~, lambda)-regularity at scale r: the least C~ with
// |I n S| <= C~ (|I|/L)^lambda |S| for all real intervals I in [L, 2L] with
// |I| >= r, and an interval [witness_left, witness_left + witness_length]
// attaining it.
struct RegularityCertificate {
  double lambda = 0.0;
  double scale_r = 1.0;
  double c_tilde = 0.0;
  double witness_left = 0.0;
  double witness_length = 0.0;
  std::size_t witness_count = 0;
};

RegularityCertificate regularity_constant(const MultiplierSet& set, double lambda,
                                          double scale_r = 1.0);

bool is_regular(const MultiplierSet& set, double c_tilde, double lambda, double scale_r = 1.0);

}  // namespace torusdec

#endif  // TORUSDEC_MULTIPLIER_SET_HPP_
