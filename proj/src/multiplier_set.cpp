#include "torusdec/multiplier_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "torusdec/error.hpp"
#include "rng.hpp"

namespace torusdec {

MultiplierSet::MultiplierSet(std::int64_t scale, std::vector<std::int64_t> elements)
    : scale_(scale), elements_(std::move(elements)) {
  if (scale_ < 1) throw InvalidInput("multiplier set: L must be positive");
  if (elements_.empty()) throw InvalidInput("multiplier set: S must be non-empty");
  std::sort(elements_.begin(), elements_.end());
  if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
    throw InvalidInput("multiplier set: duplicate element");
  if (elements_.front() < scale_ || elements_.back() > 2 * scale_)
    throw InvalidInput("multiplier set: element outside [L, 2L]");
}

MultiplierSet generate_multipliers(const MultiplierSpec& spec, std::int64_t scale) {
  if (scale < 2) throw InvalidInput("generate: L must be >= 2");
  std::vector<std::int64_t> out;
  switch (spec.kind) {
    case MultiplierKind::kFull:
      out.resize(static_cast<std::size_t>(scale + 1));
      std::iota(out.begin(), out.end(), scale);
      break;
    case MultiplierKind::kProgression:
      if (spec.step < 1) throw InvalidInput("generate: progression step must be >= 1");
      for (std::int64_t v = scale; v <= 2 * scale; v += spec.step) out.push_back(v);
      break;
    case MultiplierKind::kDyadicLacunary:
      out.push_back(scale);
      for (std::int64_t p = 1; p <= scale; p *= 2) out.push_back(scale + p);
      break;
    case MultiplierKind::kRandom: {
      if (!(spec.beta > 0.0 && spec.beta <= 1.0))
        throw InvalidInput("generate: beta must lie in (0, 1]");
      // L^beta is often an exact integer mathematically; absorb pow() noise.
      const double target = std::pow(static_cast<double>(scale), spec.beta);
      const auto count = static_cast<std::int64_t>(std::ceil(target - 1e-9));
      if (count > scale + 1)
        throw InvalidInput("generate: requested cardinality " + std::to_string(count) +
                           " exceeds L+1");
      std::vector<std::int64_t> pool(static_cast<std::size_t>(scale + 1));
      std::iota(pool.begin(), pool.end(), scale);
      SplitRng rng(spec.seed);
      for (std::int64_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(scale + 1 - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      }
      out.assign(pool.begin(), pool.begin() + count);
      break;
    }
  }
  return MultiplierSet(scale, std::move(out));
}

RegularityCertificate regularity_constant(const MultiplierSet& set, double lambda,
                                          double scale_r) {
  const auto L = static_cast<double>(set.scale());
  if (!(lambda > 0.0)) throw InvalidInput("regularity: lambda must be positive");
  if (!(scale_r >= 1.0 && scale_r <= L)) throw InvalidInput("regularity: need 1 <= r <= L");

  const auto elems = set.elements();
  const auto total = static_cast<double>(elems.size());
  RegularityCertificate best{lambda, scale_r, -1.0, 0.0, 0.0, 0};

  // The supremum is attained by an interval spanning elements s_i..s_j,
  // widened to length r when shorter, so scanning element pairs is exhaustive.
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (std::size_t j = i; j < elems.size(); ++j) {
      const double span = static_cast<double>(elems[j] - elems[i]);
      const double length = std::max(span, scale_r);
      const auto count = j - i + 1;
      const double value = static_cast<double>(count) / total * std::pow(L / length, lambda);
      // Placement inside [L, 2L]: start at s_i unless that overflows 2L.
      const double left = std::min(static_cast<double>(elems[i]), 2.0 * L - length);
      const double tol = 1e-12 * std::max(1.0, std::abs(value));
      const bool better = value > best.c_tilde + tol;
      const bool tie = std::abs(value - best.c_tilde) <= tol &&
                       (left < best.witness_left ||
                        (left == best.witness_left && length < best.witness_length));
      if (better || tie) {
        if (better) best.c_tilde = value;
        best.witness_left = left;
        best.witness_length = length;
        best.witness_count = count;
      }
    }
  }
  return best;
}

bool is_regular(const MultiplierSet& set, double c_tilde, double lambda, double scale_r) {
  return c_tilde >= regularity_constant(set, lambda, scale_r).c_tilde;
}

}  // namespace torusdec
