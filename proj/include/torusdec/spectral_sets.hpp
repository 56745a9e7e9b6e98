#ifndef TORUSDEC_SPECTRAL_SETS_HPP_
#define TORUSDEC_SPECTRAL_SETS_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "torusdec/measure.hpp"

namespace torusdec {

// Sorted distinct nonzero integer frequencies inside [-window_n, window_n].
class FrequencySet {
 public:
  FrequencySet() = default;
  // Sorts and validates; throws InvalidInput on duplicates, zero, or |a| > N.
  // When separated is set, pairwise gaps must exceed sep_m.
  FrequencySet(double window_n, double sep_m, std::vector<std::int64_t> elements,
               bool separated = false);

  double window_n() const { return window_n_; }
  double sep_m() const { return sep_m_; }
  bool separated() const { return separated_; }
  std::span<const std::int64_t> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  bool contains(std::int64_t a) const;

 private:
  double window_n_ = 0.0;
  double sep_m_ = 0.0;
  std::vector<std::int64_t> elements_;
  bool separated_ = false;
};

struct CoverReport {
  std::size_t count = 0;
  std::vector<double> centers;
  double radius = 0.0;
};

// {a : 0 < |a| <= N, |spec(a)| > delta}.
FrequencySet level_set(const Spectrum& spec, double delta, double window_n, double sep_m = 1.0);
FrequencySet level_set(const FourierTable& table, double delta, double window_n,
                       double sep_m = 1.0);

// Minimal number of open radius-M balls with real centers covering the points.
CoverReport covering_number(std::span<const std::int64_t> points, double radius);
CoverReport covering_number(const FrequencySet& a, double radius);
CoverReport covering_number_real(std::vector<double> points, double radius);

// Largest subset whose pairwise gaps are strictly greater than M.
FrequencySet max_separated_subset(const FrequencySet& a, double sep);
std::vector<std::int64_t> max_separated_subset(std::span<const std::int64_t> points, double sep);

struct NeighborhoodUnion {
  double total_length = 0.0;
  std::vector<std::pair<double, double>> intervals;
};

// Union of open intervals (a - M, a + M).
NeighborhoodUnion neighborhood_union(std::span<const std::int64_t> points, double radius);

// log(covering count of the level set at scale M) / log(N/M), 0 when empty.
double dimension_stat(const Spectrum& spec, double delta, double window_n, double sep_m);

// Difference set {a - b}, sorted and distinct.
std::vector<std::int64_t> difference_set(std::span<const std::int64_t> a,
                                         std::span<const std::int64_t> b);

}  // namespace torusdec

#endif  // TORUSDEC_SPECTRAL_SETS_HPP_
