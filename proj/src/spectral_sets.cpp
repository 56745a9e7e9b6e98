#include "torusdec/spectral_sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "torusdec/error.hpp"

namespace torusdec {

FrequencySet::FrequencySet(double window_n, double sep_m, std::vector<std::int64_t> elements,
                           bool separated)
    : window_n_(window_n), sep_m_(sep_m), elements_(std::move(elements)), separated_(separated) {
  std::sort(elements_.begin(), elements_.end());
  if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
    throw InvalidInput("frequency set: duplicate element");
  for (const std::int64_t a : elements_) {
    if (a == 0) throw InvalidInput("frequency set: 0 is not allowed");
    if (std::abs(static_cast<double>(a)) > window_n_)
      throw InvalidInput("frequency set: element " + std::to_string(a) + " outside window");
  }
  if (separated_)
    for (std::size_t i = 1; i < elements_.size(); ++i)
      if (!(static_cast<double>(elements_[i] - elements_[i - 1]) > sep_m_))
        throw InvalidInput("frequency set: elements not separated");
}

bool FrequencySet::contains(std::int64_t a) const {
  return std::binary_search(elements_.begin(), elements_.end(), a);
}

namespace {

template <typename Coeff>
FrequencySet level_set_impl(const Coeff& coeff, double delta, double window_n, double sep_m) {
  if (!(delta > 0.0)) throw InvalidInput("level set: delta must be positive");
  const auto n = static_cast<std::int64_t>(std::floor(window_n));
  std::vector<std::int64_t> out;
  for (std::int64_t a = -n; a <= n; ++a)
    if (a != 0 && std::abs(coeff(a)) > delta) out.push_back(a);
  return FrequencySet(window_n, sep_m, std::move(out));
}

}  // namespace

FrequencySet level_set(const Spectrum& spec, double delta, double window_n, double sep_m) {
  if (window_n > static_cast<double>(spec.n_max()))
    throw InvalidInput("level set: N exceeds spectrum window");
  return level_set_impl(spec, delta, window_n, sep_m);
}

FrequencySet level_set(const FourierTable& table, double delta, double window_n, double sep_m) {
  return level_set_impl(table, delta, window_n, sep_m);
}

CoverReport covering_number_real(std::vector<double> points, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("covering: M must be positive");
  std::sort(points.begin(), points.end());
  CoverReport rep;
  rep.radius = radius;
  std::size_t i = 0;
  while (i < points.size()) {
    const double first = points[i];
    std::size_t j = i;
    while (j + 1 < points.size() && points[j + 1] - first < 2.0 * radius) ++j;
    rep.centers.push_back(0.5 * (first + points[j]));
    i = j + 1;
  }
  rep.count = rep.centers.size();
  return rep;
}

CoverReport covering_number(std::span<const std::int64_t> points, double radius) {
  std::vector<double> p(points.begin(), points.end());
  return covering_number_real(std::move(p), radius);
}

CoverReport covering_number(const FrequencySet& a, double radius) {
  return covering_number(a.elements(), radius);
}

std::vector<std::int64_t> max_separated_subset(std::span<const std::int64_t> points, double sep) {
  if (!(sep > 0.0)) throw InvalidInput("separated subset: M must be positive");
  std::vector<std::int64_t> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::int64_t> out;
  for (const std::int64_t p : sorted)
    if (out.empty() || static_cast<double>(p - out.back()) > sep) out.push_back(p);
  return out;
}

FrequencySet max_separated_subset(const FrequencySet& a, double sep) {
  return FrequencySet(a.window_n(), sep, max_separated_subset(a.elements(), sep), true);
}

NeighborhoodUnion neighborhood_union(std::span<const std::int64_t> points, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("neighborhood: M must be positive");
  std::vector<std::int64_t> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  NeighborhoodUnion out;
  for (const std::int64_t p : sorted) {
    const double lo = static_cast<double>(p) - radius;
    const double hi = static_cast<double>(p) + radius;
    if (!out.intervals.empty() && lo < out.intervals.back().second)
      out.intervals.back().second = std::max(out.intervals.back().second, hi);
    else
      out.intervals.emplace_back(lo, hi);
  }
  for (const auto& [lo, hi] : out.intervals) out.total_length += hi - lo;
  return out;
}

double dimension_stat(const Spectrum& spec, double delta, double window_n, double sep_m) {
  if (!(window_n > sep_m && sep_m > 0.0)) throw InvalidInput("dimension: need N > M > 0");
  const auto set = level_set(spec, delta, window_n, sep_m);
  if (set.empty()) return 0.0;
  const auto count = covering_number(set, sep_m).count;
  return std::log(static_cast<double>(count)) / std::log(window_n / sep_m);
}

std::vector<std::int64_t> difference_set(std::span<const std::int64_t> a,
                                         std::span<const std::int64_t> b) {
  std::vector<std::int64_t> out;
  out.reserve(a.size() * b.size());
  for (const std::int64_t x : a)
    for (const std::int64_t y : b) out.push_back(x - y);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace torusdec
