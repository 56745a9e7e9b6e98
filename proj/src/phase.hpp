#ifndef TORUSDEC_SRC_PHASE_HPP_
#define TORUSDEC_SRC_PHASE_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace torusdec {

struct PhaseSelection {
  double theta = 0.0;
  std::vector<std::int64_t> kept;  // sorted
};

// Largest set of coefficients whose arguments fit in a quarter turn
// [phi, phi + pi/2); theta rotates that window onto [-pi/4, pi/4), so
// Re(e^{i theta} z) >= |z| cos(pi/4) on the kept set. Ties go to the
// smallest starting argument.
inline PhaseSelection phase_align(const std::vector<std::pair<std::int64_t, std::complex<double>>>& coeffs) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::pair<double, std::int64_t>> args;
  args.reserve(coeffs.size());
  for (const auto& [a, z] : coeffs) {
    double phi = std::arg(z);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi -= two_pi;
    args.emplace_back(phi, a);
  }
  std::sort(args.begin(), args.end());
  PhaseSelection out;
  if (args.empty()) return out;
  const std::size_t n = args.size();
  std::size_t best_start = 0, best_count = 0;
  // Two-pointer sweep over the doubled circle.
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j < i + n) {
      const double phi_j = args[j % n].first + (j >= n ? two_pi : 0.0);
      if (phi_j - args[i].first < std::numbers::pi / 2.0) ++j;
      else break;
    }
    if (j - i > best_count) {
      best_count = j - i;
      best_start = i;
    }
  }
  out.theta = -(args[best_start].first + std::numbers::pi / 4.0);
  for (std::size_t k = best_start; k < best_start + best_count; ++k) out.kept.push_back(args[k % n].second);
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

}  // namespace torusdec

#endif  // TORUSDEC_SRC_PHASE_HPP_
