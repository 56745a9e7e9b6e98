#include "torusdec/granulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "phase.hpp"
#include "torusdec/error.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {
namespace {

std::int64_t wrap(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

// Largest integer offset d (in cells) with d < radius * q.
std::int64_t open_ball_cells(double radius, std::int64_t q) {
  const double r = radius * static_cast<double>(q);
  const double nearest = std::round(r);
  if (std::abs(r - nearest) < 1e-9) return static_cast<std::int64_t>(nearest) - 1;
  return static_cast<std::int64_t>(std::floor(r));
}

double circular_sum(const std::vector<double>& prefix, std::int64_t q, std::int64_t lo,
                    std::int64_t hi) {
  if (hi - lo + 1 >= q) return prefix.back();
  const std::int64_t a = wrap(lo, q);
  const std::int64_t b = wrap(hi, q);
  if (a <= b) return prefix[static_cast<std::size_t>(b + 1)] - prefix[static_cast<std::size_t>(a)];
  return prefix.back() - prefix[static_cast<std::size_t>(a)] + prefix[static_cast<std::size_t>(b + 1)];
}

std::vector<double> prefix_sums(std::span<const double> w) {
  std::vector<double> p(w.size() + 1, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) p[i + 1] = p[i] + w[i];
  return p;
}

}  // namespace

WindowBump build_window_bump(double n_window, std::int64_t q, double radius_factor) {
  if (!(n_window >= 1.0)) throw InvalidInput("window bump: N must be >= 1");
  if (static_cast<double>(q) < 16.0 * n_window)
    throw InvalidInput("window bump: grid too coarse, need Q >= 16 N");
  if (!(radius_factor > 0.0 && radius_factor < 0.25))
    throw InvalidInput("window bump: radius factor must lie in (0, 1/4)");
  WindowBump w;
  w.n_window = n_window;
  w.grid_q = q;
  w.radius_factor = radius_factor;
  const double qd = static_cast<double>(q);
  w.f2_radius = std::max(radius_factor / n_window, 2.0 / qd);
  const double r_cells = w.f2_radius * qd;
  const auto half = static_cast<std::int64_t>(std::floor(r_cells));

  std::vector<double> f2(static_cast<std::size_t>(2 * half + 1));
  for (std::int64_t k = -half; k <= half; ++k) {
    const double u = static_cast<double>(k) / r_cells;
    f2[static_cast<std::size_t>(k + half)] = std::pow(std::max(0.0, 1.0 - u * u), 4);
  }
  const double f2_sum = std::accumulate(f2.begin(), f2.end(), 0.0);
  for (double& v : f2) v *= qd / f2_sum;

  // F(x) = (1/Q) sum_y F2(y) F2(x - y); F2 is symmetric.
  w.samples.assign(static_cast<std::size_t>(q), 0.0);
  for (std::int64_t x = -2 * half; x <= 2 * half; ++x) {
    double acc = 0.0;
    for (std::int64_t y = std::max(-half, x - half); y <= std::min(half, x + half); ++y)
      acc += f2[static_cast<std::size_t>(y + half)] * f2[static_cast<std::size_t>(x - y + half)];
    w.samples[static_cast<std::size_t>(wrap(x, q))] += acc / qd;
  }
  const double total = std::accumulate(w.samples.begin(), w.samples.end(), 0.0);
  for (double& v : w.samples) v *= qd / total;

  std::int64_t support = 0;
  for (std::int64_t x = 0; x <= 2 * half; ++x)
    if (w.samples[static_cast<std::size_t>(wrap(x, q))] > 0.0) support = x;
  w.support_radius = static_cast<double>(support) / qd;
  if (!(w.support_radius < 1.0 / n_window))
    throw ExtractionFailed("window bump: support radius " + std::to_string(w.support_radius) +
                           " is not below 1/N");

  const auto spec = fft::forward_real(w.samples);
  w.spectrum.resize(static_cast<std::size_t>(q));
  for (std::int64_t a = 0; a < q; ++a) w.spectrum[static_cast<std::size_t>(a)] = spec[static_cast<std::size_t>(a)].real() / qd;
  w.spectrum[0] = 1.0;
  w.min_spectrum = *std::min_element(w.spectrum.begin(), w.spectrum.end());
  for (std::int64_t a = 0; a < q; ++a)
    if (w.spectrum[static_cast<std::size_t>(a)] < -1e-12)
      throw ExtractionFailed("window bump: F^(" + std::to_string(a) + ") = " +
                             std::to_string(w.spectrum[static_cast<std::size_t>(a)]) + " < 0");
  const auto nn = static_cast<std::int64_t>(std::floor(n_window));
  w.min_spectrum_window = 1.0;
  for (std::int64_t a = -nn; a <= nn; ++a) {
    const double v = w.spectrum[static_cast<std::size_t>(wrap(a, q))];
    w.min_spectrum_window = std::min(w.min_spectrum_window, v);
    if (v < 0.5)
      throw ExtractionFailed("window bump: F^(" + std::to_string(a) + ") = " + std::to_string(v) +
                             " < 1/2 inside the window");
  }
  w.c1 = *std::max_element(w.samples.begin(), w.samples.end()) / n_window;
  return w;
}

double granulation_c2() {
  // k points with consecutive gaps > 1 need an interval longer than k - 1,
  // so they fit in [-1, 1] (length 2) iff k - 1 < 2.
  int k = 1;
  while (static_cast<double>(k) < 2.0) ++k;
  return 10.0 * static_cast<double>(k);
}

std::size_t granulation_cover(const GridMeasure& mu, double n, double m, double t) {
  const FourierTable table = fourier_table(mu);
  const auto nn = static_cast<std::int64_t>(std::floor(n));
  std::vector<std::int64_t> set;
  for (std::int64_t a = -nn; a <= nn; ++a)
    if (std::abs(table(a)) > t) set.push_back(a);
  return covering_number(set, m).count;
}

std::vector<bool> union_mask(std::int64_t q, const std::vector<std::int64_t>& points,
                             double radius) {
  std::vector<bool> mask(static_cast<std::size_t>(q), false);
  const std::int64_t d = open_ball_cells(radius, q);
  if (d < 0) return mask;
  for (const std::int64_t x : points) {
    if (2 * d + 1 >= q) {
      std::fill(mask.begin(), mask.end(), true);
      break;
    }
    for (std::int64_t j = x - d; j <= x + d; ++j) mask[static_cast<std::size_t>(wrap(j, q))] = true;
  }
  return mask;
}

double union_mass(const GridMeasure& mu, const std::vector<std::int64_t>& points, double radius) {
  const std::int64_t q = mu.q();
  const std::int64_t d = open_ball_cells(radius, q);
  if (d < 0 || points.empty()) return 0.0;
  // Merge the closed index intervals [x - d, x + d] around the circle.
  std::vector<std::int64_t> xs;
  for (const std::int64_t x : points) xs.push_back(wrap(x, q));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> merged;
  for (const std::int64_t x : xs) {
    const std::int64_t lo = x - d;
    const std::int64_t hi = x + d;
    if (!merged.empty() && lo <= merged.back().second + 1)
      merged.back().second = std::max(merged.back().second, hi);
    else
      merged.emplace_back(lo, hi);
  }
  // The last interval may wrap onto the first one.
  if (merged.size() > 1 && merged.back().second + 1 >= merged.front().first + q) {
    merged.front().first = merged.back().first - q;
    merged.front().second = std::max(merged.front().second, merged.back().second - q);
    merged.pop_back();
  }
  const auto prefix = prefix_sums(mu.weights());
  double total = 0.0;
  for (const auto& [lo, hi] : merged) total += circular_sum(prefix, q, lo, hi);
  return std::min(total, prefix.back());
}

GranuleFamily granulate(const GridMeasure& mu, double n, double m, double t, double s) {
  if (std::abs(mu.mass() - 1.0) > 1e-9) throw InvalidInput("granulate: mu must be a probability measure");
  if (!(m >= 1.0 && std::floor(m) == m)) throw InvalidInput("granulate: M must be a positive integer");
  if (!(n >= 2.0 * m)) throw InvalidInput("granulate: need N >= 2M");
  if (!(t > 0.0 && s > 0.0)) throw InvalidInput("granulate: t and s must be positive");
  const std::int64_t q = mu.q();
  const auto mi = static_cast<std::int64_t>(m);
  const WindowBump bump = build_window_bump(n, q);

  GranuleFamily fam;
  fam.grid_q = q;
  fam.m = m;
  fam.n = n;
  fam.sep = 1.0 / m;
  fam.radius = 1.0 / n;
  fam.t = t;
  fam.s = s;
  GranulationTrace& tr = fam.trace;
  tr.cube_scale = 1.0 / m;

  const FourierTable table = fourier_table(mu);
  const auto nn = static_cast<std::int64_t>(std::floor(n));
  std::vector<std::int64_t> big;
  for (std::int64_t a = -nn; a <= nn; ++a)
    if (std::abs(table(a)) > t) big.push_back(a);
  tr.hypothesis_cover = covering_number(big, m).count;
  tr.hypothesis_need = s * n / m;
  if (!(static_cast<double>(tr.hypothesis_cover) > tr.hypothesis_need))
    throw HypothesisFailed("granulate: N({|mu^(a)| > t} n [-N, N]; M) = " +
                           std::to_string(tr.hypothesis_cover) + " is not above s N/M = " +
                           std::to_string(tr.hypothesis_need));

  const auto a_tilde = max_separated_subset(big, m);
  tr.separated_size = a_tilde.size();
  std::vector<std::pair<std::int64_t, Complex>> coeffs;
  for (const std::int64_t a : a_tilde) coeffs.emplace_back(a, table(a));
  const PhaseSelection phase = phase_align(coeffs);
  tr.theta = phase.theta;
  tr.aligned_size = phase.kept.size();
  const Complex rot = std::polar(1.0, tr.theta);
  for (const std::int64_t a : phase.kept)
    if (!((rot * table(a)).real() > t / 2.0))
      throw InternalAssertion("granulate: phase alignment failed at a = " + std::to_string(a));

  auto g = fft::circular_convolve(mu.weights(), bump.samples);
  for (double& v : g) v = std::max(v, 0.0);

  tr.c1 = bump.c1;
  tr.c2 = granulation_c2();
  tr.c3 = std::sqrt(tr.c1 * tr.c2);
  tr.select_threshold = t * s / (32.0 * tr.c3);

  const auto prefix = prefix_sums(mu.weights());
  const double cap = tr.c1 * n;
  for (std::int64_t i = 0; i < mi; ++i) {
    CubeRecord c;
    c.index = i;
    c.center = (static_cast<double>(i) + 0.5) / m;
    // Grid points j with j/Q in [i/M, (i+1)/M).
    const std::int64_t lo = (i * q + mi - 1) / mi;
    const std::int64_t hi = ((i + 1) * q + mi - 1) / mi;
    c.argmax = lo;
    for (std::int64_t j = lo; j < hi; ++j)
      if (g[static_cast<std::size_t>(j)] > c.g_max) {
        c.g_max = g[static_cast<std::size_t>(j)];
        c.argmax = j;
      }
    // Open ball B(c_i, 1/M): |2Mj - (2i+1)Q| < 2Q.
    const std::int64_t num_lo = (2 * i - 1) * q;
    const std::int64_t num_hi = (2 * i + 3) * q;
    const std::int64_t den = 2 * mi;
    const std::int64_t j_lo = (num_lo >= 0 ? num_lo / den : -((-num_lo + den - 1) / den)) + 1;
    const std::int64_t j_hi = (num_hi + den - 1) / den - 1;
    c.ball_mass = circular_sum(prefix, q, j_lo, j_hi);
    if (c.ball_mass > 0.0) {
      c.h_ratio = c.g_max / (cap * c.ball_mass);
    } else if (c.g_max > 1e-12) {
      throw InternalAssertion("granulate: positive density in a cube with empty ball");
    }
    if (c.h_ratio > 1.0 + 1e-9)
      throw InternalAssertion("granulate: H_" + std::to_string(i) + " = " +
                              std::to_string(c.h_ratio) + " exceeds 1");
    c.h_ratio = std::min(c.h_ratio, 1.0);
    if (std::sqrt(c.h_ratio) > tr.select_threshold) tr.selected.push_back(i);
    tr.cubes.push_back(c);
  }

  // Non-adjacent cube families; an odd cycle of cubes needs three.
  std::vector<std::vector<std::int64_t>> families;
  if (mi == 1) {
    families.resize(1);
  } else if (mi % 2 == 0) {
    families.resize(2);
  } else {
    families.resize(3);
  }
  for (const std::int64_t i : tr.selected) {
    std::size_t f = static_cast<std::size_t>(i % 2);
    if (mi == 1) f = 0;
    else if (mi % 2 == 1 && i == mi - 1) f = 2;
    families[f].push_back(tr.cubes[static_cast<std::size_t>(i)].argmax);
  }
  tr.families = static_cast<int>(families.size());
  for (const auto& fpts : families) tr.family_masses.push_back(union_mass(mu, fpts, fam.radius));
  tr.chosen_family = static_cast<std::size_t>(
      std::max_element(tr.family_masses.begin(), tr.family_masses.end()) - tr.family_masses.begin());
  fam.points = families[tr.chosen_family];
  fam.captured_mass = tr.family_masses[tr.chosen_family];

  const double ts3 = std::pow(t * s, 3);
  tr.bound = ts3 / (static_cast<double>(tr.families) * std::pow(2.0, 15) * std::pow(tr.c3, 3));
  tr.ref_bound_2d = ts3 / (std::pow(2.0, 16) * std::pow(tr.c3, 3));
  if (!(fam.captured_mass > tr.bound))
    throw InternalAssertion("granulate: captured mass " + std::to_string(fam.captured_mass) +
                            " is not above the bound " + std::to_string(tr.bound));
  return fam;
}

bool FamilyReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const FamilyCheck& c) { return c.holds; });
}

FamilyReport verify_family(const GranuleFamily& fam, const GridMeasure& mu) {
  FamilyReport rep;
  const std::int64_t q = mu.q();
  std::vector<std::int64_t> pts;
  for (const std::int64_t x : fam.points) pts.push_back(wrap(x, q));
  std::sort(pts.begin(), pts.end());
  // On a circle the closest pair is adjacent in cyclic order.
  double min_gap = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts.size() < 2) break;
    const std::int64_t next = i + 1 < pts.size() ? pts[i + 1] : pts[0] + q;
    min_gap = std::min(min_gap, torus_distance(q, pts[i], next));
  }
  bool sep_ok = true;
  if (pts.size() >= 2) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::int64_t next = i + 1 < pts.size() ? pts[i + 1] : pts[0] + q;
      const std::int64_t d = std::min(next - pts[i], q - (next - pts[i]));
      // d/Q > sep in exact arithmetic when sep = 1/M.
      if (!(static_cast<double>(d) * fam.m > static_cast<double>(q))) sep_ok = false;
    }
  }
  rep.checks.push_back({"separation > 1/M", sep_ok, min_gap, fam.sep});

  double mask_mass = 0.0;
  const auto mask = union_mask(q, fam.points, fam.radius);
  for (std::int64_t j = 0; j < q; ++j)
    if (mask[static_cast<std::size_t>(j)]) mask_mass += mu.weight(j);
  rep.recomputed_mass = mask_mass;
  rep.checks.push_back({"union mass matches", std::abs(mask_mass - fam.captured_mass) <= 1e-12,
                        mask_mass, fam.captured_mass});
  const double ts3 = std::pow(fam.t * fam.s, 3);
  const double c3 = fam.trace.c3;
  const double bound = c3 > 0.0 ? ts3 / (static_cast<double>(std::max(fam.trace.families, 1)) *
                                         std::pow(2.0, 15) * std::pow(c3, 3))
                                : 0.0;
  rep.checks.push_back({"mass > (ts)^3 bound", mask_mass > bound, mask_mass, bound});
  return rep;
}

}  // namespace torusdec
