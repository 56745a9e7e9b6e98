#include "torusdec/addcomb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "phase.hpp"
#include "rng.hpp"
#include "torusdec/error.hpp"

namespace torusdec {

std::vector<std::size_t> markov_select(std::span<const double> values, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("markov: alpha must lie in [0, 1]");
  double sum = 0.0;
  for (const double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("markov: values must lie in [0, 1]");
    sum += v;
  }
  const double need = alpha * static_cast<double>(values.size());
  if (sum < need - 1e-12)
    throw HypothesisFailed("markov: sum " + std::to_string(sum) + " is below alpha*n = " +
                           std::to_string(need) + " (deficit " + std::to_string(need - sum) + ")");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= alpha / 2.0) out.push_back(i);
  if (static_cast<double>(out.size()) < alpha / 2.0 * static_cast<double>(values.size()))
    throw InternalAssertion("markov: conclusion violated");
  return out;
}

RuzsaCheck ruzsa_bound_check(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                             std::span<const std::int64_t> c) {
  std::set<std::int64_t> cs(c.begin(), c.end());
  if (cs.empty()) throw InvalidInput("ruzsa: C must be non-empty");
  std::vector<std::int64_t> cu(cs.begin(), cs.end());
  RuzsaCheck r;
  r.diff_ab = difference_set(a, b).size();
  r.diff_ac = difference_set(a, cu).size();
  r.diff_bc = difference_set(b, cu).size();
  r.size_c = cu.size();
  r.rhs = static_cast<double>(r.diff_ac) * static_cast<double>(r.diff_bc) /
          static_cast<double>(r.size_c);
  // Integer comparison: |A-B| |C| <= |A-C| |B-C|.
  r.holds = static_cast<unsigned __int128>(r.diff_ab) * r.size_c <=
            static_cast<unsigned __int128>(r.diff_ac) * r.diff_bc;
  return r;
}

namespace {

class BitRows {
 public:
  BitRows(std::size_t rows, std::size_t cols)
      : words_((cols + 63) / 64), data_(rows * words_, 0) {}
  void set(std::size_t r, std::size_t c) { data_[r * words_ + c / 64] |= 1ULL << (c % 64); }
  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * words_ + c / 64] >> (c % 64)) & 1ULL;
  }
  std::uint64_t common(std::size_t r1, std::size_t r2) const {
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < words_; ++w)
      total += static_cast<std::uint64_t>(std::popcount(data_[r1 * words_ + w] & data_[r2 * words_ + w]));
    return total;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> data_;
};

BitRows adjacency(const BipartiteGraph& g) {
  BitRows adj(g.part_a.size(), g.part_b.size());
  for (const auto& [i, j] : g.edges) adj.set(i, j);
  return adj;
}

// codeg[a][a1] = |N(a) n N(a1)|.
std::vector<std::uint64_t> codegrees(const BitRows& adj, std::size_t na) {
  std::vector<std::uint64_t> out(na * na);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = i; j < na; ++j) out[i * na + j] = out[j * na + i] = adj.common(i, j);
  return out;
}

}  // namespace

void validate_graph(const BipartiteGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : g.edges) {
    if (e.first >= g.part_a.size() || e.second >= g.part_b.size())
      throw InvalidInput("graph: edge endpoint out of range");
    if (!seen.insert(e).second) throw InvalidInput("graph: duplicate edge");
  }
}

std::vector<std::uint64_t> path3_counts(const BipartiteGraph& g) {
  const std::size_t na = g.part_a.size();
  const std::size_t nb = g.part_b.size();
  const BitRows adj = adjacency(g);
  const auto codeg = codegrees(adj, na);
  std::vector<std::uint64_t> out(na * nb, 0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t a1 = 0; a1 < na; ++a1) {
      const std::uint64_t c = codeg[a * na + a1];
      if (c == 0) continue;
      for (std::size_t b = 0; b < nb; ++b)
        if (adj.get(a1, b)) out[a * nb + b] += c;
    }
  return out;
}

BsgCertificate verify_bsg(const BipartiteGraph& g, double k, std::span<const std::size_t> a_prime,
                          std::span<const std::size_t> b_prime) {
  const std::size_t na = g.part_a.size();
  const std::size_t nb = g.part_b.size();
  const BitRows adj = adjacency(g);
  BsgCertificate c;
  c.n = na;
  c.k = k;
  const double n = static_cast<double>(na);
  c.need_a = n / (16.0 * k * k);
  c.need_b = n / (4.0 * k);
  c.need_cross = static_cast<double>(a_prime.size()) * static_cast<double>(b_prime.size()) / (4.0 * k);
  c.need_paths = n * n / (4096.0 * std::pow(k, 5));
  for (const std::size_t a : a_prime)
    for (const std::size_t b : b_prime) c.cross_edges += adj.get(a, b) ? 1 : 0;

  // Walks from each a in A' to every b, via codegrees restricted to row a.
  c.min_paths = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> walks(nb);
  for (const std::size_t a : a_prime) {
    std::fill(walks.begin(), walks.end(), 0);
    for (std::size_t a1 = 0; a1 < na; ++a1) {
      const std::uint64_t cd = adj.common(a, a1);
      if (cd == 0) continue;
      for (const std::size_t b : b_prime)
        if (adj.get(a1, b)) walks[b] += cd;
    }
    for (const std::size_t b : b_prime) c.min_paths = std::min(c.min_paths, walks[b]);
  }
  if (a_prime.empty() || b_prime.empty()) c.min_paths = 0;
  c.size_ok = !a_prime.empty() && !b_prime.empty() &&
              static_cast<double>(a_prime.size()) >= c.need_a &&
              static_cast<double>(b_prime.size()) >= c.need_b;
  c.cross_ok = static_cast<double>(c.cross_edges) >= c.need_cross;
  c.paths_ok = static_cast<double>(c.min_paths) >= c.need_paths;
  return c;
}

BsgResult bsg_refine(const BipartiteGraph& g, double k, std::uint64_t seed) {
  validate_graph(g);
  const std::size_t na = g.part_a.size();
  const std::size_t nb = g.part_b.size();
  if (na == 0) throw InvalidInput("bsg: A must be non-empty");
  if (nb > na) throw InvalidInput("bsg: requires |B| <= |A|");
  if (!(k > 0.0)) throw InvalidInput("bsg: K must be positive");
  const double n = static_cast<double>(na);
  const double edges = static_cast<double>(g.edges.size());
  if (edges < n * n / k * (1.0 - 1e-12))
    throw InvalidInput("bsg: |E| = " + std::to_string(g.edges.size()) + " is below n^2/K = " +
                       std::to_string(n * n / k));

  const BitRows adj = adjacency(g);
  const auto codeg = codegrees(adj, na);
  std::vector<std::size_t> deg_a(na, 0), deg_b(nb, 0);
  for (const auto& [i, j] : g.edges) {
    ++deg_a[i];
    ++deg_b[j];
  }
  std::vector<bool> kept(na, false);
  for (std::size_t a = 0; a < na; ++a) kept[a] = static_cast<double>(deg_a[a]) >= edges / (2.0 * n);

  std::vector<std::size_t> pivots(nb);
  std::iota(pivots.begin(), pivots.end(), 0);
  std::stable_sort(pivots.begin(), pivots.end(), [&](std::size_t x, std::size_t y) {
    return deg_b[x] > deg_b[y];
  });
  SplitRng rng(seed);
  const double codeg_floor = n / (32.0 * k * k);
  constexpr int kAttempts = 32;

  BsgResult best;
  for (int attempt = 0; attempt < kAttempts && nb > 0; ++attempt) {
    const std::size_t b0 = attempt < 16 && static_cast<std::size_t>(attempt) < nb
                               ? pivots[static_cast<std::size_t>(attempt)]
                               : static_cast<std::size_t>(rng.below(nb));
    std::vector<std::size_t> cur;
    for (std::size_t a = 0; a < na; ++a)
      if (kept[a] && adj.get(a, b0)) cur.push_back(a);
    // Drop vertices with too many low-codegree partners until stable.
    for (bool changed = true; changed && !cur.empty();) {
      changed = false;
      const double limit = static_cast<double>(cur.size()) / (8.0 * k);
      std::vector<std::size_t> next;
      for (const std::size_t a : cur) {
        std::size_t bad = 0;
        for (const std::size_t a1 : cur)
          if (static_cast<double>(codeg[a * na + a1]) < codeg_floor) ++bad;
        if (static_cast<double>(bad) <= limit) next.push_back(a);
      }
      changed = next.size() != cur.size();
      cur.swap(next);
    }
    if (cur.empty()) continue;
    std::vector<std::size_t> bset;
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t hits = 0;
      for (const std::size_t a : cur) hits += adj.get(a, b) ? 1 : 0;
      if (static_cast<double>(hits) >= static_cast<double>(cur.size()) / (4.0 * k)) bset.push_back(b);
    }
    auto cert = verify_bsg(g, k, cur, bset);
    if (cert.all_ok()) {
      best.a_prime = std::move(cur);
      best.b_prime = std::move(bset);
      best.certificate = cert;
      best.attempts = attempt + 1;
      return best;
    }
  }
  throw ExtractionFailed("bsg: no certified (A', B') after " + std::to_string(kAttempts) +
                         " attempts (n = " + std::to_string(na) + ", K = " + std::to_string(k) + ")");
}

namespace {

std::int64_t floor_div(std::int64_t a, double m) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(a) / m));
}

void add_check(BsgExtraction& x, std::string name, bool exact, double lhs, double rhs, bool holds) {
  x.checks.push_back({std::move(name), exact, holds, lhs, rhs});
  if (exact && !holds)
    throw InternalAssertion("fourier-bsg: " + x.checks.back().name + " violated (" +
                            std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
}

}  // namespace

BsgExtraction fourier_bsg(const Spectrum& spec, const FrequencySet& a0, double window_n,
                          double sep_m, double delta, double r_bound, std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("fourier-bsg: delta must lie in (0, 1]");
  if (!(sep_m > 0.0 && window_n > 0.0)) throw InvalidInput("fourier-bsg: N, M must be positive");
  if (!(r_bound > 0.0)) throw InvalidInput("fourier-bsg: R must be positive");
  if (std::abs(spec.source_mass() - 1.0) > 1e-9)
    throw InvalidInput("fourier-bsg: requires a probability measure");
  if (static_cast<double>(spec.n_max()) < 2.0 * window_n)
    throw InvalidInput("fourier-bsg: spectrum window must cover [-2N, 2N]");
  if (a0.empty()) throw InvalidInput("fourier-bsg: A0 is empty");
  const auto el = a0.elements();
  for (std::size_t i = 1; i < el.size(); ++i)
    if (!(static_cast<double>(el[i] - el[i - 1]) > sep_m))
      throw HypothesisFailed("fourier-bsg: A0 is not M-separated");
  for (const std::int64_t a : el)
    if (std::abs(static_cast<double>(a)) > window_n || !(std::abs(spec(a)) > delta))
      throw HypothesisFailed("fourier-bsg: frequency " + std::to_string(a) +
                             " is not in F(mu, delta) n [-N, N]");

  BsgExtraction x;
  x.delta = delta;
  x.r_bound = r_bound;
  x.window_n = window_n;
  x.sep_m = sep_m;
  x.size_a0 = el.size();

  const double thr = delta * delta / 8.0;
  const auto f_small = level_set(spec, thr, 2.0 * window_n, sep_m);
  x.cover_f = covering_number(f_small, sep_m).count;
  if (static_cast<double>(x.cover_f) > r_bound * static_cast<double>(el.size()))
    throw HypothesisFailed("fourier-bsg: N(F(mu, delta^2/8) n [-2N, 2N]; M) = " +
                           std::to_string(x.cover_f) + " exceeds R|A0| = " +
                           std::to_string(r_bound * static_cast<double>(el.size())));

  // (1) Phase alignment on a quarter turn of arguments.
  std::vector<std::pair<std::int64_t, Complex>> coeffs;
  for (const std::int64_t a : el) coeffs.emplace_back(a, spec(a));
  const PhaseSelection phase = phase_align(coeffs);
  x.theta = phase.theta;
  const Complex rot = std::polar(1.0, x.theta);
  const std::vector<std::int64_t>& a_set = phase.kept;
  x.size_a = a_set.size();
  add_check(x, "|A| >= |A0|/4", true, 4.0 * static_cast<double>(x.size_a),
            static_cast<double>(x.size_a0), 4 * x.size_a >= x.size_a0);
  double min_re = std::numeric_limits<double>::infinity();
  for (const std::int64_t a : a_set) min_re = std::min(min_re, (rot * spec(a)).real());
  add_check(x, "Re(e^{i theta} mu^(a)) > delta/2 on A", true, min_re, delta / 2.0,
            min_re > delta / 2.0);

  // (2) Edges E = {(a, b) : Re mu^(a - b) > delta^2/8}; the diagonal is in E.
  const std::size_t na = a_set.size();
  std::size_t edges = 0;
  for (const std::int64_t a : a_set)
    for (const std::int64_t b : a_set) edges += spec(a - b).real() > thr ? 1 : 0;
  x.edges = edges;
  add_check(x, "|E| >= (delta^2/8)|A|^2", true, static_cast<double>(edges),
            thr * static_cast<double>(na * na),
            static_cast<double>(edges) >= thr * static_cast<double>(na * na));

  // (3) Truncations, stored in units of M.
  std::set<std::int64_t> abar_s;
  for (const std::int64_t a : a_set) {
    abar_s.insert(floor_div(a, sep_m));
    abar_s.insert(floor_div(a, sep_m) + 1);
  }
  std::vector<std::int64_t> abar(abar_s.begin(), abar_s.end());
  x.size_a_bar = abar.size();
  add_check(x, "|A| <= |A bar| <= 2|A|", true, static_cast<double>(x.size_a_bar),
            static_cast<double>(x.size_a), x.size_a <= x.size_a_bar && x.size_a_bar <= 2 * x.size_a);

  std::vector<std::int64_t> f_with_zero(f_small.elements().begin(), f_small.elements().end());
  f_with_zero.push_back(0);
  std::set<std::int64_t> h_s;
  for (const std::int64_t h : f_with_zero) {
    h_s.insert(floor_div(h, sep_m));
    h_s.insert(floor_div(h, sep_m) + 1);
  }
  x.size_h = h_s.size();
  const std::size_t cover_f0 = covering_number(f_with_zero, sep_m).count;
  add_check(x, "|H| <= 4 N(F u {0}; M)", true, static_cast<double>(x.size_h),
            4.0 * static_cast<double>(cover_f0), x.size_h <= 4 * cover_f0);
  const double h_cap = 16.0 * r_bound * static_cast<double>(x.size_a_bar) + 4.0;
  add_check(x, "|H| <= 16 R |A bar| + 4", true, static_cast<double>(x.size_h), h_cap,
            static_cast<double>(x.size_h) <= h_cap);

  BipartiteGraph g;
  g.part_a = abar;
  g.part_b = abar;
  for (std::size_t i = 0; i < abar.size(); ++i)
    for (std::size_t j = 0; j < abar.size(); ++j)
      if (h_s.count(abar[i] - abar[j]) != 0) g.edges.emplace_back(i, j);
  x.edges_bar = g.edges.size();
  add_check(x, "|E bar| >= |E|", true, static_cast<double>(x.edges_bar),
            static_cast<double>(x.edges), x.edges_bar >= x.edges);
  const double nbar = static_cast<double>(x.size_a_bar);
  x.k = nbar * nbar / static_cast<double>(x.edges_bar);
  add_check(x, "K = |A bar|^2/|E bar| <= 32/delta^2", true, x.k, 32.0 / (delta * delta),
            x.k <= 32.0 / (delta * delta) * (1.0 + 1e-12));

  // (4) Dense-subgraph refinement.
  const BsgResult bsg = bsg_refine(g, x.k, seed);
  std::vector<std::int64_t> a_prime, b_prime;
  for (const std::size_t i : bsg.a_prime) a_prime.push_back(abar[i]);
  for (const std::size_t j : bsg.b_prime) b_prime.push_back(abar[j]);
  x.size_a_prime = a_prime.size();
  x.size_b_prime = b_prime.size();
  x.min_paths = bsg.certificate.min_paths;

  // (5) Each difference a - b is a signed sum of three elements of H in at
  // least min_paths ways, so |A' - B'| min_paths <= |H|^3.
  x.diff_a_prime_b_prime = difference_set(a_prime, b_prime).size();
  const double h3 = std::pow(static_cast<double>(x.size_h), 3);
  add_check(x, "|A'-B'| min_paths <= |H|^3", true,
            static_cast<double>(x.diff_a_prime_b_prime) * static_cast<double>(x.min_paths), h3,
            static_cast<double>(x.diff_a_prime_b_prime) * static_cast<double>(x.min_paths) <= h3);
  const auto ruzsa = ruzsa_bound_check(a_prime, a_prime, b_prime);
  x.diff_a_prime_a_prime = ruzsa.diff_ab;
  x.ruzsa_rhs = ruzsa.rhs;
  add_check(x, "|A'-A'| <= |A'-B'|^2/|B'|", true, static_cast<double>(ruzsa.diff_ab), ruzsa.rhs,
            ruzsa.holds);

  // (6) Pull back: a is kept when either truncation point of a lies in A'.
  std::set<std::int64_t> ap(a_prime.begin(), a_prime.end());
  std::vector<std::int64_t> a1;
  for (const std::int64_t a : a_set) {
    const std::int64_t kq = floor_div(a, sep_m);
    if (ap.count(kq) != 0 || ap.count(kq + 1) != 0) a1.push_back(a);
  }
  Complex mean{0.0, 0.0};
  for (const std::int64_t a : a1) mean += spec(a);
  mean /= static_cast<double>(a1.size());
  x.alignment = std::abs(mean);
  add_check(x, "|mean over A1 of mu^(a)| >= delta/2", true, x.alignment, delta / 2.0,
            x.alignment >= delta / 2.0);

  const auto diff = difference_set(a1, a1);
  x.cover_a1_diff = covering_number(diff, sep_m).count;
  add_check(x, "N(A1-A1; M) <= 3|A'-A'|", true, static_cast<double>(x.cover_a1_diff),
            3.0 * static_cast<double>(x.diff_a_prime_a_prime),
            x.cover_a1_diff <= 3 * x.diff_a_prime_a_prime);
  x.cover_bound = std::pow(2.0, 105) * std::pow(r_bound, 6) * std::pow(delta, -8) *
                  static_cast<double>(x.size_a0);
  add_check(x, "N(A1-A1; M) < 2^105 R^6 delta^-8 |A0|", true,
            static_cast<double>(x.cover_a1_diff), x.cover_bound,
            static_cast<double>(x.cover_a1_diff) < x.cover_bound);
  x.c_size = std::pow(2.0, -17);
  x.size_bound = x.c_size * static_cast<double>(x.size_a0) * std::pow(delta, 4);
  add_check(x, "|A1| >= 2^-17 |A0| delta^4", true, static_cast<double>(a1.size()), x.size_bound,
            static_cast<double>(a1.size()) >= x.size_bound);
  x.size_bound_delta2 = static_cast<double>(x.size_a0) * delta * delta;
  add_check(x, "|A1| / (|A0| delta^2)", false, static_cast<double>(a1.size()),
            x.size_bound_delta2, true);

  x.a1 = FrequencySet(window_n, sep_m, std::move(a1), true);
  return x;
}

RegularityViolation regularity_sup(std::span<const std::int64_t> points, double diam,
                                   double scale_m, double alpha) {
  RegularityViolation worst{0.0, 0.0, 0.0};
  if (points.empty()) return worst;
  std::vector<std::int64_t> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  const double total = static_cast<double>(p.size());
  std::vector<double> radii;
  for (double s = scale_m; s < diam; s *= 2.0) radii.push_back(s);
  radii.push_back(diam);
  for (const std::int64_t x : p) {
    for (const double s : radii) {
      // Open ball: |y - x| < s.
      const auto lo = std::upper_bound(p.begin(), p.end(), static_cast<double>(x) - s,
                                       [](double v, std::int64_t e) { return v < static_cast<double>(e); });
      const auto hi = std::lower_bound(p.begin(), p.end(), static_cast<double>(x) + s,
                                       [](std::int64_t e, double v) { return static_cast<double>(e) < v; });
      const double mass = static_cast<double>(hi - lo) / total;
      const double ratio = mass * std::pow(diam / s, alpha);
      if (ratio > worst.ratio) worst = {static_cast<double>(x), s, ratio};
    }
  }
  return worst;
}

RegularSubsetReport regular_subset_extract(const FrequencySet& a, double sep_m,
                                           double target_alpha, double eps, double c_target,
                                           std::optional<double> min_window_exponent) {
  const double n = a.window_n();
  if (!(sep_m > 0.0 && n > sep_m)) throw InvalidInput("regular subset: need N > M > 0");
  if (!(target_alpha > 0.0 && target_alpha < 1.0))
    throw InvalidInput("regular subset: target alpha must lie in (0, 1)");
  if (!(eps > 0.0 && eps < target_alpha / 10.0))
    throw InvalidInput("regular subset: need 0 < eps < alpha/10");
  const std::size_t cover = covering_number(a, sep_m).count;
  const double need = std::pow(n / sep_m, target_alpha);
  if (static_cast<double>(cover) < need)
    throw HypothesisFailed("regular subset: N(A; M) = " + std::to_string(cover) +
                           " is below (N/M)^alpha = " + std::to_string(need));

  const double alpha_c = target_alpha - 10.0 * eps;
  double frac = (1.0 - target_alpha + eps) / (1.0 - target_alpha + 8.0 * eps);
  if (min_window_exponent) frac = std::max(frac, *min_window_exponent);
  const double log_nm = std::log(n / sep_m);

  RegularSubsetReport rep;
  rep.n_input = n;
  rep.scale = sep_m;
  rep.alpha_reg = alpha_c;
  rep.input_cover = cover;
  RegularityViolation first_failure{};
  bool have_failure = false;

  for (int j = 0;; ++j) {
    const double n1 = n * std::pow(2.0, -0.25 * j);
    if (!(std::log(n1 / sep_m) > frac * log_nm)) break;
    ++rep.windows_tried;
    std::vector<std::int64_t> pts;
    for (const std::int64_t x : a.elements())
      if (std::abs(static_cast<double>(x)) <= n1) pts.push_back(x);
    pts = max_separated_subset(pts, sep_m);
    if (pts.empty()) continue;
    const std::size_t start = pts.size();
    const double diam = 2.0 * n1;
    RegularityViolation worst = regularity_sup(pts, diam, sep_m, alpha_c);
    while (!(worst.ratio < c_target) && 2 * pts.size() > start) {
      // Thin the offending ball: drop every second point inside it.
      std::vector<std::int64_t> next;
      bool drop = false;
      for (const std::int64_t x : pts) {
        if (std::abs(static_cast<double>(x) - worst.center) < worst.radius) {
          if (drop) {
            drop = false;
            continue;
          }
          drop = true;
        }
        next.push_back(x);
      }
      if (next.size() == pts.size()) break;
      pts.swap(next);
      worst = regularity_sup(pts, diam, sep_m, alpha_c);
    }
    if (worst.ratio < c_target && 2 * pts.size() > start) {
      rep.n1 = n1;
      rep.diam = diam;
      rep.c_reg = worst.ratio * (1.0 + 1e-9);
      double fitted = 0.0;
      for (int i = 1; i <= 100; ++i) {
        const double al = 0.01 * i;
        if (regularity_sup(pts, diam, sep_m, al).ratio < c_target) fitted = al;
        else break;
      }
      rep.fitted_alpha = fitted;
      rep.subset = FrequencySet(n1, sep_m, std::move(pts), true);
      return rep;
    }
    if (!have_failure) {
      first_failure = worst;
      have_failure = true;
    }
  }
  throw ExtractionFailed("regular subset: no window certifies (C, alpha) = (" +
                         std::to_string(c_target) + ", " + std::to_string(alpha_c) +
                         "); violating center " + std::to_string(first_failure.center) +
                         ", radius " + std::to_string(first_failure.radius) + ", ratio " +
                         std::to_string(first_failure.ratio));
}

}  // namespace torusdec
