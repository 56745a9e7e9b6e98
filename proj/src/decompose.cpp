#include "torusdec/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phase.hpp"
#include "torusdec/error.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {
namespace {

using Interval = std::pair<double, double>;

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

std::vector<Interval> ball_union(std::span<const std::int64_t> pts, double radius) {
  std::vector<Interval> v;
  for (const std::int64_t p : pts) v.emplace_back(static_cast<double>(p) - radius, static_cast<double>(p) + radius);
  return merge(std::move(v));
}

double length(const std::vector<Interval>& u) {
  double acc = 0.0;
  for (const auto& [a, b] : u) acc += b - a;
  return acc;
}

double intersection_length(const std::vector<Interval>& u, const std::vector<Interval>& v) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < u.size() && j < v.size()) {
    const double lo = std::max(u[i].first, v[j].first);
    const double hi = std::min(u[i].second, v[j].second);
    if (hi > lo) acc += hi - lo;
    if (u[i].second < v[j].second) ++i;
    else ++j;
  }
  return acc;
}

// Lebesgue measure of B_r(A) - B_r(B).
double difference_length(std::span<const std::int64_t> a, std::span<const std::int64_t> b, double radius) {
  std::vector<Interval> v;
  v.reserve(a.size() * b.size());
  for (const std::int64_t x : a)
    for (const std::int64_t y : b)
      v.emplace_back(static_cast<double>(x - y) - 2.0 * radius, static_cast<double>(x - y) + 2.0 * radius);
  return length(merge(std::move(v)));
}

std::vector<std::int64_t> scaled(std::span<const std::int64_t> e, std::int64_t s) {
  std::vector<std::int64_t> out;
  out.reserve(e.size());
  for (const std::int64_t x : e) out.push_back(s * x);
  std::sort(out.begin(), out.end());
  return out;
}

void add_check(std::vector<DiagnosticCheck>& checks, std::string name, bool exact, double lhs,
               double rhs, bool holds) {
  if (exact && !holds)
    throw InternalAssertion("diagnostic: exact step '" + name + "' failed (" + std::to_string(lhs) +
                            " vs " + std::to_string(rhs) + ")");
  checks.push_back({std::move(name), exact, holds, lhs, rhs});
}

void check_ge(std::vector<DiagnosticCheck>& checks, std::string name, bool exact, double lhs, double rhs) {
  add_check(checks, std::move(name), exact, lhs, rhs, lhs >= rhs);
}

double multiplier_scale(const MultiplierSet& s, const ParamSet& p) {
  const auto l = static_cast<double>(s.scale());
  if (std::abs(l - p.L) > 1e-9) throw InvalidInput("params.L does not match the multiplier scale");
  return l;
}

void require_probability(const GridMeasure& mu, const char* where) {
  if (std::abs(mu.mass() - 1.0) > 1e-9)
    throw InvalidInput(std::string(where) + ": mu must be a probability measure");
}

template <class Fn>
auto with_context(const std::string& ctx, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const HypothesisFailed& e) {
    throw HypothesisFailed(ctx + ": " + e.what());
  } catch (const ExtractionFailed& e) {
    throw ExtractionFailed(ctx + ": " + e.what());
  }
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t q) {
  const __int128 r = (static_cast<__int128>(a) * b) % q;
  return static_cast<std::int64_t>(r < 0 ? r + q : r);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ParamSet default_params(double L, double beta, double lambda, double tau, int k) {
  ParamSet p;
  p.L = L;
  p.beta = beta;
  p.lambda = lambda;
  p.tau = tau;
  p.k = k;
  p.tau0 = std::max(0.5, 2.0 * tau);
  p.c_tilde_max = std::pow(L, p.tau0);
  p.u_exp = k + std::pow(8.0, -k);
  p.kappa = 1.0 - k / p.u_exp;
  p.c_growth = 34.0 * std::pow(2.0, k);
  p.alpha_ini = 0.99 * beta;
  p.eps0 = lambda / 60.0;
  p.alpha_high = 1.0 - p.eps0;
  p.alpha_delta = 0.1;
  p.alpha_inc = p.alpha_delta / 1280.0;
  return p;
}

void validate_params(const ParamSet& p) {
  if (!(p.L >= 2.0)) throw InvalidInput("params.L must be >= 2");
  if (!(p.beta > 0.0 && p.beta <= 1.0)) throw InvalidInput("params.beta must lie in (0, 1]");
  if (!(p.lambda > 0.0 && p.lambda <= 1.0)) throw InvalidInput("params.lambda must lie in (0, 1]");
  if (!(p.tau > 0.0 && p.tau < p.tau0)) throw InvalidInput("params.tau must satisfy 0 < tau < tau0");
  if (p.k < 0) throw InvalidInput("params.k must be >= 0");
  if (!(p.alpha_ini > 0.0 && p.alpha_ini < p.alpha_high && p.alpha_high < 1.0))
    throw InvalidInput("params.alpha_ini must satisfy 0 < alpha_ini < alpha_high < 1");
  if (!(p.alpha_delta > 0.0)) throw InvalidInput("params.alpha_delta must be positive");
  if (!(p.eps0 > 0.0)) throw InvalidInput("params.eps0 must be positive");
  if (!(p.c_tilde_max > 0.0)) throw InvalidInput("params.c_tilde_max must be positive");
  if (p.q_grid < 2) throw InvalidInput("params.q_grid must be >= 2");
  if (p.iteration_cap < 1) throw InvalidInput("params.iteration_cap must be >= 1");
  if (!p.force_branch.empty() && p.force_branch != "rho-large" && p.force_branch != "bsg-projection")
    throw InvalidInput("params.force_branch must be rho-large or bsg-projection");
}

InitialDimensionReport initial_dimension_report(const GridMeasure& mu, const MultiplierSet& s, int n,
                                                std::int64_t a, double delta0) {
  if (n < 1) throw InvalidInput("initial dimension: n must be >= 1");
  if (a == 0) throw InvalidInput("initial dimension: a must be nonzero");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw InvalidInput("initial dimension: delta0 must lie in (0, 1)");
  require_probability(mu, "initial dimension");
  const auto l = static_cast<double>(s.scale());
  InitialDimensionReport rep;
  rep.n = n;
  rep.a = a;
  rep.delta0 = delta0;
  rep.sep = static_cast<double>(std::abs(a));
  rep.window = 2.0 * l * rep.sep;
  if (2.0 * rep.window >= static_cast<double>(mu.q()))
    throw InvalidInput("initial dimension: grid Q too small for the window 2 L |a|");

  const GridMeasure prev = walk_power(mu, s, n - 1);
  const GridMeasure cur = walk_step(prev, s);
  rep.coeff_abs = std::abs(fourier_coefficient(cur, a));
  if (!(rep.coeff_abs > delta0))
    throw HypothesisFailed("initial dimension: |mu_n^(a)| = " + std::to_string(rep.coeff_abs) +
                           " is not above delta0");
  const FourierTable table = fourier_table(prev);
  for (const std::int64_t m : s.elements())
    if (std::abs(table(m * a)) > delta0 / 2.0) ++rep.markov_count;
  rep.markov_need = static_cast<double>(s.size()) * delta0 / 2.0;
  if (!(static_cast<double>(rep.markov_count) >= rep.markov_need))
    throw InternalAssertion("initial dimension: Markov count below |S| delta0 / 2");
  const FrequencySet f = level_set(table, delta0 / 2.0, rep.window);
  rep.cover = covering_number(f, rep.sep).count;
  rep.need = rep.markov_need;
  rep.need_proven = static_cast<double>(s.size()) * delta0 / 4.0;
  rep.holds = static_cast<double>(rep.cover) >= rep.need;
  rep.holds_proven = static_cast<double>(rep.cover) >= rep.need_proven;
  if (!rep.holds_proven)
    throw InternalAssertion("initial dimension: cover below |S| delta0 / 4");
  return rep;
}

BootstrapTrace bootstrap_diagnostic(const GridMeasure& mu, const MultiplierSet& s, int n, double window_n,
                                    double sep_m, double delta, const ParamSet& p) {
  validate_params(p);
  if (n < 1) throw InvalidInput("bootstrap: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("bootstrap: delta must lie in (0, 1)");
  if (!(sep_m >= 1.0 && window_n > sep_m)) throw InvalidInput("bootstrap: need N > M >= 1");
  require_probability(mu, "bootstrap");
  const double l = multiplier_scale(s, p);
  const auto q = static_cast<double>(mu.q());
  if (!(8.0 * l * window_n < q)) throw InvalidInput("bootstrap: grid Q too small, need 8 L N < Q");

  BootstrapTrace tr;
  tr.n = n;
  tr.window_n = window_n;
  tr.sep_m = sep_m;
  tr.delta = delta;
  tr.delta_prime = delta * delta / 4.0;
  tr.delta4 = std::pow(delta, 4) / 256.0;
  const double ratio = window_n / sep_m;
  if (!(ratio > std::pow(l, p.tau) && ratio < l))
    throw HypothesisFailed("bootstrap: need L^tau < N/M < L, got N/M = " + std::to_string(ratio));
  if (!(delta > std::pow(l, -p.c_star)))
    throw HypothesisFailed("bootstrap: need delta > L^-C*");

  const GridMeasure prev = walk_power(mu, s, n - 1);
  const GridMeasure cur = walk_step(prev, s);
  const FourierTable tn = fourier_table(cur);
  const FourierTable tp = fourier_table(prev);

  const FrequencySet hyp = level_set(tn, delta, window_n);
  tr.hypothesis_cover = covering_number(hyp, sep_m).count;
  tr.alpha_measured = tr.hypothesis_cover > 1
                          ? std::log(static_cast<double>(tr.hypothesis_cover)) / std::log(ratio)
                          : 0.0;
  if (!(tr.alpha_measured >= p.alpha_ini))
    throw HypothesisFailed("bootstrap: N(F(mu_n, delta) n [-N, N]; M) = " +
                           std::to_string(tr.hypothesis_cover) + " is below (N/M)^alpha_ini");
  tr.alpha = std::min(tr.alpha_measured - 1e-9, p.alpha_high);
  tr.size_e0 = max_separated_subset(hyp, sep_m).size();

  const double eps = 0.99 * p.alpha_delta / (640.0 * 20.0);
  tr.regular = with_context("bootstrap (regular subset)", [&] {
    return regular_subset_extract(hyp, sep_m, tr.alpha, eps, p.regularity_c / (delta * delta), 1.0 / 8.0);
  });
  tr.n1 = tr.regular.n1;
  tr.size_e0_prime = tr.regular.subset.size();
  if (tr.size_e0_prime == 0) throw ExtractionFailed("bootstrap: regular subset is empty");

  const FrequencySet e1 = max_separated_subset(level_set(tn, std::pow(delta, 4) / 32.0, 2.0 * tr.n1), sep_m);
  tr.size_e1 = e1.size();
  tr.rho = static_cast<double>(tr.size_e1) / static_cast<double>(tr.size_e0_prime);
  tr.rho_threshold = 1024.0 * p.rho_c * std::pow(tr.n1 / sep_m, p.alpha_delta / 640.0) * std::pow(delta, -6);
  tr.branch = tr.rho >= tr.rho_threshold ? "rho-large" : "bsg-projection";
  if (!p.force_branch.empty()) tr.branch = p.force_branch;
  tr.m_prime = l * sep_m;
  const double m_prime = tr.m_prime;
  auto& checks = tr.checks;

  if (tr.branch == "rho-large") {
    std::vector<std::pair<std::int64_t, Complex>> coeffs;
    for (const std::int64_t x : e1.elements()) coeffs.emplace_back(x, tn(x));
    const PhaseSelection ph = phase_align(coeffs);
    const auto& e1p = ph.kept;
    tr.size_e1_prime = e1p.size();
    check_ge(checks, "|E1'| >= |E1|/4", true, static_cast<double>(e1p.size()), static_cast<double>(tr.size_e1) / 4.0);
    if (!e1p.empty()) {
      const double d128 = std::pow(delta, 4) / 128.0;
      const Complex rot = std::polar(1.0, ph.theta);
      double min_re = 1.0;
      Complex sum = 0.0;
      for (const std::int64_t x : e1p) {
        min_re = std::min(min_re, (rot * tn(x)).real());
        sum += tn(x);
      }
      add_check(checks, "Re(e^{i theta} mu_n^) > delta^4/128 on E1'", true, min_re, d128, min_re > d128);
      const auto sz = static_cast<double>(e1p.size());
      check_ge(checks, "|mean over E1' of mu_n^| >= delta^4/128", true, std::abs(sum) / sz, d128);
      double best = -1.0;
      for (const std::int64_t m : s.elements()) {
        double acc = 0.0;
        for (const std::int64_t x : e1p) acc += std::abs(tp(m * x));
        if (acc / sz > best) {
          best = acc / sz;
          tr.s0 = m;
        }
      }
      check_ge(checks, "mean over E1' of |mu_{n-1}^(s0 xi)| >= delta^4/128", true, best, d128);
      std::size_t count = 0;
      for (const std::int64_t x : e1p)
        if (std::abs(tp(tr.s0 * x)) > tr.delta4) ++count;
      const auto cnt = static_cast<double>(count);
      check_ge(checks, "#{xi : |mu_{n-1}^(s0 xi)| > delta^4/256} >= (delta^4/256)|E1'|", true, cnt, tr.delta4 * sz);
      const double e2_window = 4.0 * l * tr.n1;
      tr.size_e2 = max_separated_subset(level_set(tp, tr.delta4, e2_window), m_prime).size();
      check_ge(checks, "|E2| >= #{xi : |mu_{n-1}^(s0 xi)| > delta^4/256}", true, static_cast<double>(tr.size_e2), cnt);
      check_ge(checks, "count >= rho delta^4/1024 |E0'|", true, cnt,
               tr.rho * std::pow(delta, 4) / 1024.0 * static_cast<double>(tr.size_e0_prime));
    }
    tr.n0 = 2.0 * tr.n1;
  } else {
    const double dp = tr.delta_prime;
    const auto n_max = static_cast<std::int64_t>(std::ceil(2.0 * tr.n1));
    const Spectrum spec = tn.window(n_max);
    const FrequencySet f_cover = level_set(tn, dp * dp / 8.0, 2.0 * tr.n1);
    const double cover_f = static_cast<double>(covering_number(f_cover, sep_m).count);
    const double r_bound = std::max(cover_f / static_cast<double>(tr.size_e0_prime), 1.0) * (1.0 + 1e-12);
    tr.bsg = with_context("bootstrap (fourier bsg)", [&] {
      return fourier_bsg(spec, tr.regular.subset, tr.n1, sep_m, dp, r_bound, 0);
    });
    const auto e = tr.bsg->a1.elements();
    tr.size_e = e.size();
    const auto es = static_cast<double>(e.size());
    const auto ss = static_cast<double>(s.size());

    Complex mean = 0.0;
    for (const std::int64_t x : e) mean += tn(x);
    check_ge(checks, "|mean over E of mu_n^| >= delta'/2", true, std::abs(mean) / es, dp / 2.0);

    std::size_t pairs = 0;
    for (const std::int64_t m : s.elements())
      for (const std::int64_t x : e)
        if (std::abs(tp(m * x)) >= dp / 4.0) ++pairs;
    check_ge(checks, "#{(s,e) : |mu_{n-1}^(s e)| >= delta'/4} >= (delta'/4)|S||E|", true,
             static_cast<double>(pairs), dp / 4.0 * ss * es);

    const double e3_window = 2.0 * l * tr.n1;
    const auto e3 = max_separated_subset(level_set(tp, dp / 4.0, e3_window).elements(), m_prime);
    tr.size_e3 = e3.size();
    const auto e3s = static_cast<double>(e3.size());
    const auto u_e3 = ball_union(e3, m_prime);
    std::vector<std::vector<Interval>> u_s;
    double meet_e3 = 0.0;
    for (const std::int64_t m : s.elements()) {
      u_s.push_back(ball_union(scaled(e, m), m_prime));
      meet_e3 += intersection_length(u_s.back(), u_e3);
    }
    check_ge(checks, "(2/M') sum_s m(B(sE) n B(E3)) >= #pairs", true, 2.0 / m_prime * meet_e3,
             static_cast<double>(pairs) * (1.0 - 1e-12));

    const std::size_t ns = s.size();
    std::vector<double> meet(ns * ns);
    double meet_sum = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < ns; ++j) {
        meet[i * ns + j] = intersection_length(u_s[i], u_s[j]);
        meet_sum += meet[i * ns + j];
      }
    if (tr.size_e3 > 0) {
      const double cs_rhs = m_prime * dp * dp * ss * ss * es * es / (128.0 * e3s);
      check_ge(checks, "sum_{s1,s2} m(B(s1E) n B(s2E)) >= M' delta'^2 |S|^2 |E|^2 / (128 |E3|)", true,
               meet_sum, cs_rhs * (1.0 - 1e-12));
      const double thr = m_prime * dp * dp * es * es / (256.0 * e3s);
      std::size_t pair_count = 0;
      std::size_t best_row = 0;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < ns; ++i) {
        std::size_t row = 0;
        for (std::size_t j = 0; j < ns; ++j)
          if (meet[i * ns + j] >= thr) ++row;
        pair_count += row;
        if (row > best_row) {
          best_row = row;
          best_i = i;
        }
      }
      const double base = dp * dp * es / e3s;
      check_ge(checks, "#pairs above threshold >= delta'^2 |E| |S|^2 / (256 |E3|)", false,
               static_cast<double>(pair_count), base / 256.0 * ss * ss);
      check_ge(checks, "#pairs above threshold >= delta'^2 |E| |S|^2 / (512 |E3|)", true,
               static_cast<double>(pair_count), base / 512.0 * ss * ss);
      tr.s1 = s.elements()[best_i];
      for (std::size_t j = 0; j < ns; ++j)
        if (meet[best_i * ns + j] >= thr) tr.set_b.push_back(s.elements()[j]);
      check_ge(checks, "|B| >= delta'^2 |E| |S| / (512 |E3|)", true, static_cast<double>(tr.set_b.size()),
               base / 512.0 * ss);
    }
    tr.c_tilde = regularity_constant(s, p.lambda).c_tilde;
    if (!tr.set_b.empty()) {
      tr.c_tilde1 = regularity_constant(MultiplierSet(s.scale(), tr.set_b), p.lambda).c_tilde;
      const auto diff = difference_set(e, e);
      const double nee = static_cast<double>(covering_number(diff, sep_m).count);
      const auto s1e = scaled(e, tr.s1);
      const std::size_t i1 = static_cast<std::size_t>(
          std::find(s.elements().begin(), s.elements().end(), tr.s1) - s.elements().begin());
      bool ok64 = true, ok25 = true;
      double worst_lhs = 0.0, worst_rhs = 0.0, worst_gap = -1e300;
      for (const std::int64_t s2 : tr.set_b) {
        const std::size_t i2 = static_cast<std::size_t>(
            std::find(s.elements().begin(), s.elements().end(), s2) - s.elements().begin());
        const double inter = meet[i1 * ns + i2];
        const double d = difference_length(s1e, scaled(e, s2), m_prime);
        const double rhs = 64.0 * nee * nee * m_prime * m_prime / inter;
        if (!(d <= rhs * (1.0 + 1e-12))) ok64 = false;
        if (!(d <= 25.0 / 64.0 * rhs)) ok25 = false;
        if (d - rhs > worst_gap) {
          worst_gap = d - rhs;
          worst_lhs = d;
          worst_rhs = rhs;
        }
      }
      add_check(checks, "|B(s1E) - B(s2E)| <= 64 N(E-E;M)^2 M'^2 / m(B(s1E) n B(s2E))", true, worst_lhs,
                worst_rhs, ok64);
      add_check(checks, "|B(s1E) - B(s2E)| <= 25 N(E-E;M)^2 M'^2 / m(B(s1E) n B(s2E))", false, worst_lhs,
                25.0 / 64.0 * worst_rhs, ok25);

      const std::size_t pts = e.size() * e.size();
      if (pts > 4096) {
        tr.probe_note = "probe skipped: |E x E| = " + std::to_string(pts) + " exceeds 4096";
      } else {
        std::vector<Point2> grid;
        for (const std::int64_t x : e)
          for (const std::int64_t y : e)
            grid.push_back({static_cast<double>(x) / tr.n1, static_cast<double>(y) / tr.n1});
        const PlanarPointSet et(std::move(grid), sep_m / tr.n1);
        std::vector<double> ys;
        for (const std::int64_t b : tr.set_b) ys.push_back(static_cast<double>(b));
        const DirectionMeasure eta = DirectionMeasure::from_vectors(-static_cast<double>(tr.s1), ys);
        tr.probe = projection_probe(et, eta, sep_m / tr.n1, tr.alpha, p.alpha_delta, p.eps0, p.lambda / 10.0,
                                    p.tau0);
      }
    }
    tr.n0 = tr.n1;
  }

  add_check(checks, "log(N0/M) > log(N/M)/8", true, std::log(tr.n0 / sep_m), std::log(ratio) / 8.0,
            std::log(tr.n0 / sep_m) > std::log(ratio) / 8.0);
  add_check(checks, "M < N0 <= 2N", true, tr.n0, 2.0 * window_n, tr.n0 > sep_m && tr.n0 <= 2.0 * window_n);
  tr.n_prime = l * tr.n0;
  const FrequencySet out = level_set(tp, tr.delta4, tr.n_prime);
  tr.output_cover = covering_number(out, m_prime).count;
  tr.output_need = std::pow(tr.n_prime / m_prime, tr.alpha + p.alpha_inc);
  tr.increment_met = static_cast<double>(tr.output_cover) >= tr.output_need;
  return tr;
}

FinalBootstrapTrace final_bootstrap_diagnostic(const GridMeasure& mu, const MultiplierSet& s, int n,
                                               double window_n, double sep_m, double delta,
                                               const ParamSet& p) {
  validate_params(p);
  if (n < 1) throw InvalidInput("final bootstrap: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("final bootstrap: delta must lie in (0, 1)");
  if (!(sep_m >= 1.0 && window_n > sep_m)) throw InvalidInput("final bootstrap: need N > M >= 1");
  require_probability(mu, "final bootstrap");
  const double l = multiplier_scale(s, p);
  if (!(8.0 * l * window_n < static_cast<double>(mu.q())))
    throw InvalidInput("final bootstrap: grid Q too small, need 8 L N < Q");

  FinalBootstrapTrace tr;
  tr.n = n;
  tr.window_n = window_n;
  tr.sep_m = sep_m;
  tr.delta = delta;
  tr.delta_prime = delta * delta / 4.0;
  tr.eps0 = p.eps0;
  if (!(window_n <= l * sep_m)) throw HypothesisFailed("final bootstrap: need N <= L M");

  const GridMeasure prev = walk_power(mu, s, n - 1);
  const GridMeasure cur = walk_step(prev, s);
  const FourierTable tn = fourier_table(cur);
  const FourierTable tp = fourier_table(prev);
  const FrequencySet hyp = level_set(tn, delta, window_n);
  tr.hypothesis_cover = covering_number(hyp, sep_m).count;
  tr.hypothesis_need = std::pow(window_n / sep_m, 1.0 - p.eps0);
  if (!(static_cast<double>(tr.hypothesis_cover) > tr.hypothesis_need))
    throw HypothesisFailed("final bootstrap: N(F(mu_n, delta) n [-N, N]; M) = " +
                           std::to_string(tr.hypothesis_cover) + " is not above (N/M)^(1 - eps0) = " +
                           std::to_string(tr.hypothesis_need));

  tr.regular = with_context("final bootstrap (regular subset)", [&] {
    return regular_subset_extract(hyp, sep_m, 1.0 - p.eps0, 19.0 * p.lambda / 600.0,
                                  p.regularity_c / (delta * delta), 0.5);
  });
  tr.n1 = tr.regular.n1;
  auto& checks = tr.checks;
  add_check(checks, "log(N1/M) > log(N/M)/2", true, std::log(tr.n1 / sep_m), std::log(window_n / sep_m) / 2.0,
            std::log(tr.n1 / sep_m) > std::log(window_n / sep_m) / 2.0);

  std::vector<std::pair<std::int64_t, Complex>> coeffs;
  for (const std::int64_t x : tr.regular.subset.elements()) coeffs.emplace_back(x, tn(x));
  const PhaseSelection ph = phase_align(coeffs);
  const std::vector<std::int64_t> e = ph.kept;
  tr.size_e = e.size();
  check_ge(checks, "|E| >= |E_reg|/4", true, static_cast<double>(e.size()),
           static_cast<double>(tr.regular.subset.size()) / 4.0);
  if (e.empty()) throw ExtractionFailed("final bootstrap: empty regular subset");
  const double dp = tr.delta_prime;
  const auto es = static_cast<double>(e.size());
  const auto ss = static_cast<double>(s.size());
  Complex mean = 0.0;
  for (const std::int64_t x : e) mean += tn(x);
  mean /= es;
  check_ge(checks, "|mean over E of mu_n^| >= delta'/2", true, std::abs(mean), dp / 2.0);

  const std::size_t ns = s.size();
  const auto el = s.elements();
  std::vector<double> tab(ns * ns, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j) {
      double acc = 0.0;
      for (const std::int64_t x1 : e)
        for (const std::int64_t x2 : e) acc += tp(el[i] * x1 - el[j] * x2).real();
      tab[i * ns + j] = acc / (es * es);
      total += tab[i * ns + j];
    }
  check_ge(checks, "mean over S x S of T(s1,s2) >= |mean over E of mu_n^|^2", true, total / (ss * ss),
           std::norm(mean) * (1.0 - 1e-12) - 1e-15);
  std::size_t j2 = 0;
  double best = -1e300;
  for (std::size_t j = 0; j < ns; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < ns; ++i) col += tab[i * ns + j];
    if (col > best) {
      best = col;
      j2 = j;
    }
  }
  tr.s2 = el[j2];
  check_ge(checks, "(1/|S|) sum_{s1} T(s1,s2) >= delta'^2/4", true, best / ss, dp * dp / 4.0);

  const double qthr = dp * dp / 8.0;
  for (std::size_t i = 0; i < ns; ++i) {
    std::size_t row = 0;
    for (const std::int64_t x1 : e)
      for (const std::int64_t x2 : e)
        if (std::abs(tp(el[i] * x1 - tr.s2 * x2)) >= qthr) ++row;
    tr.size_q += row;
    if (static_cast<double>(row) >= dp * dp * es * es / 16.0) tr.s_prime.push_back(el[i]);
  }
  check_ge(checks, "|Q| >= (delta'^2/8)|S||E|^2", true, static_cast<double>(tr.size_q), qthr * ss * es * es);
  check_ge(checks, "|S'| >= (delta'^2/16)|S|", true, static_cast<double>(tr.s_prime.size()), dp * dp / 16.0 * ss);

  tr.c_tilde = regularity_constant(s, p.lambda).c_tilde;
  const double r = sep_m / tr.n1;
  std::vector<Point2> grid;
  for (const std::int64_t x : e)
    for (const std::int64_t y : e) grid.push_back({static_cast<double>(x) / tr.n1, static_cast<double>(y) / tr.n1});
  const PlanarPointSet et(grid, r);
  if (!tr.s_prime.empty()) {
    std::vector<double> ys(tr.s_prime.begin(), tr.s_prime.end());
    const DirectionMeasure eta = DirectionMeasure::from_vectors(-static_cast<double>(tr.s2), ys);
    std::vector<double> w(grid.size(), 1.0 / static_cast<double>(grid.size()));
    tr.energy = directional_energy_check(grid, w, eta, 1.0 - 5.0 * p.lambda / 6.0, p.lambda,
                                         5.0 * p.lambda / 6.0, r);
    for (const std::int64_t s1 : tr.s_prime) {
      DirectionDensity d;
      d.s1 = s1;
      d.theta = std::atan2(static_cast<double>(s1), -static_cast<double>(tr.s2));
      const DensityNorm dn = projected_density_norm(et, d.theta, r);
      d.l2sq = dn.l2sq;
      d.cover_lower_bound = dn.cover_lower_bound;
      d.cover = covering_number_real(project(et, d.theta), r).count;
      tr.densities.push_back(d);
      add_check(checks, "density-norm bound <= cover (s1 = " + std::to_string(s1) + ")", true,
                d.cover_lower_bound, static_cast<double>(d.cover),
                d.cover_lower_bound <= static_cast<double>(d.cover));
    }
  }

  tr.conclusion_window = 4.0 * l * tr.n1;
  const FrequencySet concl = level_set(tp, std::pow(delta, 4) / 128.0, tr.conclusion_window);
  tr.conclusion_cover = covering_number(concl, sep_m).count;
  tr.conclusion_target = std::pow(delta, 10) / tr.c_tilde * tr.n1 / sep_m;
  tr.conclusion_met = static_cast<double>(tr.conclusion_cover) > tr.conclusion_target;
  return tr;
}

GranuleSearch extract_granules_for_coefficient(const GridMeasure& mu, const MultiplierSet& s, int k,
                                               std::int64_t a, double t, const ParamSet& p) {
  if (k < 0) throw InvalidInput("granule search: k must be >= 0");
  if (a == 0) throw InvalidInput("granule search: a must be nonzero");
  if (!(t > 0.0)) throw InvalidInput("granule search: t must be positive");
  require_probability(mu, "granule search");
  const auto l = static_cast<double>(s.scale());
  const auto q = static_cast<double>(mu.q());
  GranuleSearch out;
  const GridMeasure walked = walk_power(mu, s, k);
  out.coeff_abs = std::abs(fourier_coefficient(walked, a));
  if (!(out.coeff_abs > t))
    throw HypothesisFailed("granule search: |(nu^k * mu)^(" + std::to_string(a) + ")| = " +
                           std::to_string(out.coeff_abs) + " is not above t");
  if (!(t > std::pow(l, -p.c1))) throw HypothesisFailed("granule search: need t > L^-c1");
  const auto abs_a = static_cast<double>(std::abs(a));
  out.target_m = std::pow(l, k) * abs_a;
  out.target_n = std::pow(l, k + std::pow(8.0, -k)) * abs_a;
  out.reference_bound = std::pow(t, 33.0 * std::pow(2.0, k));

  const FourierTable table = fourier_table(mu);
  std::vector<double> ms;
  for (int j = 0; j <= 4; ++j) {
    const double m = std::floor(out.target_m * std::pow(2.0, -j));
    if (m >= 1.0 && std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
  }
  bool found = false;
  double best_mass = -1.0;
  for (const double m : ms) {
    for (int i = -1; i <= 3; ++i) {
      const double nwin = out.target_n * std::pow(2.0, i);
      if (!(nwin >= 2.0 * m) || 16.0 * nwin > q) continue;
      for (int j = 0; j <= 2; ++j) {
        GranuleGridPoint gp;
        gp.n = nwin;
        gp.m = m;
        gp.t = t * std::pow(2.0, -j);
        const auto nn = static_cast<std::int64_t>(std::floor(nwin));
        std::vector<std::int64_t> big;
        for (std::int64_t b = -nn; b <= nn; ++b)
          if (std::abs(table(b)) > gp.t) big.push_back(b);
        gp.cover = covering_number(big, m).count;
        gp.s = static_cast<double>(gp.cover) / (nwin / m) * (1.0 - 1e-9);
        gp.admissible = gp.s > 0.0;
        if (gp.admissible) {
          try {
            GranuleFamily fam = granulate(mu, nwin, m, gp.t, gp.s);
            gp.captured_mass = fam.captured_mass;
            gp.outcome = "ok";
            if (fam.captured_mass > best_mass) {
              best_mass = fam.captured_mass;
              out.family = std::move(fam);
              found = true;
            }
          } catch (const HypothesisFailed& e) {
            gp.admissible = false;
            gp.outcome = e.what();
          }
        } else {
          gp.outcome = "no coefficient above t";
        }
        out.grid.push_back(gp);
      }
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "granule search: no admissible (N, M, t') for a = " << a << "; searched";
    for (const auto& gp : out.grid) msg << " (" << gp.n << ", " << gp.m << ", " << gp.t << ")";
    if (out.grid.empty()) msg << " nothing (grid Q too small for the schedule)";
    throw ExtractionFailed(msg.str());
  }
  return out;
}

std::string to_string(DecompositionStatus s) {
  switch (s) {
    case DecompositionStatus::kConverged: return "converged";
    case DecompositionStatus::kBudgetExhausted: return "budget_exhausted";
    case DecompositionStatus::kExtractionFailed: return "extraction_failed";
  }
  return "unknown";
}

double walk_spectrum_sup(const GridMeasure& mu, const MultiplierSet& s, int k, double window) {
  const FourierTable table = fourier_table(mu);
  const std::int64_t q = mu.q();
  // All products s_1 ... s_k mod Q, with multiplicity.
  std::vector<std::int64_t> prods{1};
  for (int i = 0; i < k; ++i) {
    std::vector<std::int64_t> next;
    next.reserve(prods.size() * s.size());
    for (const std::int64_t pr : prods)
      for (const std::int64_t m : s.elements()) next.push_back(mulmod(pr, m, q));
    prods = std::move(next);
  }
  const auto count = static_cast<double>(prods.size());
  double best = 0.0;
  const auto nmax = static_cast<std::int64_t>(std::ceil(window)) - 1;
  for (std::int64_t n = -nmax; n <= nmax; ++n) {
    if (n == 0 || !(static_cast<double>(std::abs(n)) < window)) continue;
    Complex acc = 0.0;
    for (const std::int64_t pr : prods) acc += table(mulmod(pr, n, q));
    best = std::max(best, std::abs(acc / count));
  }
  return best;
}

DecompositionResult decompose(const GridMeasure& mu, const MultiplierSet& s, const ParamSet& p) {
  validate_params(p);
  require_probability(mu, "decompose");
  const double l = multiplier_scale(s, p);
  const double min_size = std::ceil(std::pow(l, p.beta) - 1e-9);
  if (!(static_cast<double>(s.size()) >= min_size))
    throw InvalidInput("decompose: |S| = " + std::to_string(s.size()) + " is below L^beta");
  const RegularityCertificate cert = regularity_constant(s, p.lambda);
  if (!(cert.c_tilde < p.c_tilde_max))
    throw InvalidInput("decompose: S is not regular enough, C~ = " + std::to_string(cert.c_tilde) +
                       " >= c_tilde_max = " + std::to_string(p.c_tilde_max) + " (witness [" +
                       std::to_string(cert.witness_left) + ", " +
                       std::to_string(cert.witness_left + cert.witness_length) + "] holds " +
                       std::to_string(cert.witness_count) + " elements)");
  const double window = std::pow(l, p.tau);
  const double threshold = std::pow(l, -p.tau);
  if (!(std::pow(2.0 * l, p.k) * window < static_cast<double>(mu.q()) / 2.0))
    throw InvalidInput("decompose: grid Q too small for k walk steps at window L^tau");

  DecompositionResult res;
  res.params = p;
  res.c_tilde = cert.c_tilde;
  const double raw_budget = std::ceil(std::pow(l, p.c_growth * p.tau));
  res.budget = std::isfinite(raw_budget) && raw_budget < static_cast<double>(p.iteration_cap)
                   ? static_cast<std::int64_t>(raw_budget)
                   : p.iteration_cap;

  const std::int64_t q = mu.q();
  std::vector<bool> mask(static_cast<std::size_t>(q), false);
  auto [mu1, mu2] = split_by_mask(mu, mask);
  const auto amax = static_cast<std::int64_t>(std::ceil(window)) - 1;

  for (;;) {
    if (mu1.mass() <= 0.0) {
      res.status = DecompositionStatus::kConverged;
      break;
    }
    const GridMeasure bar = mu1.normalized();
    const GridMeasure nu = p.convolved_loop ? walk_power(bar, s, p.k) : bar;
    std::int64_t pick = 0;
    double pick_abs = 0.0, max_coeff = 0.0;
    for (std::int64_t m = 1; m <= amax; ++m) {
      if (!(static_cast<double>(m) < window)) break;
      for (const std::int64_t cand : {m, -m}) {
        const double v = std::abs(fourier_coefficient(nu, cand));
        max_coeff = std::max(max_coeff, v);
        if (pick == 0 && v > threshold) {
          pick = cand;
          pick_abs = v;
        }
      }
    }
    if (pick == 0) {
      res.status = DecompositionStatus::kConverged;
      break;
    }
    if (res.ell >= res.budget) {
      res.status = DecompositionStatus::kBudgetExhausted;
      break;
    }
    GranuleSearch found;
    try {
      found = extract_granules_for_coefficient(bar, s, p.convolved_loop ? p.k : 0, pick, threshold, p);
    } catch (const ExtractionFailed& e) {
      res.status = DecompositionStatus::kExtractionFailed;
      res.failure = e.what();
      break;
    } catch (const HypothesisFailed& e) {
      res.status = DecompositionStatus::kExtractionFailed;
      res.failure = e.what();
      break;
    }
    const auto ball = union_mask(q, found.family.points, found.family.radius);
    for (std::int64_t j = 0; j < q; ++j)
      if (ball[static_cast<std::size_t>(j)]) mask[static_cast<std::size_t>(j)] = true;
    const double before = mu1.mass();
    std::tie(mu1, mu2) = split_by_mask(mu, mask);
    const double captured = before - mu1.mass();
    if (!(mu1.mass() <= before))
      throw InternalAssertion("decompose: remainder mass increased");
    IterationRecord rec;
    rec.ell = res.ell + 1;
    rec.a = pick;
    rec.t = pick_abs;
    rec.family_size = found.family.points.size();
    rec.captured_mass = captured;
    rec.remaining_mass = mu1.mass();
    rec.max_coeff = max_coeff;
    res.iterations.push_back(rec);
    res.families.push_back(std::move(found.family));
    ++res.ell;
    if (!(captured > 0.0)) {
      res.status = DecompositionStatus::kExtractionFailed;
      res.failure = "decompose: extracted family captured no remaining mass";
      break;
    }
  }

  // Exactness: every grid weight lies wholly in one part.
  for (std::int64_t j = 0; j < q; ++j) {
    const double w1 = mu1.weight(j), w2 = mu2.weight(j);
    if (w1 + w2 != mu.weight(j) || (w1 != 0.0 && w2 != 0.0) || (w2 != 0.0 && !mask[static_cast<std::size_t>(j)]))
      throw InternalAssertion("decompose: mu1 + mu2 differs from mu at index " + std::to_string(j));
  }
  res.mu1 = mu1;
  res.mu2 = mu2;
  res.final_spectrum_check = walk_spectrum_sup(mu1, s, p.k, window);
  res.conclusion_holds = res.final_spectrum_check <= threshold;
  if (res.status == DecompositionStatus::kConverged && p.convolved_loop && !res.conclusion_holds)
    throw InternalAssertion("decompose: converged but the walk spectrum of mu1 exceeds L^-tau");
  return res;
}

std::string iterations_csv(const DecompositionResult& r) {
  std::string out = "ell,a,t,family_size,captured_mass,remaining_mass,max_coeff\n";
  for (const auto& it : r.iterations) {
    out += std::to_string(it.ell) + "," + std::to_string(it.a) + "," + fmt(it.t) + "," +
           std::to_string(it.family_size) + "," + fmt(it.captured_mass) + "," + fmt(it.remaining_mass) + "," +
           fmt(it.max_coeff) + "\n";
  }
  return out;
}

}  // namespace torusdec
