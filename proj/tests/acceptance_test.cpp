// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, instance
// counts and time budgets are fixed below.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "torusdec/addcomb.hpp"
#include "torusdec/decompose.hpp"
#include "torusdec/error.hpp"
#include "torusdec/granulation.hpp"
#include "torusdec/io.hpp"
#include "torusdec/measure.hpp"
#include "torusdec/projection.hpp"
#include "torusdec/spectral_sets.hpp"

#ifndef TORUSDEC_CLI_PATH
#error "TORUSDEC_CLI_PATH must name the CLI binary"
#endif

namespace torusdec {
namespace {

namespace fs = std::filesystem;

constexpr double kIdentityTol = 1e-10;
constexpr double kSplitTol = 1e-12;
constexpr double kKernelTol = 1e-12;  // FFT roundoff allowed on F^ >= 0
constexpr double kScalingTol = 0.05;
constexpr double kEnergyFactor = 8.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. mu_n^(xi) = (1/|S|) sum_s mu_{n-1}^(s xi).
Outcome walk_identity() {
  SplitRng rng(101);
  const std::int64_t q = 1 << 14, l = 64;
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const GridMeasure mu = gen::atomic_measure(rng, q, 6, 0.3 * rng.uniform());
    const MultiplierSet s = gen::random_multipliers(rng, l, 16);
    const int n = static_cast<int>(gen::int_in(rng, 1, 3));
    const GridMeasure prev = walk_power(mu, s, n - 1);
    const GridMeasure cur = walk_step(prev, s);
    const Spectrum lhs = spectrum(cur, 256);
    const FourierTable rhs = fourier_table(prev);
    for (std::int64_t xi = -256; xi <= 256; ++xi) {
      Complex avg = 0.0;
      for (const std::int64_t m : s.elements()) avg += rhs(m * xi);
      avg /= static_cast<double>(s.size());
      worst = std::max(worst, std::abs(lhs(xi) - avg));
    }
  }
  return {worst <= kIdentityTol, "max error " + fmt("%.3g", worst) + " over 100 instances"};
}

// 2. Cover of the level set is at least |S| delta0 / 2.
Outcome initial_dimension() {
  SplitRng rng(202);
  const std::int64_t q = 1 << 14, l = 64;
  int ok = 0, run = 0;
  std::string first_fail;
  while (run < 100) {
    const GridMeasure mu = gen::atomic_measure(rng, q, 4, 0.2 * rng.uniform());
    const MultiplierSet s = gen::random_multipliers(rng, l, 16);
    const int n = static_cast<int>(gen::int_in(rng, 1, 2));
    const GridMeasure cur = walk_power(mu, s, n);
    std::int64_t a = 1;
    double best = 0.0;
    for (std::int64_t c = 1; c <= 8; ++c)
      for (const std::int64_t cand : {c, -c}) {
        const double v = std::abs(fourier_coefficient(cur, cand));
        if (v > best) best = v, a = cand;
      }
    const double delta0 = 0.9 * best;
    if (!(delta0 > 1e-6)) continue;
    ++run;
    std::size_t cover = 0;
    double need = 0.0;
    try {
      const InitialDimensionReport r = initial_dimension_report(mu, s, n, a, delta0);
      // Independent recount on the same level set.
      const Spectrum prev = spectrum(walk_power(mu, s, n - 1), static_cast<std::int64_t>(r.window));
      cover = covering_number(level_set(prev, delta0 / 2.0, r.window), static_cast<double>(std::abs(a))).count;
      need = static_cast<double>(s.size()) * delta0 / 2.0;
      if (cover != r.cover) throw InternalAssertion("cover mismatch");
    } catch (const InternalAssertion& e) {
      if (first_fail.empty()) first_fail = e.what();
      continue;
    }
    if (static_cast<double>(cover) >= need) ++ok;
    else if (first_fail.empty())
      first_fail = "cover " + std::to_string(cover) + " < " + fmt("%.4g", need);
  }
  return {ok == 100, std::to_string(ok) + "/100 instances" + (first_fail.empty() ? "" : "; first failure: " + first_fail)};
}

// 3. Markov: exhaustive on {0, 1/4, 1/2, 3/4, 1}^len, len <= 10.
Outcome markov_exhaustive() {
  const std::array<double, 5> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::array<double, 3> alphas = {0.25, 0.5, 0.75};
  std::uint64_t checked = 0, violations = 0;
  std::array<int, 10> digit{};
  std::array<double, 10> v{};
  for (std::size_t len = 1; len <= 10; ++len) {
    digit.fill(0);
    for (;;) {
      double sum = 0.0;
      for (std::size_t i = 0; i < len; ++i) sum += (v[i] = grid[static_cast<std::size_t>(digit[i])]);
      for (const double alpha : alphas) {
        if (sum < alpha * static_cast<double>(len)) continue;
        ++checked;
        std::size_t want = 0;
        for (std::size_t i = 0; i < len; ++i) want += v[i] >= alpha / 2.0;
        try {
          const auto sel = markov_select(std::span<const double>(v.data(), len), alpha);
          if (sel.size() != want || 2.0 * static_cast<double>(sel.size()) < alpha * static_cast<double>(len))
            ++violations;
        } catch (const std::exception&) {
          ++violations;
        }
      }
      std::size_t i = 0;
      while (i < len && ++digit[i] == 5) digit[i++] = 0;
      if (i == len) break;
    }
  }
  return {violations == 0, std::to_string(checked) + " admissible cases, " + std::to_string(violations) + " violations"};
}

// 4. Ruzsa: all A, B, C in [-4, 4] with |A|, |B| <= 3 and 1 <= |C| <= 3.
Outcome ruzsa_exhaustive() {
  std::vector<std::vector<std::int64_t>> subsets;
  for (std::uint32_t mask = 0; mask < (1u << 9); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    std::vector<std::int64_t> s;
    for (int i = 0; i < 9; ++i)
      if (mask >> i & 1u) s.push_back(i - 4);
    subsets.push_back(std::move(s));
  }
  // Difference sets as bitmasks over [-8, 8].
  auto diff_bits = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::uint32_t bits = 0;
    for (auto x : a)
      for (auto y : b) bits |= 1u << (x - y + 8);
    return bits;
  };
  std::uint64_t checked = 0, violations = 0;
  for (const auto& a : subsets)
    for (const auto& b : subsets)
      for (const auto& c : subsets) {
        if (c.empty()) continue;
        ++checked;
        const RuzsaCheck r = ruzsa_bound_check(a, b, c);
        const auto ab = static_cast<std::uint64_t>(__builtin_popcount(diff_bits(a, b)));
        const auto ac = static_cast<std::uint64_t>(__builtin_popcount(diff_bits(a, c)));
        const auto bc = static_cast<std::uint64_t>(__builtin_popcount(diff_bits(b, c)));
        if (!r.holds || r.diff_ab != ab || ab * c.size() > ac * bc) ++violations;
      }
  return {violations == 0, std::to_string(checked) + " triples, " + std::to_string(violations) + " violations"};
}

// 5. Greedy cover and packing against exhaustive search.
Outcome cover_packing_oracles() {
  SplitRng rng(505);
  int mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const auto pts = gen::int_set(rng, 12, -40, 40);
    const double m = 0.5 * static_cast<double>(gen::int_in(rng, 1, 16));
    if (covering_number(pts, m).count != oracle::brute_cover(pts, m)) ++mismatches;
    if (max_separated_subset(pts, m).size() != oracle::brute_packing(pts, m)) ++mismatches;
  }
  return {mismatches == 0, "200 sets, " + std::to_string(mismatches) + " mismatches"};
}

// 6. BSG on seeded graphs with the three conclusions rechecked by enumeration.
Outcome bsg_graphs() {
  const std::array<double, 4> ks = {1.5, 2.0, 3.0, 4.0};
  int low_k = 0, low_k_ok = 0, succeeded = 0, bad_certs = 0;
  for (int inst = 0; inst < 50; ++inst) {
    SplitRng rng(6000 + static_cast<std::uint64_t>(inst));
    const double k = ks[static_cast<std::size_t>(inst) % ks.size()];
    const auto n = static_cast<std::size_t>(gen::int_in(rng, 12, 60));
    BipartiteGraph g;
    for (std::size_t i = 0; i < n; ++i) {
      g.part_a.push_back(static_cast<std::int64_t>(i));
      g.part_b.push_back(static_cast<std::int64_t>(i));
    }
    do {
      g.edges.clear();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (rng.uniform() < std::min(1.0, 1.1 / k)) g.edges.emplace_back(i, j);
    } while (static_cast<double>(g.edges.size()) < static_cast<double>(n * n) / k);
    if (k <= 2.0) ++low_k;
    BsgResult r;
    try {
      r = bsg_refine(g, k, static_cast<std::uint64_t>(inst));
    } catch (const ExtractionFailed&) {
      continue;
    }
    ++succeeded;
    if (k <= 2.0) ++low_k_ok;
    const auto adj = oracle::adjacency(g);
    const auto fast = path3_counts(g);
    const double nd = static_cast<double>(n);
    std::size_t cross = 0;
    std::uint64_t min_paths = ~std::uint64_t{0};
    for (const std::size_t a : r.a_prime)
      for (const std::size_t b : r.b_prime) {
        cross += static_cast<std::size_t>(adj[a][b]);
        const std::uint64_t w = oracle::walks3(adj, a, b);
        if (w != fast[a * n + b]) ++bad_certs;
        min_paths = std::min(min_paths, w);
      }
    const double sa = static_cast<double>(r.a_prime.size()), sb = static_cast<double>(r.b_prime.size());
    const bool sizes = sa >= nd / (16.0 * k * k) && sb >= nd / (4.0 * k);
    const bool cross_ok = static_cast<double>(cross) >= sa * sb / (4.0 * k);
    const bool paths = static_cast<double>(min_paths) >= nd * nd / (4096.0 * std::pow(k, 5));
    if (!(sizes && cross_ok && paths)) ++bad_certs;
  }
  const double rate = static_cast<double>(low_k_ok) / static_cast<double>(low_k);
  return {bad_certs == 0 && rate >= 0.9,
          std::to_string(succeeded) + "/50 succeeded, K <= 2 rate " + fmt("%.3f", rate) + ", " +
              std::to_string(bad_certs) + " oracle violations"};
}

GridMeasure subgroup(std::int64_t q, std::int64_t p) {
  std::vector<double> w(static_cast<std::size_t>(q), 0.0);
  for (std::int64_t j = 0; j < p; ++j) w[static_cast<std::size_t>(j * (q / p))] = 1.0 / static_cast<double>(p);
  return GridMeasure(q, std::move(w));
}

// 7. Fourier BSG on engineered measures.
Outcome fourier_bsg_engineered() {
  const std::int64_t q = 1 << 12;
  SplitRng rng(707);
  std::vector<std::pair<std::string, GridMeasure>> cases;
  for (const std::int64_t p : {4, 8, 16}) cases.emplace_back("subgroup " + std::to_string(p), subgroup(q, p));
  for (const double w : {0.7, 0.8, 0.9}) {
    const std::vector<std::pair<double, GridMeasure>> parts = {{w, subgroup(q, 8)}, {1.0 - w, uniform_measure(q)}};
    cases.emplace_back("subgroup+uniform " + fmt("%.1f", w), mixture_measure(parts));
  }
  for (int i = 0; i < 4; ++i) {
    const std::vector<std::pair<double, GridMeasure>> parts = {{0.85, subgroup(q, 4 << (i % 2))},
                                                               {0.15, gen::atomic_measure(rng, q, 5, 0.0)}};
    cases.emplace_back("subgroup+atoms " + std::to_string(i), mixture_measure(parts));
  }
  const double n = 200.0, m = 4.0, delta = 0.5;
  int ok = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string first_fail;
  for (const auto& [name, mu] : cases) {
    try {
      const Spectrum sp = spectrum(mu, static_cast<std::int64_t>(2.0 * n));
      const FrequencySet a0 = max_separated_subset(level_set(sp, delta, n), m);
      if (a0.empty()) throw HypothesisFailed("empty A0");
      const double cover = static_cast<double>(covering_number(level_set(sp, delta * delta / 8.0, 2.0 * n), m).count);
      const double rb = std::max(1.0, cover / static_cast<double>(a0.size())) * (1.0 + 1e-12);
      const BsgExtraction x = fourier_bsg(sp, a0, n, m, delta, rb, 7);
      // Recompute the conclusions from A1.
      Complex mean = 0.0;
      for (const std::int64_t a : x.a1.elements()) mean += sp(a);
      mean /= static_cast<double>(x.a1.size());
      const auto d = difference_set(x.a1.elements(), x.a1.elements());
      const std::size_t cov = covering_number(d, m).count;
      const double bound = std::pow(2.0, 105) * std::pow(rb, 6) * std::pow(delta, -8) * static_cast<double>(a0.size());
      const bool sandwich = x.size_a <= x.size_a_bar && x.size_a_bar <= 2 * x.size_a && x.edges_bar >= x.edges &&
                            static_cast<double>(x.edges) >= delta * delta / 8.0 * static_cast<double>(x.size_a * x.size_a);
      const bool good = std::abs(mean) >= delta / 2.0 && cov == x.cover_a1_diff &&
                        static_cast<double>(cov) < bound && sandwich;
      min_slack = std::min(min_slack, std::log2(bound) - std::log2(static_cast<double>(std::max<std::size_t>(cov, 1))));
      if (good) ++ok;
      else if (first_fail.empty()) first_fail = name;
    } catch (const std::exception& e) {
      if (first_fail.empty()) first_fail = name + ": " + e.what();
    }
  }
  return {ok == static_cast<int>(cases.size()),
          std::to_string(ok) + "/" + std::to_string(cases.size()) + " measures, min log2 slack " +
              fmt("%.1f", min_slack) + (first_fail.empty() ? "" : "; first failure: " + first_fail)};
}

// 8. Granulation lower bound and the window-bump certificate.
Outcome granulation_bound() {
  SplitRng rng(808);
  int ok = 0, kernels_ok = 0;
  std::string first_fail;
  for (int inst = 0; inst < 20; ++inst) {
    const std::int64_t q = std::int64_t{1} << gen::int_in(rng, 12, 16);
    const GridMeasure mu = gen::atomic_measure(rng, q, 6, 0.3 * rng.uniform());
    const double m = static_cast<double>(gen::int_in(rng, 2, 16));
    double n = m * static_cast<double>(gen::int_in(rng, 2, 8));
    while (16.0 * n > static_cast<double>(q)) n /= 2.0;
    n = std::max(n, 2.0 * m);
    const double t = gen::real_in(rng, 0.05, 0.4);
    try {
      const WindowBump w = build_window_bump(n, q);
      if (w.min_spectrum >= -kKernelTol && w.min_spectrum_window >= 0.5) ++kernels_ok;
      const std::size_t cover = granulation_cover(mu, n, m, t);
      const double s = static_cast<double>(cover) / (n / m) * (1.0 - 1e-9);
      const GranuleFamily f = granulate(mu, n, m, t, s);
      const double c3 = f.trace.c3;
      const double bound = std::pow(t * s, 3) / (65536.0 * c3 * c3 * c3);
      const double captured = union_mass(mu, f.points, f.radius);
      if (captured > bound && std::abs(captured - f.captured_mass) <= kSplitTol) ++ok;
      else if (first_fail.empty())
        first_fail = "instance " + std::to_string(inst) + ": " + fmt("%.4g", captured) + " vs " + fmt("%.4g", bound);
    } catch (const std::exception& e) {
      if (first_fail.empty()) first_fail = "instance " + std::to_string(inst) + ": " + e.what();
    }
  }
  return {ok == 20 && kernels_ok == 20,
          std::to_string(ok) + "/20 bounds, " + std::to_string(kernels_ok) + "/20 kernel certificates" +
              (first_fail.empty() ? "" : "; first failure: " + first_fail)};
}

// 9. Decomposition of 0.3 atom + 0.7 uniform.
Outcome end_to_end() {
  const std::int64_t q = 1 << 16;
  const std::vector<std::pair<double, GridMeasure>> parts = {{0.3, dirac_measure(q, nearest_index(q, 0.3))},
                                                             {0.7, uniform_measure(q)}};
  const GridMeasure mu = mixture_measure(parts);
  ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  p.q_grid = q;
  const MultiplierSet s = generate_multipliers({MultiplierKind::kFull}, 16);
  DecompositionResult r;
  try {
    r = decompose(mu, s, p);
  } catch (const std::exception& e) {
    return {false, std::string("decompose threw: ") + e.what()};
  }
  double split_err = 0.0;
  for (std::int64_t j = 0; j < q; ++j)
    split_err = std::max(split_err, std::abs(r.mu1.weight(j) + r.mu2.weight(j) - mu.weight(j)));
  const double window = std::pow(16.0, p.tau), threshold = std::pow(16.0, -p.tau);
  const GridMeasure walked = walk_power(r.mu1, s, p.k);
  double recheck = 0.0;
  for (std::int64_t n = 1; static_cast<double>(n) < window; ++n)
    recheck = std::max({recheck, std::abs(fourier_coefficient(walked, n)), std::abs(fourier_coefficient(walked, -n))});
  bool separated = true;
  for (const auto& f : r.families)
    for (std::size_t i = 0; i < f.points.size(); ++i)
      for (std::size_t j = i + 1; j < f.points.size(); ++j)
        separated = separated && torus_distance(q, f.points[i], f.points[j]) > f.sep;
  const double m2 = r.mu2.mass();
  const bool converged = r.status == DecompositionStatus::kConverged;
  const bool pass = converged && split_err <= kSplitTol && recheck <= threshold && separated && m2 >= 0.25 &&
                    m2 <= 0.40;
  return {pass, "status " + to_string(r.status) + ", ell " + std::to_string(r.ell) + ", split error " +
                    fmt("%.2g", split_err) + ", recheck " + fmt("%.4f", recheck) + " vs " + fmt("%.4f", threshold) +
                    ", separated " + (separated ? "yes" : "no") + ", mu2 mass " + fmt("%.4f", m2) +
                    " (need [0.25, 0.40])"};
}

// 10. Density-norm lower bound never exceeds the covering number.
Outcome density_norm_soundness() {
  SplitRng rng(1010);
  int violations = 0;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<Point2> pts;
    const auto count = gen::int_in(rng, 1, 300);
    const double spread = gen::real_in(rng, 0.02, 1.0);
    for (std::int64_t i = 0; i < count; ++i)
      pts.push_back({gen::real_in(rng, -spread, spread), gen::real_in(rng, -spread, spread)});
    const double r = std::pow(2.0, -static_cast<double>(gen::int_in(rng, 3, 8)));
    const PlanarPointSet e(pts, 0.0);
    const double theta = gen::real_in(rng, 0.0, std::numbers::pi);
    const DensityNorm dn = projected_density_norm(e, theta, r);
    const std::size_t cover = covering_number_real(project(e, theta), r).count;
    if (dn.cover_lower_bound > static_cast<double>(cover)) ++violations;
  }
  return {violations == 0, "50 sets, " + std::to_string(violations) + " violations"};
}

// 11. Energy scaling law and the spatial/spectral comparison.
Outcome energy_calibration() {
  double worst_scaling = 0.0, lo = kEnergyFactor, hi = 1.0 / kEnergyFactor;
  auto ratio_seen = [&](const EnergyReport& e) {
    lo = std::min(lo, e.calibrated_ratio);
    hi = std::max(hi, e.calibrated_ratio);
  };
  const std::vector<Atom1> atom = {{0.0, 1.0}};
  for (const double alpha : {0.25, 0.5, 0.75})
    for (const double r : {1.0 / 16.0, 1.0 / 32.0}) {
      const EnergyReport a = alpha_energy(atom, alpha, r), b = alpha_energy(atom, alpha, r / 4.0);
      worst_scaling = std::max(worst_scaling, std::abs(b.spatial / a.spatial / std::pow(4.0, alpha) - 1.0));
      ratio_seen(a);
      ratio_seen(b);
    }
  const PlanarPointSet one({{0.0, 0.0}}, 0.0);
  for (const double alpha : {0.5, 1.0, 1.5}) {
    const EnergyReport a = alpha_energy(one, alpha, 1.0 / 16.0), b = alpha_energy(one, alpha, 1.0 / 64.0);
    worst_scaling = std::max(worst_scaling, std::abs(b.spatial / a.spatial / std::pow(4.0, alpha) - 1.0));
    ratio_seen(a);
    ratio_seen(b);
  }
  SplitRng rng(1111);
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<double> xs;
    for (std::int64_t i = 0, n = gen::int_in(rng, 1, 40); i < n; ++i) xs.push_back(gen::real_in(rng, -1.0, 1.0));
    ratio_seen(alpha_energy(uniform_atoms(xs), gen::real_in(rng, 0.1, 0.9), std::pow(2.0, -gen::int_in(rng, 4, 6))));
    std::vector<Point2> pts;
    for (std::int64_t i = 0, n = gen::int_in(rng, 1, 40); i < n; ++i)
      pts.push_back({gen::real_in(rng, -1.0, 1.0), gen::real_in(rng, -1.0, 1.0)});
    ratio_seen(alpha_energy(PlanarPointSet(pts, 0.0), gen::real_in(rng, 0.2, 1.8), std::pow(2.0, -gen::int_in(rng, 4, 5))));
  }
  const bool pass = worst_scaling <= kScalingTol && lo >= 1.0 / kEnergyFactor && hi <= kEnergyFactor;
  return {pass, "worst scaling deviation " + fmt("%.4f", worst_scaling) + ", calibrated ratio in [" + fmt("%.3f", lo) +
                    ", " + fmt("%.3f", hi) + "]"};
}

// 12. Every CLI experiment twice with a fixed seed; CSVs must match byte for byte.
Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "torusdec_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"spectrum", R"({"measure.kind": "random", "measure.count": 6, "params.q_grid": 16384, "spectrum.n_max": 64, "spectrum.steps": 2, "multipliers.kind": "random"})"},
      {"walk-decay", R"({"measure.kind": "random", "params.q_grid": 16384, "multipliers.kind": "random", "walk.steps": 3})"},
      {"regularity", R"({"multipliers.kind": "random", "multipliers.L": 64, "params.L": 64})"},
      {"bsg", R"({"bsg.mode": "graph", "bsg.n": 30, "bsg.density": 0.6})"},
      {"granulate", R"({"measure.kind": "random", "measure.count": 5, "params.q_grid": 16384, "granulate.N": 64, "granulate.M": 8, "granulate.t": 0.2})"},
      {"bootstrap", R"({"measure.kind": "dirac", "measure.index": 0, "bootstrap.N": 64, "bootstrap.M": 8, "bootstrap.delta": 0.5})"},
      {"final-bootstrap", R"({"measure.kind": "dirac", "measure.index": 0, "final.N": 64, "final.M": 4, "final.delta": 0.5})"},
      {"decompose", R"({"measure.kind": "random", "measure.count": 3, "params.q_grid": 16384})"},
      {"projection-probe", R"({"probe.random": 400, "probe.r": 0.0625})"},
  };
  int same = 0;
  std::string first_fail;
  for (const auto& [exp, cfg] : runs) {
    const fs::path c = dir / (exp + ".json");
    io::write_text(c.string(), cfg);
    std::string csv[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / (exp + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + TORUSDEC_CLI_PATH + "\" " + exp + " --config \"" + c.string() +
                              "\" --out \"" + out.string() + "\" --seed 1234 > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        ran = false;
        break;
      }
      csv[rep] = io::read_text((out / "summary.csv").string());
    }
    if (ran && !csv[0].empty() && csv[0] == csv[1]) ++same;
    else if (first_fail.empty()) first_fail = exp + (ran ? ": CSV differs" : ": run failed");
  }
  return {same == static_cast<int>(runs.size()),
          std::to_string(same) + "/" + std::to_string(runs.size()) + " experiments identical" +
              (first_fail.empty() ? "" : "; first failure: " + first_fail)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace torusdec

int main() {
  using namespace torusdec;
  const std::vector<Criterion> all = {
      {1, "walk-spectrum identity", 10.0, walk_identity},
      {2, "initial-dimension cover", 20.0, initial_dimension},
      {3, "markov exhaustive", 5.0, markov_exhaustive},
      {4, "ruzsa exhaustive", 10.0, ruzsa_exhaustive},
      {5, "cover/packing oracles", 10.0, cover_packing_oracles},
      {6, "bsg extraction", 60.0, bsg_graphs},
      {7, "fourier bsg", 60.0, fourier_bsg_engineered},
      {8, "granulation bound", 60.0, granulation_bound},
      {9, "end-to-end decomposition", 120.0, end_to_end},
      {10, "density-norm soundness", 30.0, density_norm_soundness},
      {11, "energy calibration", 30.0, energy_calibration},
      {12, "cli determinism", 30.0, cli_determinism},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("unexpected exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %-26s %s  %s; %.2fs of %.0fs%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
