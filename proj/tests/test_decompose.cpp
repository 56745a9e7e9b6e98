#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gen.hpp"
#include "torusdec/decompose.hpp"
#include "torusdec/error.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {
namespace {

MultiplierSet full_set(std::int64_t l) { return generate_multipliers({MultiplierKind::kFull}, l); }

TEST(Params, DerivedValues) {
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  EXPECT_DOUBLE_EQ(p.tau0, 0.5);
  EXPECT_DOUBLE_EQ(p.c_tilde_max, 4.0);
  EXPECT_DOUBLE_EQ(p.u_exp, 1.125);
  EXPECT_NEAR(p.kappa, 1.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.c_growth, 68.0);
  EXPECT_DOUBLE_EQ(p.alpha_ini, 0.495);
  EXPECT_DOUBLE_EQ(p.eps0, 0.5 / 60.0);
  EXPECT_DOUBLE_EQ(p.alpha_high, 1.0 - 0.5 / 60.0);
  EXPECT_DOUBLE_EQ(p.alpha_inc, 0.1 / 1280.0);
  const ParamSet q = default_params(64.0, 0.7, 1.0, 0.3, 2);
  EXPECT_DOUBLE_EQ(q.tau0, 0.6);
  EXPECT_DOUBLE_EQ(q.u_exp, 2.0 + 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(q.c_growth, 136.0);
  EXPECT_NO_THROW(validate_params(p));
  EXPECT_NO_THROW(validate_params(q));
}

TEST(Params, ValidationNamesTheField) {
  auto expect_field = [](ParamSet p, const std::string& field) {
    try {
      validate_params(p);
      ADD_FAILURE() << field;
    } catch (const InvalidInput& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  ParamSet p = default_params();
  p.L = 1.0;
  expect_field(p, "params.L");
  p = default_params();
  p.tau = 0.7;
  expect_field(p, "params.tau");
  p = default_params();
  p.beta = 0.0;
  expect_field(p, "params.beta");
  p = default_params();
  p.iteration_cap = 0;
  expect_field(p, "params.iteration_cap");
  p = default_params();
  p.force_branch = "other";
  expect_field(p, "params.force_branch");
}

TEST(InitialDimension, MarkovCountMatchesDirectCoefficients) {
  SplitRng rng(21);
  const std::int64_t q = 1 << 12, l = 16;
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const GridMeasure mu = gen::atomic_measure(rng, q, 3, 0.0);
    const MultiplierSet s = gen::random_multipliers(rng, l, 6);
    const int n = static_cast<int>(gen::int_in(rng, 1, 2));
    const GridMeasure prev = walk_power(mu, s, n - 1);
    const GridMeasure cur = walk_power(mu, s, n);
    std::int64_t a = 1;
    for (std::int64_t c = 1; c <= 8; ++c)
      if (std::abs(fourier_coefficient(cur, c)) > std::abs(fourier_coefficient(cur, a))) a = c;
    const double delta0 = 0.9 * std::abs(fourier_coefficient(cur, a));
    if (!(delta0 > 1e-3)) continue;
    const InitialDimensionReport r = initial_dimension_report(mu, s, n, a, delta0);
    std::size_t count = 0;
    for (std::int64_t m : s.elements())
      if (std::abs(fourier_coefficient(prev, m * a)) > delta0 / 2.0) ++count;
    EXPECT_EQ(r.markov_count, count);
    EXPECT_TRUE(r.holds_proven);
    EXPECT_DOUBLE_EQ(r.window, 2.0 * l * static_cast<double>(a));
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(InitialDimension, Hypotheses) {
  const MultiplierSet s = full_set(16);
  EXPECT_THROW(initial_dimension_report(uniform_measure(4096), s, 1, 1, 0.5), HypothesisFailed);
  EXPECT_THROW(initial_dimension_report(dirac_measure(4096, 0), s, 1, 0, 0.5), InvalidInput);
  EXPECT_THROW(initial_dimension_report(dirac_measure(64, 0), s, 1, 1, 0.5), InvalidInput);
}

TEST(Bootstrap, DiracRunsWithExactChecks) {
  const std::int64_t q = 1 << 16;
  const MultiplierSet s = full_set(16);
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  const BootstrapTrace t = bootstrap_diagnostic(dirac_measure(q, 0), s, 1, 64.0, 8.0, 0.5, p);
  EXPECT_FALSE(t.branch.empty());
  for (const auto& c : t.checks)
    if (c.exact) EXPECT_TRUE(c.holds) << c.name << " " << c.lhs << " " << c.rhs;
  EXPECT_GT(t.n0, t.sep_m);
  EXPECT_LE(t.n0, 2.0 * t.window_n);
}

TEST(Bootstrap, BothBranchesCanBeForced) {
  const std::int64_t q = 1 << 16;
  const MultiplierSet s = full_set(16);
  for (const std::string branch : {"rho-large", "bsg-projection"}) {
    ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
    p.force_branch = branch;
    const BootstrapTrace t = bootstrap_diagnostic(dirac_measure(q, 0), s, 1, 64.0, 8.0, 0.5, p);
    EXPECT_EQ(t.branch, branch);
    EXPECT_TRUE(t.increment_met) << branch;
  }
}

TEST(Bootstrap, Hypotheses) {
  const MultiplierSet s = full_set(16);
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  const GridMeasure mu = dirac_measure(1 << 16, 0);
  EXPECT_THROW(bootstrap_diagnostic(mu, s, 1, 64.0, 2.0, 0.5, p), HypothesisFailed);   // N/M >= L
  EXPECT_THROW(bootstrap_diagnostic(mu, s, 1, 64.0, 60.0, 0.5, p), HypothesisFailed);  // N/M <= L^tau
  EXPECT_THROW(bootstrap_diagnostic(mu, s, 1, 64.0, 8.0, 0.01, p), HypothesisFailed);  // delta <= L^-C*
  EXPECT_THROW(bootstrap_diagnostic(uniform_measure(1 << 16), s, 1, 64.0, 8.0, 0.5, p), HypothesisFailed);
  EXPECT_THROW(bootstrap_diagnostic(dirac_measure(4096, 0), s, 1, 64.0, 8.0, 0.5, p), InvalidInput);
}

TEST(FinalBootstrap, DiracRunsWithExactChecks) {
  const std::int64_t q = 1 << 16;
  const MultiplierSet s = full_set(16);
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  const FinalBootstrapTrace t = final_bootstrap_diagnostic(dirac_measure(q, 0), s, 1, 64.0, 4.0, 0.5, p);
  for (const auto& c : t.checks)
    if (c.exact) EXPECT_TRUE(c.holds) << c.name << " " << c.lhs << " " << c.rhs;
  EXPECT_FALSE(t.s_prime.empty());
  for (const auto& d : t.densities) EXPECT_LE(d.cover_lower_bound, static_cast<double>(d.cover) + 1e-9);
  EXPECT_THROW(final_bootstrap_diagnostic(dirac_measure(q, 0), s, 1, 128.0, 4.0, 0.5, p), HypothesisFailed);
}

TEST(Granules, SearchFindsAnAtom) {
  const std::int64_t q = 1 << 16;
  const MultiplierSet s = full_set(16);
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  const GridMeasure mu = dirac_measure(q, 777);
  const GranuleSearch g = extract_granules_for_coefficient(mu, s, 1, 1, 0.5, p);
  EXPECT_GT(g.family.captured_mass, 0.0);
  EXPECT_FALSE(g.grid.empty());
  EXPECT_THROW(extract_granules_for_coefficient(uniform_measure(q), s, 1, 1, 0.5, p), HypothesisFailed);
}

TEST(Decompose, UniformNeedsNoGranules) {
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  const DecompositionResult r = decompose(uniform_measure(4096), full_set(16), p);
  EXPECT_EQ(r.status, DecompositionStatus::kConverged);
  EXPECT_EQ(r.ell, 0);
  EXPECT_DOUBLE_EQ(r.mu2.mass(), 0.0);
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_EQ(iterations_csv(r), "ell,a,t,family_size,captured_mass,remaining_mass,max_coeff\n");
}

TEST(Decompose, SplitIsExactOnMixtures) {
  SplitRng rng(5);
  const ParamSet p = default_params(16.0, 0.5, 0.5, 0.2, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const GridMeasure mu = gen::atomic_measure(rng, 1 << 14, 3, 0.5);
    const DecompositionResult r = decompose(mu, full_set(16), p);
    for (std::int64_t j = 0; j < mu.q(); ++j) EXPECT_EQ(r.mu1.weight(j) + r.mu2.weight(j), mu.weight(j));
    EXPECT_EQ(static_cast<int>(r.iterations.size()), r.ell);
    EXPECT_EQ(r.families.size(), r.iterations.size());
    std::istringstream csv(iterations_csv(r));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    EXPECT_EQ(lines, r.ell + 1);
    if (r.status == DecompositionStatus::kConverged) EXPECT_TRUE(r.conclusion_holds);
  }
}

TEST(Decompose, RejectsIrregularOrSmallSets) {
  const ParamSet p = default_params(64.0, 0.5, 1.0, 0.2, 1);
  std::vector<std::int64_t> tight;
  for (std::int64_t x = 64; x < 72; ++x) tight.push_back(x);
  try {
    decompose(uniform_measure(4096), MultiplierSet(64, tight), p);
    ADD_FAILURE();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("witness"), std::string::npos);
  }
  EXPECT_THROW(decompose(uniform_measure(4096), MultiplierSet(64, {64, 100}), p), InvalidInput);
  EXPECT_THROW(decompose(uniform_measure(4096), full_set(32), p), InvalidInput);  // scale mismatch
}

TEST(WalkSpectrum, MatchesWalkPower) {
  SplitRng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const GridMeasure mu = gen::atomic_measure(rng, 4096, 4, 0.3);
    const MultiplierSet s = gen::random_multipliers(rng, 16, static_cast<std::size_t>(gen::int_in(rng, 1, 8)));
    const int k = static_cast<int>(gen::int_in(rng, 0, 2));
    const double window = gen::real_in(rng, 1.5, 20.0);
    const GridMeasure nu = walk_power(mu, s, k);
    double want = 0.0;
    for (std::int64_t n = 1; static_cast<double>(n) < window; ++n)
      want = std::max({want, std::abs(fourier_coefficient(nu, n)), std::abs(fourier_coefficient(nu, -n))});
    EXPECT_NEAR(walk_spectrum_sup(mu, s, k, window), want, 1e-10);
  }
}

}  // namespace
}  // namespace torusdec
