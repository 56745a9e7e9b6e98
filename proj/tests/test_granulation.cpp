#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "torusdec/error.hpp"
#include "torusdec/granulation.hpp"

namespace torusdec {
namespace {

TEST(WindowBump, Certificate) {
  for (double n : {4.0, 16.0, 100.0, 256.0}) {
    const WindowBump w = build_window_bump(n, 1 << 14);
    EXPECT_GE(w.min_spectrum, -1e-12);
    EXPECT_GE(w.min_spectrum_window, 0.5);
    EXPECT_LT(w.support_radius, 1.0 / n);
    double total = 0.0;
    for (double v : w.samples) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total / (1 << 14), 1.0, 1e-12);
  }
  EXPECT_THROW(build_window_bump(100.0, 1024), InvalidInput);
}

TEST(Constants, C2IsTwenty) { EXPECT_DOUBLE_EQ(granulation_c2(), 20.0); }

TEST(UnionMass, MatchesMask) {
  SplitRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t q = gen::int_in(rng, 16, 500);
    const GridMeasure mu = gen::dense_measure(rng, q);
    std::vector<std::int64_t> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(gen::int_in(rng, 0, q - 1));
    const double radius = gen::real_in(rng, 0.001, 0.2);
    const auto mask = union_mask(q, pts, radius);
    double want = 0.0;
    for (std::int64_t j = 0; j < q; ++j) {
      bool in = false;
      for (auto p : pts) in = in || torus_distance(q, j, p) < radius;
      EXPECT_EQ(mask[static_cast<std::size_t>(j)], in);
      if (in) want += mu.weight(j);
    }
    EXPECT_NEAR(union_mass(mu, pts, radius), want, 1e-12);
  }
}

TEST(Granulate, DiracIsCapturedWhole) {
  const std::int64_t q = 1 << 14;
  const GridMeasure mu = dirac_measure(q, 1234);
  const double n = 64.0, m = 8.0, t = 0.5;
  const double s = static_cast<double>(granulation_cover(mu, n, m, t)) / (n / m) * (1.0 - 1e-9);
  const GranuleFamily f = granulate(mu, n, m, t, s);
  ASSERT_EQ(f.points.size(), 1u);
  EXPECT_LT(torus_distance(q, f.points[0], 1234), 1.0 / n);
  EXPECT_DOUBLE_EQ(f.captured_mass, 1.0);
  EXPECT_GT(f.captured_mass, f.trace.ref_bound_2d);
  EXPECT_TRUE(verify_family(f, mu).all_ok());
}

TEST(Granulate, RandomAtomicMeasuresMeetTheBound) {
  SplitRng rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const std::int64_t q = 1 << 13;
    const GridMeasure mu = gen::atomic_measure(rng, q, 6, 0.2 * rng.uniform());
    const double m = static_cast<double>(gen::int_in(rng, 2, 12));
    const double n = m * static_cast<double>(gen::int_in(rng, 2, 8));
    const double t = gen::real_in(rng, 0.05, 0.3);
    const std::size_t cover = granulation_cover(mu, n, m, t);
    const double s = static_cast<double>(cover) / (n / m) * (1.0 - 1e-9);
    const GranuleFamily f = granulate(mu, n, m, t, s);
    EXPECT_GT(f.captured_mass, f.trace.bound);
    const FamilyReport rep = verify_family(f, mu);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.holds) << c.name;
    EXPECT_NEAR(rep.recomputed_mass, f.captured_mass, 1e-12);
  }
}

TEST(Granulate, Hypotheses) {
  const GridMeasure mu = uniform_measure(4096);
  EXPECT_THROW(granulate(mu, 32.0, 4.0, 0.1, 0.5), HypothesisFailed);
  EXPECT_THROW(granulate(mu, 32.0, 4.5, 0.1, 0.5), InvalidInput);
  EXPECT_THROW(granulate(mu, 6.0, 4.0, 0.1, 0.5), InvalidInput);
  const GridMeasure half(4, {0.25, 0.25, 0.0, 0.0});
  EXPECT_THROW(granulate(half, 2.0, 1.0, 0.1, 0.5), InvalidInput);
}

}  // namespace
}  // namespace torusdec
