#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "torusdec/error.hpp"
#include "torusdec/projection.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {
namespace {

constexpr double kPi = std::numbers::pi;

double integrate(double (*f)(double), double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += f(lo + (i + 0.5) * h);
  return acc * h;
}

TEST(Profiles, UnitMass) {
  EXPECT_NEAR(integrate(bump_phi_1d, -1.0, 1.0), 1.0, 1e-8);
  EXPECT_NEAR(integrate(marginal_psi, -1.0, 1.0), 1.0, 1e-8);
  const int n = 1000;
  const double h = 2.0 / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += bump_phi_2d(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h);
  EXPECT_NEAR(acc * h * h, 1.0, 1e-5);
}

TEST(Profiles, PsiIsTheMarginalOfPlanarPhi) {
  for (double x : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
    const int n = 20000;
    const double h = 2.0 / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += bump_phi_2d(x, -1.0 + (i + 0.5) * h);
    EXPECT_NEAR(acc * h, marginal_psi(x), 1e-7) << x;
  }
}

TEST(Kernels, FejerSpectrumIsTriangle) {
  const std::int64_t q = 1024, n = 32;
  const KernelProfile k = build_kernel(KernelKind::kFejer, 0.0, q, n);
  EXPECT_NEAR(fejer_value(n, 0.0), static_cast<double>(n), 1e-12);
  for (std::int64_t j = 0; j < q; ++j) {
    const std::int64_t f = j <= q / 2 ? j : j - q;
    const double want = std::max(0.0, 1.0 - std::abs(static_cast<double>(f)) / static_cast<double>(n));
    EXPECT_NEAR(k.spectrum[static_cast<std::size_t>(j)], want, 1e-10) << f;
  }
}

TEST(Kernels, BumpsAreNormalizedAndEven) {
  for (KernelKind kind : {KernelKind::kBumpPhi, KernelKind::kMarginalPsi, KernelKind::kWindowBump}) {
    const KernelProfile k = build_kernel(kind, 1.0 / 16.0, 4096);
    EXPECT_NEAR(k.spectrum[0], 1.0, 1e-12);
    EXPECT_LT(k.max_abs_imag, 1e-12);
    for (std::size_t j = 1; j < 50; ++j) EXPECT_NEAR(k.spectrum[j], k.spectrum[4096 - j], 1e-12);
  }
  EXPECT_THROW(build_kernel(KernelKind::kBumpPhi, 1.0 / 16.0, 64), InvalidInput);
  EXPECT_THROW(build_kernel(KernelKind::kBumpPhi, 1.5, 4096), InvalidInput);
}

TEST(Energy, SingleAtomScalingLaw) {
  const std::vector<Atom1> atom = {{0.0, 1.0}};
  for (double alpha : {0.3, 0.5, 0.8}) {
    const double e1 = alpha_energy(atom, alpha, 1.0 / 16.0).spatial;
    const double e2 = alpha_energy(atom, alpha, 1.0 / 64.0).spatial;
    EXPECT_NEAR(e2 / e1, std::pow(4.0, alpha), 0.01 * std::pow(4.0, alpha));
  }
  const PlanarPointSet p({{0.0, 0.0}}, 0.0);
  const double e1 = alpha_energy(p, 1.2, 1.0 / 16.0).spatial;
  const double e2 = alpha_energy(p, 1.2, 1.0 / 64.0).spatial;
  EXPECT_NEAR(e2 / e1, std::pow(4.0, 1.2), 0.01 * std::pow(4.0, 1.2));
}

TEST(Energy, SpatialAndSpectralAreComparable) {
  SplitRng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Atom1> atoms;
    const auto n = gen::int_in(rng, 1, 10);
    for (std::int64_t i = 0; i < n; ++i) atoms.push_back({gen::real_in(rng, -1.0, 1.0), 1.0 / static_cast<double>(n)});
    const EnergyReport e = alpha_energy(atoms, gen::real_in(rng, 0.2, 0.8), 1.0 / 32.0);
    EXPECT_GT(e.calibrated_ratio, 1.0 / 8.0);
    EXPECT_LT(e.calibrated_ratio, 8.0);
  }
  EXPECT_THROW(alpha_energy(std::vector<Atom1>{{0.0, 1.0}}, 1.0, 0.1), InvalidInput);
}

TEST(Energy, InhomogeneousWeightNeverExceedsRiesz) {
  // (1 + |xi|)^(alpha - d) <= |xi|^(alpha - d), so spatial >= riesz * spectral.
  SplitRng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Point2> pts;
    for (std::int64_t i = 0, n = gen::int_in(rng, 1, 20); i < n; ++i)
      pts.push_back({gen::real_in(rng, -1.0, 1.0), gen::real_in(rng, -1.0, 1.0)});
    const EnergyReport e2 = alpha_energy(PlanarPointSet(pts, 0.0), gen::real_in(rng, 0.2, 1.8), 1.0 / 16.0);
    EXPECT_GT(e2.calibrated_ratio, 0.97);
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.x);
    const EnergyReport e1 = alpha_energy(uniform_atoms(xs), gen::real_in(rng, 0.1, 0.9), 1.0 / 32.0);
    EXPECT_GT(e1.calibrated_ratio, 0.97);
  }
}

TEST(Energy, TwoDistantAtomsHalveTheSelfEnergy) {
  const double alpha = 0.5, r = 1.0 / 64.0;
  const double self = alpha_energy(std::vector<Atom1>{{0.0, 1.0}}, alpha, r).spatial;
  const double two = alpha_energy(std::vector<Atom1>{{-0.5, 0.5}, {0.5, 0.5}}, alpha, r).spatial;
  // Cross term 2 * 0.25 * |1|^-alpha up to smoothing.
  EXPECT_NEAR(two, 0.5 * self + 0.5, 0.01 * two);
}

TEST(Projection, ProjectsOntoDirection) {
  const std::vector<Point2> pts = {{1.0, 0.0}, {0.0, 1.0}};
  const auto z = project(pts, kPi / 2.0);
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], 1.0, 1e-15);
}

TEST(DensityNorm, LowerBoundNeverExceedsCover) {
  SplitRng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const double r = std::pow(2.0, -static_cast<double>(gen::int_in(rng, 3, 7)));
    std::vector<double> xs;
    const auto n = gen::int_in(rng, 1, 60);
    const double spread = gen::real_in(rng, 0.01, 1.0);
    for (std::int64_t i = 0; i < n; ++i) xs.push_back(gen::real_in(rng, -spread, spread));
    const auto atoms = uniform_atoms(xs);
    const DensityNorm dn = projected_density_norm(atoms, r);
    EXPECT_LE(dn.cover_lower_bound, static_cast<double>(covering_number_real(xs, r).count));
    std::vector<bool> mask(atoms.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.below(2) == 1;
    std::vector<double> sub;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) sub.push_back(xs[i]);
    EXPECT_LE(subset_cover_lower_bound(atoms, mask, r), static_cast<double>(covering_number_real(sub, r).count) + 1e-12);
  }
}

TEST(Directions, MeasureValidation) {
  EXPECT_THROW(DirectionMeasure({{0.0, 0.5}}), InvalidInput);
  const DirectionMeasure eta({{-0.1, 0.5}, {4.0, 0.5}});
  for (const auto& a : eta.atoms()) {
    EXPECT_GE(a.theta, 0.0);
    EXPECT_LT(a.theta, kPi);
  }
  const std::vector<double> ys = {1.0, -1.0};
  const DirectionMeasure v = DirectionMeasure::from_vectors(1.0, ys);
  EXPECT_NEAR(v.atoms()[0].theta, kPi / 4.0, 1e-15);
  EXPECT_NEAR(v.atoms()[1].theta, 3.0 * kPi / 4.0, 1e-15);
}

TEST(Directions, NeighbourhoodMass) {
  const std::vector<double> th = {0.0, kPi / 2.0};
  const DirectionMeasure eta = DirectionMeasure::uniform(th);
  // Directions nearly orthogonal to ybar = 0: only pi/2.
  EXPECT_DOUBLE_EQ(direction_nbhd_mass(eta, 0.0, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(direction_nbhd_mass(eta, kPi / 4.0, 0.1), 0.0);
}

TEST(Directions, RegularityOfASingleAtom) {
  const std::vector<double> th = {0.3};
  const DirectionRegularity reg = direction_regularity(DirectionMeasure::uniform(th), 0.5, 1.0 / 64.0);
  EXPECT_NEAR(reg.c_eta, 1.0 / std::sqrt(2.0 / 64.0), 1e-12);
}

TEST(Probe, DeclinesSmallSets) {
  const PlanarPointSet e({{0.0, 0.0}}, 0.1);
  const std::vector<double> th = {0.0, 1.0};
  const ProjectionProbe p = projection_probe(e, DirectionMeasure::uniform(th), 0.1, 0.5, 0.1, 0.01);
  EXPECT_TRUE(p.declined);
  EXPECT_EQ(p.decline_reason, "|E| <= r^-alpha");
}

TEST(Probe, GridProjectsToManyBalls) {
  std::vector<Point2> pts;
  const int g = 32;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) pts.push_back({(2.0 * i + 1.0) / g - 1.0, (2.0 * j + 1.0) / g - 1.0});
  std::vector<double> th;
  for (int i = 0; i < 16; ++i) th.push_back(0.1 + kPi * i / 16.0);
  const double r = 1.0 / 32.0;
  const ProjectionProbe p = projection_probe(PlanarPointSet(pts, r), DirectionMeasure::uniform(th), r, 0.5, 0.1,
                                             0.01, 0.1, 0.9);
  ASSERT_FALSE(p.declined) << p.decline_reason;
  EXPECT_NEAR(p.achieving_mass + p.exceptional_mass, 1.0, 1e-12);
  EXPECT_GT(p.achieving_mass, 0.5);
}

TEST(DirectionalEnergy, RecordsFittedConstant) {
  std::vector<Point2> pts;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pts.push_back({(i - 3.5) / 4.0, (j - 3.5) / 4.0});
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  std::vector<double> th;
  for (int i = 0; i < 12; ++i) th.push_back(kPi * (i + 0.5) / 12.0);
  const DirectionalEnergyCheck d =
      directional_energy_check(pts, w, DirectionMeasure::uniform(th), 0.6, 0.5, 0.4, 1.0 / 16.0);
  EXPECT_GT(d.lhs, 0.0);
  EXPECT_GT(d.planar_integral, 0.0);
  EXPECT_EQ(d.holds, d.lhs <= d.rhs);
  EXPECT_THROW(directional_energy_check(pts, w, DirectionMeasure::uniform(th), 0.6, 0.5, 0.4, 1.0 / 16.0, 1e-6),
               InvalidInput);
}

}  // namespace
}  // namespace torusdec
