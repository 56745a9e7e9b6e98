#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "torusdec/error.hpp"
#include "torusdec/io.hpp"
#include "torusdec/measure.hpp"

namespace torusdec {
namespace {

// Direct O(Q) evaluation, independent of the library.
Complex naive_coefficient(const GridMeasure& mu, std::int64_t n) {
  Complex acc = 0.0;
  const double q = static_cast<double>(mu.q());
  for (std::int64_t j = 0; j < mu.q(); ++j) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(((n % mu.q()) * j) % mu.q()) / q;
    acc += mu.weight(j) * std::polar(1.0, ang);
  }
  return acc;
}

TEST(GridMeasure, RejectsBadWeights) {
  EXPECT_THROW(GridMeasure(1, {1.0}), InvalidInput);
  EXPECT_THROW(GridMeasure(3, {0.5, 0.5}), InvalidInput);
  EXPECT_THROW(GridMeasure(2, {-0.1, 0.5}), InvalidInput);
  EXPECT_THROW(GridMeasure(2, {0.7, 0.7}), InvalidInput);
  EXPECT_THROW(GridMeasure(2, {NAN, 0.5}), InvalidInput);
}

TEST(GridMeasure, UniformHasVanishingCoefficients) {
  const GridMeasure mu = uniform_measure(256);
  EXPECT_NEAR(mu.mass(), 1.0, 1e-15);
  const Spectrum sp = spectrum(mu, 64);
  EXPECT_NEAR(std::abs(sp(0)), 1.0, 1e-12);
  for (std::int64_t n = 1; n <= 64; ++n) EXPECT_LT(std::abs(sp(n)), 1e-12);
}

TEST(GridMeasure, DiracCoefficientIsACharacter) {
  const std::int64_t q = 1024;
  const GridMeasure mu = dirac_measure(q, 100);
  for (std::int64_t n : {-7, -1, 1, 3, 50}) {
    const Complex want = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(n * 100) / q);
    EXPECT_NEAR(std::abs(fourier_coefficient(mu, n) - want), 0.0, 1e-12);
  }
}

TEST(Spectrum, FftMatchesNaiveOracle) {
  SplitRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t q = gen::int_in(rng, 16, 300);
    const GridMeasure mu = gen::dense_measure(rng, q);
    const std::int64_t n_max = gen::int_in(rng, 1, q / 2 - 1);
    const Spectrum a = spectrum_fft(mu, n_max);
    const Spectrum b = spectrum_direct(mu, n_max);
    for (std::int64_t n = -n_max; n <= n_max; ++n) {
      const Complex want = naive_coefficient(mu, n);
      EXPECT_LT(std::abs(a(n) - want), 1e-12) << "q=" << q << " n=" << n;
      EXPECT_LT(std::abs(b(n) - want), 1e-12);
    }
  }
}

TEST(Spectrum, ConjugateSymmetry) {
  SplitRng rng(5);
  const GridMeasure mu = gen::dense_measure(rng, 512);
  const Spectrum sp = spectrum(mu, 100);
  for (std::int64_t n = 1; n <= 100; ++n) EXPECT_LT(std::abs(sp(-n) - std::conj(sp(n))), 1e-13);
}

TEST(FourierTable, ReducesFrequenciesModQ) {
  SplitRng rng(3);
  const GridMeasure mu = gen::atomic_measure(rng, 128, 4);
  const FourierTable t = fourier_table(mu);
  for (std::int64_t n : {-300, -1, 5, 129, 1000}) EXPECT_LT(std::abs(t(n) - naive_coefficient(mu, n)), 1e-12);
}

TEST(Walk, PushforwardPreservesMassAndMovesAtoms) {
  const GridMeasure mu = dirac_measure(100, 7);
  const GridMeasure pushed = pushforward(mu, 17);
  EXPECT_DOUBLE_EQ(pushed.weight((7 * 17) % 100), 1.0);
  EXPECT_NEAR(pushed.mass(), 1.0, 1e-15);
}

TEST(Walk, StepSatisfiesCoefficientIdentity) {
  SplitRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::int64_t q = 1 << 12;
    const GridMeasure mu = gen::atomic_measure(rng, q, 6, 0.1);
    const MultiplierSet s = gen::random_multipliers(rng, 32, 5);
    const GridMeasure next = walk_step(mu, s);
    const FourierTable prev = fourier_table(mu);
    for (std::int64_t n = -64; n <= 64; ++n) {
      Complex avg = 0.0;
      for (std::int64_t m : s.elements()) avg += prev(m * n);
      avg /= static_cast<double>(s.size());
      EXPECT_LT(std::abs(fourier_coefficient(next, n) - avg), 1e-12);
    }
  }
}

TEST(Walk, PowerComposesSteps) {
  SplitRng rng(8);
  const GridMeasure mu = gen::atomic_measure(rng, 2048, 3);
  const MultiplierSet s = gen::random_multipliers(rng, 16, 4);
  const GridMeasure a = walk_power(mu, s, 3);
  const GridMeasure b = walk_step(walk_step(walk_step(mu, s), s), s);
  for (std::int64_t j = 0; j < 2048; ++j) EXPECT_NEAR(a.weight(j), b.weight(j), 1e-15);
  EXPECT_EQ(walk_power(mu, s, 0).weights().size(), mu.weights().size());
}

TEST(Split, PartsAreExactAndDisjoint) {
  SplitRng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t q = gen::int_in(rng, 4, 200);
    const GridMeasure mu = gen::dense_measure(rng, q);
    std::vector<bool> mask(static_cast<std::size_t>(q));
    for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = rng.below(2) == 1;
    const auto [out, in] = split_by_mask(mu, mask);
    for (std::int64_t j = 0; j < q; ++j) {
      EXPECT_EQ(out.weight(j) + in.weight(j), mu.weight(j));
      EXPECT_TRUE(out.weight(j) == 0.0 || in.weight(j) == 0.0);
    }
  }
}

TEST(TorusDistance, WrapsAround) {
  EXPECT_DOUBLE_EQ(torus_distance(100, 1, 99), 0.02);
  EXPECT_DOUBLE_EQ(torus_distance(100, 0, 50), 0.5);
  EXPECT_DOUBLE_EQ(torus_distance(100, 3, 3), 0.0);
}

TEST(MeasureIo, JsonRoundTrip) {
  SplitRng rng(4);
  const GridMeasure mu = gen::atomic_measure(rng, 64, 5, 0.25);
  for (bool sparse : {true, false}) {
    const GridMeasure back = io::measure_from_json(io::measure_to_json(mu, sparse));
    ASSERT_EQ(back.q(), mu.q());
    for (std::int64_t j = 0; j < 64; ++j) EXPECT_EQ(back.weight(j), mu.weight(j));
  }
  EXPECT_THROW(io::measure_from_json(io::Json::parse(R"({"Q": 4, "weights": {"dense": [1]}})")), InvalidInput);
  EXPECT_THROW(io::measure_from_json(io::Json::parse(R"({"Q": 4, "weights": {"sparse": [[9, 1.0]]}})")),
               InvalidInput);
}

TEST(MeasureIo, SpectrumCsvHeaderAndOrder) {
  const std::string csv = io::spectrum_csv(spectrum(uniform_measure(16), 2));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,re,im,abs");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 3), "-2,");
}

}  // namespace
}  // namespace torusdec
