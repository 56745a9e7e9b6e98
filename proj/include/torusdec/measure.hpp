#ifndef TORUSDEC_MEASURE_HPP_
#define TORUSDEC_MEASURE_HPP_

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "torusdec/multiplier_set.hpp"

namespace torusdec {

using Frequency = std::int64_t;
using Complex = std::complex<double>;

// A nonnegative (sub-)probability measure on the grid {j/Q : 0 <= j < Q} of
// the torus R/Z. Restrictions are kept unnormalized; call normalized()
// explicitly when a probability measure is required.
class GridMeasure {
 public:
  // Validates: Q >= 2, Q weights, each finite and >= 0, total <= 1 + 1e-12.
  GridMeasure(std::int64_t q, std::vector<double> weights);

  static GridMeasure zero(std::int64_t q);

  std::int64_t q() const { return q_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::int64_t j) const { return weights_[static_cast<std::size_t>(j)]; }
  double mass() const { return mass_; }

  GridMeasure normalized() const;

 private:
  std::int64_t q_;
  std::vector<double> weights_;
  double mass_;
};

GridMeasure uniform_measure(std::int64_t q);
GridMeasure dirac_measure(std::int64_t q, std::int64_t index);
GridMeasure weights_measure(std::vector<double> weights);
// Nonnegative weights of any positive total, rescaled to mass 1.
GridMeasure probability_measure(std::vector<double> weights);
// Convex combination; weights must be nonnegative and sum to 1, all
// components must share the same Q.
GridMeasure mixture_measure(std::span<const std::pair<double, GridMeasure>> components);

// Grid index nearest to the torus point x (x taken mod 1).
std::int64_t nearest_index(std::int64_t q, double x);

// Fourier coefficients mu^(n) = sum_j w_j exp(-2 pi i n j / Q), |n| <= n_max.
class Spectrum {
 public:
  Spectrum(std::int64_t n_max, std::vector<Complex> coeffs, double source_mass, bool aliased);

  std::int64_t n_max() const { return n_max_; }
  double source_mass() const { return source_mass_; }
  // True when the window is wide enough that n and n - Q both appear.
  bool aliased() const { return aliased_; }

  // Throws InvalidInput for |n| > n_max.
  Complex operator()(Frequency n) const;

 private:
  std::int64_t n_max_;
  std::vector<Complex> coeffs_;  // index n + n_max
  double source_mass_;
  bool aliased_;
};

// All Q coefficients, addressable by any integer frequency (reduced mod Q).
class FourierTable {
 public:
  FourierTable(std::int64_t q, std::vector<Complex> coeffs, double source_mass);

  std::int64_t q() const { return q_; }
  double source_mass() const { return source_mass_; }
  Complex operator()(Frequency n) const;
  Spectrum window(std::int64_t n_max) const;

 private:
  std::int64_t q_;
  std::vector<Complex> coeffs_;
  double source_mass_;
};

FourierTable fourier_table(const GridMeasure& mu);

// Chooses direct summation or a full-length FFT by estimated cost; the two
// paths agree to 1e-10.
Spectrum spectrum(const GridMeasure& mu, std::int64_t n_max);
Spectrum spectrum_direct(const GridMeasure& mu, std::int64_t n_max);
Spectrum spectrum_fft(const GridMeasure& mu, std::int64_t n_max);

// Single coefficient by direct summation with exact index reduction.
Complex fourier_coefficient(const GridMeasure& mu, Frequency n);

// Push-forward under x -> s x (mod 1); exact on the grid.
GridMeasure pushforward(const GridMeasure& mu, std::int64_t s);

// nu_S * mu = (1/|S|) sum_s T_s* mu.
GridMeasure walk_step(const GridMeasure& mu, const MultiplierSet& set);
GridMeasure walk_power(const GridMeasure& mu, const MultiplierSet& set, int steps);

// (restriction to the complement of region, restriction to region).
std::pair<GridMeasure, GridMeasure> split_by_union(const GridMeasure& mu,
                                                   std::span<const std::int64_t> region);
std::pair<GridMeasure, GridMeasure> split_by_mask(const GridMeasure& mu,
                                                  const std::vector<bool>& region);

// Torus distance between grid indices i and j, in units of 1 (not cells).
double torus_distance(std::int64_t q, std::int64_t i, std::int64_t j);

}  // namespace torusdec

#endif  // TORUSDEC_MEASURE_HPP_
