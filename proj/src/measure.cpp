#include "torusdec/measure.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "torusdec/error.hpp"

namespace torusdec {
namespace {

std::int64_t mod(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t q) {
  return static_cast<std::int64_t>(static_cast<__int128>(mod(a, q)) * mod(b, q) % q);
}

Complex unit_root(std::int64_t m, std::int64_t q) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

GridMeasure::GridMeasure(std::int64_t q, std::vector<double> weights)
    : q_(q), weights_(std::move(weights)), mass_(0.0) {
  if (q_ < 2) throw InvalidInput("measure: Q must be >= 2");
  if (static_cast<std::int64_t>(weights_.size()) != q_)
    throw InvalidInput("measure: expected " + std::to_string(q_) + " weights, got " +
                       std::to_string(weights_.size()));
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const double w = weights_[j];
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidInput("measure: weight at index " + std::to_string(j) +
                         " is negative or not finite");
  }
  mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (mass_ > 1.0 + 1e-12) throw InvalidInput("measure: total mass exceeds 1");
}

GridMeasure GridMeasure::zero(std::int64_t q) {
  if (q < 2) throw InvalidInput("measure: Q must be >= 2");
  return GridMeasure(q, std::vector<double>(static_cast<std::size_t>(q), 0.0));
}

GridMeasure GridMeasure::normalized() const {
  if (!(mass_ > 0.0)) throw InvalidInput("measure: cannot normalize a zero measure");
  std::vector<double> w(weights_);
  for (double& x : w) x /= mass_;
  // Rounding can overshoot by a few ulps; rescale once more if needed.
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total > 1.0)
    for (double& x : w) x /= total;
  return GridMeasure(q_, std::move(w));
}

GridMeasure uniform_measure(std::int64_t q) {
  if (q < 2) throw InvalidInput("measure: Q must be >= 2");
  return GridMeasure(q, std::vector<double>(static_cast<std::size_t>(q), 1.0 / static_cast<double>(q)));
}

GridMeasure dirac_measure(std::int64_t q, std::int64_t index) {
  if (q < 2) throw InvalidInput("measure: Q must be >= 2");
  if (index < 0 || index >= q) throw InvalidInput("measure: dirac index out of range");
  std::vector<double> w(static_cast<std::size_t>(q), 0.0);
  w[static_cast<std::size_t>(index)] = 1.0;
  return GridMeasure(q, std::move(w));
}

GridMeasure weights_measure(std::vector<double> weights) {
  const auto q = static_cast<std::int64_t>(weights.size());
  return GridMeasure(q, std::move(weights));
}

GridMeasure probability_measure(std::vector<double> weights) {
  double total = 0.0;
  for (const double x : weights) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput("measure: weights must be finite and nonnegative");
    total += x;
  }
  if (!(total > 0.0)) throw InvalidInput("measure: weights sum to zero");
  for (double& x : weights) x /= total;
  total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total > 1.0)
    for (double& x : weights) x /= total;
  return weights_measure(std::move(weights));
}

GridMeasure mixture_measure(std::span<const std::pair<double, GridMeasure>> components) {
  if (components.empty()) throw InvalidInput("mixture: no components");
  const std::int64_t q = components.front().second.q();
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(q), 0.0);
  for (const auto& [c, m] : components) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidInput("mixture: negative component weight");
    if (m.q() != q) throw InvalidInput("mixture: components have different Q");
    total += c;
    const auto src = m.weights();
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += c * src[j];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("mixture: weights must sum to 1");
  return GridMeasure(q, std::move(w));
}

std::int64_t nearest_index(std::int64_t q, double x) {
  const double frac = x - std::floor(x);
  return mod(static_cast<std::int64_t>(std::llround(frac * static_cast<double>(q))), q);
}

Spectrum::Spectrum(std::int64_t n_max, std::vector<Complex> coeffs, double source_mass,
                   bool aliased)
    : n_max_(n_max), coeffs_(std::move(coeffs)), source_mass_(source_mass), aliased_(aliased) {
  if (static_cast<std::int64_t>(coeffs_.size()) != 2 * n_max_ + 1)
    throw InternalAssertion("spectrum: coefficient count mismatch");
}

Complex Spectrum::operator()(Frequency n) const {
  if (n < -n_max_ || n > n_max_)
    throw InvalidInput("spectrum: frequency " + std::to_string(n) + " outside window");
  return coeffs_[static_cast<std::size_t>(n + n_max_)];
}

FourierTable::FourierTable(std::int64_t q, std::vector<Complex> coeffs, double source_mass)
    : q_(q), coeffs_(std::move(coeffs)), source_mass_(source_mass) {}

Complex FourierTable::operator()(Frequency n) const {
  return coeffs_[static_cast<std::size_t>(mod(n, q_))];
}

Spectrum FourierTable::window(std::int64_t n_max) const {
  if (n_max < 1) throw InvalidInput("spectrum: n_max must be >= 1");
  std::vector<Complex> c(static_cast<std::size_t>(2 * n_max + 1));
  for (std::int64_t n = -n_max; n <= n_max; ++n) c[static_cast<std::size_t>(n + n_max)] = (*this)(n);
  return Spectrum(n_max, std::move(c), source_mass_, 2 * n_max >= q_);
}

FourierTable fourier_table(const GridMeasure& mu) {
  auto c = fft::forward_real(mu.weights());
  c[0] = {mu.mass(), 0.0};
  return FourierTable(mu.q(), std::move(c), mu.mass());
}

Complex fourier_coefficient(const GridMeasure& mu, Frequency n) {
  const std::int64_t q = mu.q();
  const auto w = mu.weights();
  if (mod(n, q) == 0) return {mu.mass(), 0.0};
  Complex acc{0.0, 0.0};
  for (std::int64_t j = 0; j < q; ++j) {
    const double x = w[static_cast<std::size_t>(j)];
    if (x != 0.0) acc += x * unit_root(mulmod(n, j, q), q);
  }
  return acc;
}

Spectrum spectrum_direct(const GridMeasure& mu, std::int64_t n_max) {
  if (n_max < 1) throw InvalidInput("spectrum: n_max must be >= 1");
  const std::int64_t q = mu.q();
  const auto w = mu.weights();
  std::vector<std::int64_t> support;
  for (std::int64_t j = 0; j < q; ++j)
    if (w[static_cast<std::size_t>(j)] != 0.0) support.push_back(j);

  std::vector<Complex> c(static_cast<std::size_t>(2 * n_max + 1));
  c[static_cast<std::size_t>(n_max)] = {mu.mass(), 0.0};
  for (std::int64_t n = 1; n <= n_max; ++n) {
    Complex acc{0.0, 0.0};
    if (mod(n, q) == 0) {
      acc = {mu.mass(), 0.0};
    } else {
      for (const std::int64_t j : support)
        acc += w[static_cast<std::size_t>(j)] * unit_root(mulmod(n, j, q), q);
    }
    c[static_cast<std::size_t>(n_max + n)] = acc;
    c[static_cast<std::size_t>(n_max - n)] = std::conj(acc);
  }
  return Spectrum(n_max, std::move(c), mu.mass(), 2 * n_max >= q);
}

Spectrum spectrum_fft(const GridMeasure& mu, std::int64_t n_max) {
  const FourierTable table = fourier_table(mu);
  auto s = table.window(n_max);
  // Enforce exact conjugate symmetry for the n_max >= Q/2 wrap-around case.
  std::vector<Complex> c(static_cast<std::size_t>(2 * n_max + 1));
  for (std::int64_t n = 0; n <= n_max; ++n) {
    c[static_cast<std::size_t>(n_max + n)] = s(n);
    c[static_cast<std::size_t>(n_max - n)] = std::conj(s(n));
  }
  c[static_cast<std::size_t>(n_max)] = {mu.mass(), 0.0};
  return Spectrum(n_max, std::move(c), mu.mass(), s.aliased());
}

Spectrum spectrum(const GridMeasure& mu, std::int64_t n_max) {
  if (n_max < 1) throw InvalidInput("spectrum: n_max must be >= 1");
  const auto w = mu.weights();
  const auto nnz = static_cast<double>(std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; }));
  const double q = static_cast<double>(mu.q());
  const double direct_cost = nnz * static_cast<double>(n_max);
  const double fft_cost = 4.0 * q * std::log2(q);
  return direct_cost < fft_cost ? spectrum_direct(mu, n_max) : spectrum_fft(mu, n_max);
}

GridMeasure pushforward(const GridMeasure& mu, std::int64_t s) {
  if (s < 1) throw InvalidInput("pushforward: s must be >= 1");
  const std::int64_t q = mu.q();
  const auto w = mu.weights();
  std::vector<double> out(static_cast<std::size_t>(q), 0.0);
  for (std::int64_t j = 0; j < q; ++j) {
    const double x = w[static_cast<std::size_t>(j)];
    if (x != 0.0) out[static_cast<std::size_t>(mulmod(s, j, q))] += x;
  }
  return GridMeasure(q, std::move(out));
}

GridMeasure walk_step(const GridMeasure& mu, const MultiplierSet& set) {
  const std::int64_t q = mu.q();
  const auto w = mu.weights();
  const double share = 1.0 / static_cast<double>(set.size());
  std::vector<double> out(static_cast<std::size_t>(q), 0.0);
  for (std::int64_t j = 0; j < q; ++j) {
    const double x = w[static_cast<std::size_t>(j)];
    if (x == 0.0) continue;
    for (const std::int64_t s : set.elements())
      out[static_cast<std::size_t>(mulmod(s, j, q))] += x * share;
  }
  // Rounding can push the total a hair above the source mass.
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total > 1.0)
    for (double& x : out) x /= total;
  return GridMeasure(q, std::move(out));
}

GridMeasure walk_power(const GridMeasure& mu, const MultiplierSet& set, int steps) {
  if (steps < 0) throw InvalidInput("walk_power: steps must be >= 0");
  GridMeasure cur = mu;
  for (int i = 0; i < steps; ++i) cur = walk_step(cur, set);
  return cur;
}

std::pair<GridMeasure, GridMeasure> split_by_mask(const GridMeasure& mu,
                                                  const std::vector<bool>& region) {
  if (static_cast<std::int64_t>(region.size()) != mu.q())
    throw InvalidInput("split: mask size must equal Q");
  const auto w = mu.weights();
  std::vector<double> outside(w.size(), 0.0);
  std::vector<double> inside(w.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) (region[j] ? inside : outside)[j] = w[j];
  return {GridMeasure(mu.q(), std::move(outside)), GridMeasure(mu.q(), std::move(inside))};
}

std::pair<GridMeasure, GridMeasure> split_by_union(const GridMeasure& mu,
                                                   std::span<const std::int64_t> region) {
  std::vector<bool> mask(static_cast<std::size_t>(mu.q()), false);
  for (const std::int64_t j : region) {
    if (j < 0 || j >= mu.q()) throw InvalidInput("split: region index out of range");
    mask[static_cast<std::size_t>(j)] = true;
  }
  return split_by_mask(mu, mask);
}

double torus_distance(std::int64_t q, std::int64_t i, std::int64_t j) {
  const std::int64_t d = mod(i - j, q);
  return static_cast<double>(std::min(d, q - d)) / static_cast<double>(q);
}

}  // namespace torusdec
