#ifndef TORUSDEC_PROJECTION_HPP_
#define TORUSDEC_PROJECTION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torusdec/measure.hpp"

namespace torusdec {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Points in [-1, 1]^2. When separated is set, pairwise distances exceed sep.
class PlanarPointSet {
 public:
  PlanarPointSet() = default;
  PlanarPointSet(std::vector<Point2> points, double sep, bool separated = false);

  std::span<const Point2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double sep() const { return sep_; }
  bool separated() const { return separated_; }

 private:
  std::vector<Point2> points_;
  double sep_ = 0.0;
  bool separated_ = false;
};

// Minimum pairwise distance (infinity for fewer than two points).
double min_pairwise_distance(std::span<const Point2> points);

struct DirectionAtom {
  double theta = 0.0;  // in [0, pi)
  double weight = 0.0;
};

class DirectionMeasure {
 public:
  DirectionMeasure() = default;
  // Angles are reduced mod pi; weights must be >= 0 and sum to 1.
  explicit DirectionMeasure(std::vector<DirectionAtom> atoms);
  static DirectionMeasure uniform(std::span<const double> thetas);
  // Uniform over the directions of the vectors (x, y_i).
  static DirectionMeasure from_vectors(double x, std::span<const double> ys);

  std::span<const DirectionAtom> atoms() const { return atoms_; }

 private:
  std::vector<DirectionAtom> atoms_;
};

// A weighted atom on the real line.
struct Atom1 {
  double x = 0.0;
  double w = 0.0;
};

std::vector<Atom1> atoms_from_grid(const GridMeasure& mu);
std::vector<Atom1> uniform_atoms(std::span<const double> xs);

enum class KernelKind { kBumpPhi, kMarginalPsi, kFejer, kWindowBump };

// Samples on the torus grid j/Q (index 0 is the origin) and the real
// Fourier coefficients spectrum[j] = (1/Q) sum_x samples[x] e(-jx/Q),
// index j taken mod Q.
struct KernelProfile {
  KernelKind kind = KernelKind::kBumpPhi;
  double scale_r = 0.0;
  std::int64_t grid_q = 0;
  std::int64_t fejer_n = 0;
  std::vector<double> samples;
  std::vector<double> spectrum;
  double max_abs_imag = 0.0;  // largest imaginary part discarded from the DFT
};

// For kFejer the scale is 1/n; pass n via fejer_n (scale_r is ignored).
// For kWindowBump the scale is 1/N with the default radius factor.
KernelProfile build_kernel(KernelKind kind, double scale_r, std::int64_t grid_q,
                           std::int64_t fejer_n = 0);

// Profiles on R: Phi (1-D, d = 1), Psi (marginal of the planar Phi), and the
// planar Phi, each normalized to integral 1 at scale 1.
double bump_phi_1d(double u);
double marginal_psi(double u);
double bump_phi_2d(double x, double y);
// Fejer kernel (1/n) (sin(pi n u) / sin(pi u))^2 with value n at u in Z.
double fejer_value(std::int64_t n, double u);

struct EnergyReport {
  double alpha = 0.0;
  int dim = 1;
  double smooth_r = 0.0;
  double spatial = 0.0;      // double integral of |x - y|^-alpha against (rho * Phi_r)^2
  double spectral = 0.0;     // integral of |FT|^2 (1 + |xi|)^(alpha - d)
  double ratio = 0.0;        // spatial / spectral
  double calibrated_ratio = 0.0;  // ratio / riesz_constant
  double riesz_constant = 0.0;  // pi^(alpha - d/2) Gamma((d - alpha)/2) / Gamma(alpha/2)
  double raster_step = 0.0;
  std::size_t raster_cells = 0;
};

// Energy of rho * Phi_r for atoms on R (d = 1). Throws InvalidInput for
// alpha outside (0, 1).
EnergyReport alpha_energy(std::span<const Atom1> atoms, double alpha, double smooth_r);
// Same for the uniform measure on a planar set (d = 2), alpha in (0, 2).
EnergyReport alpha_energy(const PlanarPointSet& e, double alpha, double smooth_r);
// Weighted planar atoms.
EnergyReport alpha_energy_2d(std::span<const Point2> points, std::span<const double> weights,
                             double alpha, double smooth_r);

std::vector<double> project(const PlanarPointSet& e, double theta);
std::vector<double> project(std::span<const Point2> points, double theta);

// eta-mass of directions x with |<x, y>| / (|x||y|) < rho, y at angle ybar.
double direction_nbhd_mass(const DirectionMeasure& eta, double ybar, double rho);

struct DensityNorm {
  double l2sq = 0.0;              // ||phi||_2^2 with phi = density of rho * Psi_r
  double cover_lower_bound = 0.0; // (4 r ||phi||^2)^-1
};

DensityNorm projected_density_norm(std::span<const Atom1> atoms, double r);
DensityNorm projected_density_norm(const PlanarPointSet& e, double theta, double r);
// rho(X)^2 / (4 r ||phi||^2) for the atoms selected by mask.
double subset_cover_lower_bound(std::span<const Atom1> atoms, const std::vector<bool>& mask,
                                double r);

struct DirectionRegularity {
  double c_eta = 0.0;
  double worst_theta = 0.0;
  double worst_eps = 0.0;
};

// sup over atom-centred balls and dyadic eps = r 2^i > r of eta(B(theta, eps)) / eps^beta,
// with the angular metric on P^1.
DirectionRegularity direction_regularity(const DirectionMeasure& eta, double beta, double r);

struct DirectionalEnergyCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double c_eta = 0.0;
  double c_d = 1.0;
  double c_add = 0.0;
  double planar_integral = 0.0;  // integral of |rho^|^2 |Phi_r^|^2 (1 + |x|)^(alpha - 2)
  double fitted_c_add = 0.0;     // smallest additive constant that makes the inequality hold
  bool holds = false;
  double worst_theta = 0.0;
  double worst_eps = 0.0;
};

// Weighted planar atoms as rho. Throws InvalidInput naming (theta, eps) when
// c_eta exceeds c_eta_cap.
DirectionalEnergyCheck directional_energy_check(std::span<const Point2> points,
                                                std::span<const double> weights,
                                                const DirectionMeasure& eta, double alpha,
                                                double beta, double beta_prime, double r,
                                                std::optional<double> c_eta_cap = std::nullopt,
                                                std::optional<double> c_add = std::nullopt);

struct ProbeDirection {
  double theta = 0.0;
  double weight = 0.0;
  std::size_t cover = 0;
  bool achieves = false;
};

struct ProjectionProbe {
  bool size_ok = false;          // |E| > r^-alpha
  bool separated_ok = false;     // pairwise distance > r
  bool concentration_ok = false; // max_x |E n B(x, rho)| < rho^kappa |E|
  bool direction_ok = false;     // max_y eta(V(y, rho)) < rho^kappa
  bool declined = false;
  std::string decline_reason;
  double threshold = 0.0;        // r^-(alpha + alpha_delta)/2
  double achieving_mass = 0.0;
  double exceptional_mass = 0.0;
  double predicted_min_mass = 0.0;  // 1 - r^eps0
  std::vector<ProbeDirection> directions;
};

ProjectionProbe projection_probe(const PlanarPointSet& e, const DirectionMeasure& eta, double r,
                                 double alpha, double alpha_delta, double eps0,
                                 double kappa = 0.1, double tau0 = 0.5);

}  // namespace torusdec

#endif  // TORUSDEC_PROJECTION_HPP_
