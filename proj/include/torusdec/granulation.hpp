#ifndef TORUSDEC_GRANULATION_HPP_
#define TORUSDEC_GRANULATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "torusdec/measure.hpp"

namespace torusdec {

// F = F2 * F2 on the grid, F2 a polynomial bump of radius eps/N (at least
// two grid cells). Samples are indexed by grid offset from 0 (mod Q) and
// normalized so that sum(samples)/Q = 1; spectrum[a] = F^(a), index mod Q.
struct WindowBump {
  double n_window = 0.0;
  std::int64_t grid_q = 0;
  double radius_factor = 0.1;
  double f2_radius = 0.0;
  double support_radius = 0.0;  // largest |x| with F(x) > 0
  std::vector<double> samples;
  std::vector<double> spectrum;
  double c1 = 0.0;                  // max(F) / N
  double min_spectrum = 0.0;        // over all frequencies
  double min_spectrum_window = 0.0; // over |a| <= N
};

// Throws InvalidInput when Q < 16 N and ExtractionFailed carrying the
// failing frequency when a certificate check fails.
WindowBump build_window_bump(double n_window, std::int64_t q, double radius_factor = 0.1);

// 10 times the largest size of a strictly 1-separated subset of [-1, 1].
double granulation_c2();

struct CubeRecord {
  std::int64_t index = 0;
  double center = 0.0;
  double ball_mass = 0.0;  // mu(B(c_i, 1/M))
  double g_max = 0.0;      // G_i
  double h_ratio = 0.0;    // H_i
  std::int64_t argmax = 0; // grid index of the maximum of g in the cube
};

struct GranulationTrace {
  double cube_scale = 0.0;
  std::vector<CubeRecord> cubes;
  std::vector<std::int64_t> selected;  // cube indices in I
  double theta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double select_threshold = 0.0;   // ts / (2^5 C3)
  std::size_t hypothesis_cover = 0;
  double hypothesis_need = 0.0;    // s N / M
  std::size_t separated_size = 0;  // |A tilde|
  std::size_t aligned_size = 0;    // |A|
  std::vector<double> family_masses;
  std::size_t chosen_family = 0;
  double bound = 0.0;              // (ts)^3 / (families * 2^15 C3^3)
  int families = 2;
  double ref_bound_2d = 0.0;       // (ts)^3 / (2^16 C3^3)
};

struct GranuleFamily {
  std::vector<std::int64_t> points;  // grid indices
  std::int64_t grid_q = 0;
  double m = 0.0;
  double n = 0.0;
  double sep = 0.0;     // 1/M
  double radius = 0.0;  // 1/N
  double t = 0.0;
  double s = 0.0;
  double captured_mass = 0.0;
  GranulationTrace trace;
};

// N(a in [-N, N] with |mu^(a)| > t; M), the granulation hypothesis count
// (a = 0 included).
std::size_t granulation_cover(const GridMeasure& mu, double n, double m, double t);

// mu must be a probability measure; M a positive integer with N >= 2M.
GranuleFamily granulate(const GridMeasure& mu, double n, double m, double t, double s);

// Open-ball union mass of the family, recomputed by interval merging.
double union_mass(const GridMeasure& mu, const std::vector<std::int64_t>& points, double radius);
std::vector<bool> union_mask(std::int64_t q, const std::vector<std::int64_t>& points, double radius);

struct FamilyCheck {
  std::string name;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct FamilyReport {
  std::vector<FamilyCheck> checks;
  double recomputed_mass = 0.0;
  bool all_ok() const;
};

FamilyReport verify_family(const GranuleFamily& fam, const GridMeasure& mu);

}  // namespace torusdec

#endif  // TORUSDEC_GRANULATION_HPP_
