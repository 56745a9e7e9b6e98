#ifndef TORUSDEC_ADDCOMB_HPP_
#define TORUSDEC_ADDCOMB_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "torusdec/measure.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec {

// {i : values[i] >= alpha/2}. Values must lie in [0, 1]; throws
// HypothesisFailed naming the deficit when sum(values) < alpha * n.
std::vector<std::size_t> markov_select(std::span<const double> values, double alpha);

struct RuzsaCheck {
  std::size_t diff_ab = 0;  // |A - B|
  std::size_t diff_ac = 0;  // |A - C|
  std::size_t diff_bc = 0;  // |B - C|
  std::size_t size_c = 0;
  double rhs = 0.0;  // |A - C| |B - C| / |C|
  bool holds = false;
};

RuzsaCheck ruzsa_bound_check(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                             std::span<const std::int64_t> c);

// Edges are (index into part_a, index into part_b).
struct BipartiteGraph {
  std::vector<std::int64_t> part_a;
  std::vector<std::int64_t> part_b;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Throws InvalidInput on out-of-range or duplicate edges.
void validate_graph(const BipartiteGraph& g);

// Counts of length-3 walks a - b1 - a1 - b for every (a, b), row-major
// |A| x |B|, computed as (Adj Adj^T) Adj.
std::vector<std::uint64_t> path3_counts(const BipartiteGraph& g);

struct BsgCertificate {
  std::size_t n = 0;
  double k = 0.0;
  std::size_t cross_edges = 0;        // |(A' x B') n E|
  std::uint64_t min_paths = 0;        // min over A' x B' of length-3 walks
  double need_a = 0.0;                // n / (16 K^2)
  double need_b = 0.0;                // n / (4 K)
  double need_cross = 0.0;            // |A'||B'| / (4K)
  double need_paths = 0.0;            // n^2 / (2^12 K^5)
  bool size_ok = false;
  bool cross_ok = false;
  bool paths_ok = false;
  bool all_ok() const { return size_ok && cross_ok && paths_ok; }
};

struct BsgResult {
  std::vector<std::size_t> a_prime;  // indices into part_a
  std::vector<std::size_t> b_prime;  // indices into part_b
  BsgCertificate certificate;
  int attempts = 0;
};

BsgCertificate verify_bsg(const BipartiteGraph& g, double k, std::span<const std::size_t> a_prime,
                          std::span<const std::size_t> b_prime);

// Requires |B| <= |A| = n and |E| >= n^2 / K. Throws ExtractionFailed when
// no certified pair is found within 32 attempts.
BsgResult bsg_refine(const BipartiteGraph& g, double k, std::uint64_t seed = 0);

struct BsgExtraction {
  FrequencySet a1;
  double theta = 0.0;
  double delta = 0.0;
  double r_bound = 0.0;
  double window_n = 0.0;
  double sep_m = 0.0;
  std::size_t size_a0 = 0;
  std::size_t size_a = 0;
  std::size_t size_a_bar = 0;
  std::size_t size_h = 0;
  std::size_t cover_f = 0;        // N(F(mu, delta^2/8) n [-2N, 2N]; M)
  std::size_t edges = 0;          // |E|
  std::size_t edges_bar = 0;      // |E bar|
  double k = 0.0;                 // |A bar|^2 / |E bar|
  std::size_t size_a_prime = 0;
  std::size_t size_b_prime = 0;
  std::uint64_t min_paths = 0;
  std::size_t diff_a_prime_b_prime = 0;
  std::size_t diff_a_prime_a_prime = 0;
  double ruzsa_rhs = 0.0;
  double alignment = 0.0;         // |mean over A1 of mu^(a)|
  std::size_t cover_a1_diff = 0;  // N(A1 - A1; M)
  double cover_bound = 0.0;       // 2^105 R^6 delta^-8 |A0|
  double size_bound = 0.0;        // c_size |A0| delta^4
  double c_size = 0.0;
  // Recorded, not asserted: the delta^2 form of the size conclusion.
  double size_bound_delta2 = 0.0;
  struct Check {
    std::string name;
    bool exact;
    bool holds;
    double lhs;
    double rhs;
  };
  std::vector<Check> checks;
};

// spec must cover [-2N, 2N] and come from a probability measure.
BsgExtraction fourier_bsg(const Spectrum& spec, const FrequencySet& a0, double window_n,
                          double sep_m, double delta, double r_bound, std::uint64_t seed = 0);

struct RegularityViolation {
  double center = 0.0;
  double radius = 0.0;
  double ratio = 0.0;  // rho(B) (diam / s)^alpha
};

// Sup over centers in the set and radii s = M 2^i <= diam of
// rho(B(x, s)) (diam / s)^alpha, for the uniform measure on points.
RegularityViolation regularity_sup(std::span<const std::int64_t> points, double diam,
                                   double scale_m, double alpha);

struct RegularSubsetReport {
  double n_input = 0.0;
  double n1 = 0.0;
  FrequencySet subset;
  double c_reg = 0.0;
  double alpha_reg = 0.0;
  double fitted_alpha = 0.0;  // largest alpha on a 0.01 grid with sup < c_target
  double scale = 0.0;
  double diam = 0.0;
  std::size_t input_cover = 0;
  int windows_tried = 0;
};

// Window N is a.window_n(). min_window_exponent f additionally requires
// log(N1/M) > f log(N/M). Throws HypothesisFailed when
// N(a; M) < (N/M)^target_alpha and ExtractionFailed with the violating
// (center, radius) when no window certifies.
RegularSubsetReport regular_subset_extract(const FrequencySet& a, double sep_m,
                                           double target_alpha, double eps,
                                           double c_target = 8.0,
                                           std::optional<double> min_window_exponent = std::nullopt);

}  // namespace torusdec

#endif  // TORUSDEC_ADDCOMB_HPP_
