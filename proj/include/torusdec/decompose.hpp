#ifndef TORUSDEC_DECOMPOSE_HPP_
#define TORUSDEC_DECOMPOSE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torusdec/addcomb.hpp"
#include "torusdec/granulation.hpp"
#include "torusdec/measure.hpp"
#include "torusdec/multiplier_set.hpp"
#include "torusdec/projection.hpp"

namespace torusdec {

struct ParamSet {
  double L = 16.0;
  double beta = 0.5;
  double lambda = 0.5;
  double tau = 0.2;
  double tau0 = 0.5;
  int k = 1;
  double c_tilde_max = 4.0;  // L^tau0
  double kappa = 1.0 / 9.0;  // 1 - k / u_exp
  double c_growth = 68.0;    // 34 * 2^k
  double u_exp = 1.125;      // k + 8^-k
  double alpha_ini = 0.495;
  double alpha_high = 1.0 - 0.5 / 60.0;
  double alpha_delta = 0.1;
  double alpha_inc = 0.1 / 1280.0;
  double eps0 = 0.5 / 60.0;
  double c_star = 1.0;       // bootstrap requires delta > L^-c_star
  double c1 = 1.0;
  std::int64_t q_grid = 65536;
  std::int64_t iteration_cap = 10000;
  bool convolved_loop = true;
  double regularity_c = 8.0;  // C in the (C delta^-2, alpha - 10 eps) regularity target
  double rho_c = 1.0;         // C in the rho threshold 1024 C (N1/M)^(alpha_delta/640) delta^-6
  std::string force_branch;   // "", "rho-large" or "bsg-projection"
};

// Parameters with every derived field recomputed from (L, beta, lambda, tau, k).
ParamSet default_params(double L = 16.0, double beta = 0.5, double lambda = 0.5, double tau = 0.2,
                        int k = 1);
// Throws InvalidInput naming the first inconsistent field.
void validate_params(const ParamSet& p);

struct DiagnosticCheck {
  std::string name;
  bool exact = true;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct InitialDimensionReport {
  int n = 1;
  std::int64_t a = 0;
  double delta0 = 0.0;
  double coeff_abs = 0.0;         // |mu_n^(a)|
  std::size_t markov_count = 0;   // #{s : |mu_{n-1}^(s a)| > delta0/2}
  double markov_need = 0.0;       // |S| delta0 / 2
  double window = 0.0;            // 2 L |a|
  double sep = 0.0;               // |a|
  std::size_t cover = 0;
  double need = 0.0;              // |S| delta0 / 2
  double need_proven = 0.0;       // |S| delta0 / 4
  bool holds = false;             // cover >= need
  bool holds_proven = false;      // cover >= need_proven
};

InitialDimensionReport initial_dimension_report(const GridMeasure& mu, const MultiplierSet& s, int n,
                                                std::int64_t a, double delta0);

struct BootstrapTrace {
  int n = 1;
  double window_n = 0.0;
  double sep_m = 0.0;
  double n0 = 0.0;
  double n1 = 0.0;
  double n_prime = 0.0;
  double m_prime = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double delta4 = 0.0;            // delta^4 / 256
  double alpha = 0.0;
  double alpha_measured = 0.0;
  std::size_t hypothesis_cover = 0;
  std::size_t size_e0 = 0;
  std::size_t size_e0_prime = 0;
  std::size_t size_e1 = 0;
  double rho = 0.0;
  double rho_threshold = 0.0;
  std::string branch;
  RegularSubsetReport regular;
  // rho-large branch
  std::size_t size_e1_prime = 0;
  std::int64_t s0 = 0;
  std::size_t size_e2 = 0;
  // bsg-projection branch
  std::optional<BsgExtraction> bsg;
  std::size_t size_e = 0;
  std::size_t size_e3 = 0;
  std::int64_t s1 = 0;
  std::vector<std::int64_t> set_b;
  double c_tilde = 0.0;
  double c_tilde1 = 0.0;
  std::optional<ProjectionProbe> probe;
  std::string probe_note;
  // output
  std::size_t output_cover = 0;
  double output_need = 0.0;
  bool increment_met = false;
  std::vector<DiagnosticCheck> checks;
};

BootstrapTrace bootstrap_diagnostic(const GridMeasure& mu, const MultiplierSet& s, int n, double window_n,
                                    double sep_m, double delta, const ParamSet& params);

struct DirectionDensity {
  std::int64_t s1 = 0;
  double theta = 0.0;
  double l2sq = 0.0;
  double cover_lower_bound = 0.0;
  std::size_t cover = 0;
};

struct FinalBootstrapTrace {
  int n = 1;
  double window_n = 0.0;
  double sep_m = 0.0;
  double n1 = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double eps0 = 0.0;
  std::size_t hypothesis_cover = 0;
  double hypothesis_need = 0.0;
  RegularSubsetReport regular;
  std::size_t size_e = 0;
  std::int64_t s2 = 0;
  std::size_t size_q = 0;
  std::vector<std::int64_t> s_prime;
  double c_tilde = 0.0;
  std::optional<DirectionalEnergyCheck> energy;
  std::vector<DirectionDensity> densities;
  double conclusion_window = 0.0;
  std::size_t conclusion_cover = 0;
  double conclusion_target = 0.0;  // delta^10 / C~ * N1 / M
  bool conclusion_met = false;
  std::vector<DiagnosticCheck> checks;
};

FinalBootstrapTrace final_bootstrap_diagnostic(const GridMeasure& mu, const MultiplierSet& s, int n,
                                               double window_n, double sep_m, double delta,
                                               const ParamSet& params);

struct GranuleGridPoint {
  double n = 0.0;
  double m = 0.0;
  double t = 0.0;
  std::size_t cover = 0;
  double s = 0.0;
  bool admissible = false;
  double captured_mass = 0.0;
  std::string outcome;
};

struct GranuleSearch {
  GranuleFamily family;
  double target_m = 0.0;  // L^k |a|
  double target_n = 0.0;  // L^(k + 8^-k) |a|
  double coeff_abs = 0.0;
  double reference_bound = 0.0;  // t^(33 2^k), recorded only
  std::vector<GranuleGridPoint> grid;
};

// Throws HypothesisFailed when |((nu_S^{*k}) * mu)^(a)| <= t or t <= L^-c1
// and ExtractionFailed (listing the grid) when no grid point is admissible.
GranuleSearch extract_granules_for_coefficient(const GridMeasure& mu, const MultiplierSet& s, int k,
                                               std::int64_t a, double t, const ParamSet& params);

enum class DecompositionStatus { kConverged, kBudgetExhausted, kExtractionFailed };
std::string to_string(DecompositionStatus s);

struct IterationRecord {
  int ell = 0;
  std::int64_t a = 0;
  double t = 0.0;
  std::size_t family_size = 0;
  double captured_mass = 0.0;
  double remaining_mass = 0.0;
  double max_coeff = 0.0;
};

struct DecompositionResult {
  GridMeasure mu1 = GridMeasure::zero(2);
  GridMeasure mu2 = GridMeasure::zero(2);
  std::vector<GranuleFamily> families;
  int ell = 0;
  ParamSet params;
  DecompositionStatus status = DecompositionStatus::kConverged;
  double final_spectrum_check = 0.0;
  bool conclusion_holds = false;
  std::int64_t budget = 0;
  double c_tilde = 0.0;
  std::vector<IterationRecord> iterations;
  std::string failure;
};

DecompositionResult decompose(const GridMeasure& mu, const MultiplierSet& s, const ParamSet& params);

// max over 0 < |n| < L^tau of |((nu_S^{*k}) * mu)^(n)|, summed directly over
// all k-tuples of multipliers.
double walk_spectrum_sup(const GridMeasure& mu, const MultiplierSet& s, int k, double window);

// Iteration CSV with header ell,a,t,family_size,captured_mass,remaining_mass,max_coeff.
std::string iterations_csv(const DecompositionResult& r);

}  // namespace torusdec

#endif  // TORUSDEC_DECOMPOSE_HPP_
