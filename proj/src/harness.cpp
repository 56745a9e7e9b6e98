#include "torusdec/harness.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <iostream>
#include <numbers>
#include <set>

#include "rng.hpp"
#include "torusdec/addcomb.hpp"
#include "torusdec/decompose.hpp"
#include "torusdec/granulation.hpp"
#include "torusdec/measure.hpp"
#include "torusdec/multiplier_set.hpp"
#include "torusdec/projection.hpp"
#include "torusdec/spectral_sets.hpp"

namespace torusdec::harness {
namespace {

namespace fs = std::filesystem;
using io::Json;
using io::num;

const std::vector<std::string> kCommonKeys = {
    "experiment",         "seed",          "measure.kind",     "measure.index",     "measure.x",
    "measure.atoms",      "measure.uniform_weight", "measure.count", "measure.path",
    "multipliers.kind",   "multipliers.L", "multipliers.beta", "multipliers.step",  "multipliers.path",
    "params.L",           "params.beta",   "params.lambda",    "params.tau",        "params.k",
    "params.tau0",        "params.c_tilde_max", "params.kappa", "params.c_growth",  "params.u_exp",
    "params.alpha_ini",   "params.alpha_high", "params.alpha_delta", "params.alpha_inc", "params.eps0",
    "params.c_star",      "params.c1",     "params.q_grid",    "params.iteration_cap",
    "params.convolved_loop", "params.regularity_c", "params.rho_c", "params.force_branch"};

const std::map<std::string, std::vector<std::string>>& experiment_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"spectrum", {"spectrum.n_max", "spectrum.steps"}},
      {"walk-decay", {"walk.steps", "walk.window"}},
      {"regularity", {"regularity.lambda", "regularity.r"}},
      {"bsg", {"bsg.mode", "bsg.graph", "bsg.n", "bsg.density", "bsg.K", "bsg.N", "bsg.M", "bsg.delta"}},
      {"granulate", {"granulate.N", "granulate.M", "granulate.t", "granulate.s"}},
      {"bootstrap", {"bootstrap.n", "bootstrap.N", "bootstrap.M", "bootstrap.delta"}},
      {"final-bootstrap", {"final.n", "final.N", "final.M", "final.delta"}},
      {"decompose", {}},
      {"projection-probe",
       {"probe.points", "probe.grid", "probe.random", "probe.r", "probe.alpha", "probe.alpha_delta",
        "probe.eps0", "probe.kappa", "probe.tau0", "probe.directions", "probe.direction_count"}},
  };
  return keys;
}

// Typed access to a flat config object.
class Config {
 public:
  Config(const Json& j, std::optional<std::uint64_t> seed, fs::path base)
      : j_(j), seed_override_(seed), base_(std::move(base)) {}

  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key, double def) const {
    if (!has(key)) return def;
    return number(key);
  }
  double number(const std::string& key) const {
    require(key);
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number");
    return x;
  }
  std::int64_t integer(const std::string& key, std::int64_t def) const {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<std::int64_t>();
  }
  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
  }
  std::string str(const std::string& key, const std::string& def) const {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
  }
  const Json& raw(const std::string& key) const {
    require(key);
    return j_.at(key);
  }
  std::string path(const std::string& key) const {
    const std::string p = str(key, "");
    if (p.empty()) throw ConfigError(key, "expected a file path");
    fs::path full = fs::path(p).is_absolute() ? fs::path(p) : base_ / p;
    if (!fs::exists(full)) throw ConfigError(key, "file '" + full.string() + "' does not exist");
    return full.string();
  }
  std::uint64_t seed(const std::string& needed_by) const {
    if (seed_override_) return *seed_override_;
    if (!has("seed")) throw ConfigError("seed", "a seed is required by " + needed_by);
    const Json& v = j_.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::optional<std::uint64_t> seed_if_any() const {
    if (seed_override_ || has("seed")) return seed("the run");
    return std::nullopt;
  }

 private:
  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key, "missing required key");
  }
  const Json& j_;
  std::optional<std::uint64_t> seed_override_;
  fs::path base_;
};

// Wraps a library call so that InvalidInput raised inside is attributed to a key.
template <class Fn>
auto keyed(const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(key, e.what());
  }
}

ParamSet read_params(const Config& c) {
  ParamSet p = keyed("params", [&] {
    return default_params(c.num("params.L", 16.0), c.num("params.beta", 0.5), c.num("params.lambda", 0.5),
                          c.num("params.tau", 0.2), static_cast<int>(c.integer("params.k", 1)));
  });
  p.tau0 = c.num("params.tau0", p.tau0);
  p.c_tilde_max = c.num("params.c_tilde_max", p.c_tilde_max);
  p.kappa = c.num("params.kappa", p.kappa);
  p.c_growth = c.num("params.c_growth", p.c_growth);
  p.u_exp = c.num("params.u_exp", p.u_exp);
  p.alpha_ini = c.num("params.alpha_ini", p.alpha_ini);
  p.alpha_high = c.num("params.alpha_high", p.alpha_high);
  p.alpha_delta = c.num("params.alpha_delta", p.alpha_delta);
  p.alpha_inc = c.num("params.alpha_inc", p.alpha_inc);
  p.eps0 = c.num("params.eps0", p.eps0);
  p.c_star = c.num("params.c_star", p.c_star);
  p.c1 = c.num("params.c1", p.c1);
  p.q_grid = c.integer("params.q_grid", p.q_grid);
  p.iteration_cap = c.integer("params.iteration_cap", p.iteration_cap);
  p.convolved_loop = c.boolean("params.convolved_loop", p.convolved_loop);
  p.regularity_c = c.num("params.regularity_c", p.regularity_c);
  p.rho_c = c.num("params.rho_c", p.rho_c);
  p.force_branch = c.str("params.force_branch", p.force_branch);
  keyed("params", [&] { validate_params(p); return 0; });
  return p;
}

GridMeasure read_measure(const Config& c, const ParamSet& p) {
  const std::string kind = c.str("measure.kind", "uniform");
  const std::int64_t q = p.q_grid;
  if (kind == "file") return keyed("measure.path", [&] { return io::load_measure(c.path("measure.path")); });
  if (kind == "uniform") return uniform_measure(q);
  if (kind == "dirac") {
    if (c.has("measure.index")) {
      const std::int64_t idx = c.integer("measure.index", 0);
      if (idx < 0 || idx >= q) throw ConfigError("measure.index", "index out of range [0, Q)");
      return dirac_measure(q, idx);
    }
    const double x = c.num("measure.x", 0.0);
    return dirac_measure(q, nearest_index(q, x));
  }
  if (kind == "atoms") {
    const double wu = c.num("measure.uniform_weight", 0.0);
    if (!(wu >= 0.0 && wu <= 1.0)) throw ConfigError("measure.uniform_weight", "must lie in [0, 1]");
    std::vector<double> w(static_cast<std::size_t>(q), wu / static_cast<double>(q));
    double total = wu;
    if (c.has("measure.atoms")) {
      const Json& a = c.raw("measure.atoms");
      if (!a.is_array()) throw ConfigError("measure.atoms", "expected [[x, w], ...]");
      for (const Json& e : a) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
          throw ConfigError("measure.atoms", "expected [[x, w], ...]");
        const double wt = e[1].get<double>();
        if (!(wt >= 0.0)) throw ConfigError("measure.atoms", "weights must be nonnegative");
        w[static_cast<std::size_t>(nearest_index(q, e[0].get<double>()))] += wt;
        total += wt;
      }
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("measure.atoms", "atom and uniform weights must sum to 1");
    return GridMeasure(q, std::move(w));
  }
  if (kind == "random") {
    const std::int64_t count = c.integer("measure.count", 8);
    if (count < 1 || count > q) throw ConfigError("measure.count", "must lie in [1, Q]");
    SplitRng rng(c.seed("measure.kind = random"));
    std::vector<double> w(static_cast<std::size_t>(q), 0.0);
    for (std::int64_t i = 0; i < count; ++i)
      w[rng.below(static_cast<std::uint64_t>(q))] += 0.5 + rng.uniform();
    return probability_measure(std::move(w));
  }
  throw ConfigError("measure.kind", "unknown kind '" + kind + "'");
}

MultiplierSet read_multipliers(const Config& c, const ParamSet& p) {
  const std::string kind = c.str("multipliers.kind", "full");
  if (kind == "file")
    return keyed("multipliers.path", [&] { return io::load_multipliers(c.path("multipliers.path")); });
  const double ld = c.num("multipliers.L", p.L);
  if (ld != std::floor(ld) || ld < 1.0) throw ConfigError("multipliers.L", "must be a positive integer");
  MultiplierSpec spec;
  if (kind == "full") spec.kind = MultiplierKind::kFull;
  else if (kind == "progression") spec.kind = MultiplierKind::kProgression;
  else if (kind == "dyadic") spec.kind = MultiplierKind::kDyadicLacunary;
  else if (kind == "random") spec.kind = MultiplierKind::kRandom;
  else throw ConfigError("multipliers.kind", "unknown kind '" + kind + "'");
  spec.beta = c.num("multipliers.beta", p.beta);
  spec.step = c.integer("multipliers.step", 1);
  if (spec.kind == MultiplierKind::kRandom) spec.seed = c.seed("multipliers.kind = random");
  return keyed("multipliers", [&] { return generate_multipliers(spec, static_cast<std::int64_t>(ld)); });
}

double sup_window(const GridMeasure& mu, std::int64_t window, std::int64_t* arg) {
  const Spectrum sp = spectrum(mu, window);
  double best = -1.0;
  for (std::int64_t n = -window; n <= window; ++n) {
    if (n == 0) continue;
    const double v = std::abs(sp(n));
    if (v > best) {
      best = v;
      *arg = n;
    }
  }
  return best;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string checks_csv(const std::vector<DiagnosticCheck>& checks) {
  std::string out = "check,exact,holds,lhs,rhs\n";
  for (const auto& ch : checks) {
    std::string name = ch.name;
    std::replace(name.begin(), name.end(), ',', ';');
    out += "\"" + name + "\"," + bool_str(ch.exact) + "," + bool_str(ch.holds) + "," + num(ch.lhs) + "," +
           num(ch.rhs) + "\n";
  }
  return out;
}

RunResult run_spectrum(const Config& c, const GridMeasure& mu, const MultiplierSet& s) {
  const std::int64_t n_max = c.integer("spectrum.n_max", 64);
  const std::int64_t steps = c.integer("spectrum.steps", 0);
  if (n_max < 1) throw ConfigError("spectrum.n_max", "must be >= 1");
  if (steps < 0) throw ConfigError("spectrum.steps", "must be >= 0");
  const GridMeasure walked = walk_power(mu, s, static_cast<int>(steps));
  const Spectrum sp = keyed("spectrum.n_max", [&] { return spectrum(walked, n_max); });
  RunResult r;
  r.report["n_max"] = n_max;
  r.report["steps"] = steps;
  r.report["aliased"] = sp.aliased();
  r.report["mass"] = walked.mass();
  r.summary_csv = io::spectrum_csv(sp);
  return r;
}

RunResult run_walk_decay(const Config& c, const GridMeasure& mu, const MultiplierSet& s) {
  const std::int64_t steps = c.integer("walk.steps", 6);
  const std::int64_t window = c.integer("walk.window", 64);
  if (steps < 0) throw ConfigError("walk.steps", "must be >= 0");
  if (window < 1 || 2 * window >= mu.q()) throw ConfigError("walk.window", "must satisfy 1 <= window < Q/2");
  RunResult r;
  r.summary_csv = "k,sup_abs\n";
  Json rows = Json::array();
  GridMeasure cur = mu;
  for (std::int64_t k = 0; k <= steps; ++k) {
    if (k > 0) cur = walk_step(cur, s);
    std::int64_t arg = 0;
    const double sup = sup_window(cur, window, &arg);
    rows.push_back(Json{{"k", k}, {"sup_abs", sup}, {"argmax", arg}});
    r.summary_csv += std::to_string(k) + "," + num(sup) + "\n";
  }
  r.report["window"] = window;
  r.report["decay"] = rows;
  return r;
}

RunResult run_regularity(const Config& c, const MultiplierSet& s, const ParamSet& p) {
  const double lambda = c.num("regularity.lambda", p.lambda);
  const double rr = c.num("regularity.r", 1.0);
  const RegularityCertificate cert =
      keyed("regularity.lambda", [&] { return regularity_constant(s, lambda, rr); });
  RunResult r;
  r.report["certificate"] = io::to_json(cert);
  r.report["size"] = s.size();
  r.report["within_c_tilde_max"] = cert.c_tilde < p.c_tilde_max;
  r.summary_csv = "lambda,scale_r,c_tilde,witness_left,witness_length,witness_count,size\n" + num(cert.lambda) +
                  "," + num(cert.scale_r) + "," + num(cert.c_tilde) + "," + num(cert.witness_left) + "," +
                  num(cert.witness_length) + "," + std::to_string(cert.witness_count) + "," +
                  std::to_string(s.size()) + "\n";
  return r;
}

RunResult run_bsg(const Config& c, const GridMeasure& mu) {
  const std::string mode = c.str("bsg.mode", "graph");
  RunResult r;
  if (mode == "fourier") {
    const double n = c.number("bsg.N");
    const double m = c.number("bsg.M");
    const double delta = c.number("bsg.delta");
    if (!(m >= 1.0 && n > m)) throw ConfigError("bsg.N", "need N > M >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("bsg.delta", "must lie in (0, 1)");
    const FourierTable table = fourier_table(mu);
    const auto n_max = static_cast<std::int64_t>(std::ceil(2.0 * n));
    if (2 * n_max >= mu.q()) throw ConfigError("bsg.N", "window 2N too large for the grid");
    const FrequencySet a0 = max_separated_subset(level_set(table, delta, n), m);
    if (a0.empty()) throw HypothesisFailed("bsg: level set F(mu, delta) n [-N, N] is empty");
    const double cover_f = static_cast<double>(covering_number(level_set(table, delta * delta / 8.0, 2.0 * n), m).count);
    const double rb = std::max(1.0, cover_f / static_cast<double>(a0.size())) * (1.0 + 1e-12);
    const std::uint64_t seed = c.seed_if_any().value_or(0);
    const BsgExtraction ex = fourier_bsg(table.window(n_max), a0, n, m, delta, rb, seed);
    r.report["extraction"] = io::to_json(ex);
    r.summary_csv = "check,exact,holds,lhs,rhs\n";
    for (const auto& ch : ex.checks) {
      std::string name = ch.name;
      std::replace(name.begin(), name.end(), ',', ';');
      r.summary_csv += "\"" + name + "\"," + bool_str(ch.exact) + "," + bool_str(ch.holds) + "," + num(ch.lhs) +
                       "," + num(ch.rhs) + "\n";
    }
    return r;
  }
  if (mode != "graph") throw ConfigError("bsg.mode", "expected graph or fourier");
  BipartiteGraph g;
  if (c.has("bsg.graph")) {
    g = keyed("bsg.graph", [&] { return io::read_edge_list(c.path("bsg.graph")); });
  } else {
    const std::int64_t n = c.integer("bsg.n", 40);
    const double density = c.num("bsg.density", 0.5);
    if (n < 1 || n > 2000) throw ConfigError("bsg.n", "must lie in [1, 2000]");
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("bsg.density", "must lie in (0, 1]");
    SplitRng rng(c.seed("a random bsg graph"));
    for (std::int64_t i = 0; i < n; ++i) {
      g.part_a.push_back(i);
      g.part_b.push_back(i);
    }
    for (std::size_t i = 0; i < g.part_a.size(); ++i)
      for (std::size_t j = 0; j < g.part_b.size(); ++j)
        if (rng.uniform() < density) g.edges.emplace_back(i, j);
  }
  if (g.edges.empty()) throw HypothesisFailed("bsg: graph has no edges");
  const double na = static_cast<double>(g.part_a.size());
  const double k = c.num("bsg.K", na * na / static_cast<double>(g.edges.size()));
  const BsgResult res = keyed("bsg.K", [&] { return bsg_refine(g, k, c.seed_if_any().value_or(0)); });
  const auto& cert = res.certificate;
  r.report["certificate"] = io::to_json(cert);
  r.report["a_prime"] = res.a_prime;
  r.report["b_prime"] = res.b_prime;
  r.report["attempts"] = res.attempts;
  r.report["edges"] = g.edges.size();
  r.summary_csv = "n,K,size_a_prime,size_b_prime,cross_edges,min_paths,size_ok,cross_ok,paths_ok\n" +
                  std::to_string(cert.n) + "," + num(cert.k) + "," + std::to_string(res.a_prime.size()) + "," +
                  std::to_string(res.b_prime.size()) + "," + std::to_string(cert.cross_edges) + "," +
                  std::to_string(cert.min_paths) + "," + bool_str(cert.size_ok) + "," + bool_str(cert.cross_ok) +
                  "," + bool_str(cert.paths_ok) + "\n";
  return r;
}

RunResult run_granulate(const Config& c, const GridMeasure& mu) {
  const double n = c.number("granulate.N");
  const double m = c.number("granulate.M");
  const double t = c.number("granulate.t");
  double s = 0.0;
  if (c.has("granulate.s")) {
    s = c.number("granulate.s");
  } else {
    const std::size_t cover = keyed("granulate.N", [&] { return granulation_cover(mu, n, m, t); });
    s = static_cast<double>(cover) / (n / m) * (1.0 - 1e-9);
  }
  const GranuleFamily fam = keyed("granulate", [&] { return granulate(mu, n, m, t, s); });
  const FamilyReport vr = verify_family(fam, mu);
  RunResult r;
  r.report["family"] = io::to_json(fam);
  Json checks = Json::array();
  for (const auto& ch : vr.checks)
    checks.push_back(Json{{"name", ch.name}, {"holds", ch.holds}, {"lhs", ch.lhs}, {"rhs", ch.rhs}});
  r.report["verification"] = Json{{"checks", checks}, {"recomputed_mass", vr.recomputed_mass}, {"all_ok", vr.all_ok()}};
  if (!vr.all_ok()) throw InternalAssertion("granulate: family verification failed");
  r.summary_csv = "point,x,ball_mass\n";
  for (const std::int64_t pt : fam.points)
    r.summary_csv += std::to_string(pt) + "," + num(static_cast<double>(pt) / static_cast<double>(mu.q())) + "," +
                     num(union_mass(mu, {pt}, fam.radius)) + "\n";
  return r;
}

RunResult run_bootstrap(const Config& c, const GridMeasure& mu, const MultiplierSet& s, const ParamSet& p,
                        bool final_step) {
  const std::string pre = final_step ? "final." : "bootstrap.";
  const std::int64_t n = c.integer(pre + "n", 1);
  if (n < 1) throw ConfigError(pre + "n", "must be >= 1");
  const double nn = c.number(pre + "N");
  const double m = c.number(pre + "M");
  const double delta = c.number(pre + "delta");
  RunResult r;
  if (final_step) {
    const FinalBootstrapTrace tr = keyed(pre + "N", [&] {
      return final_bootstrap_diagnostic(mu, s, static_cast<int>(n), nn, m, delta, p);
    });
    r.report["trace"] = io::to_json(tr);
    r.summary_csv = checks_csv(tr.checks);
  } else {
    const BootstrapTrace tr =
        keyed(pre + "N", [&] { return bootstrap_diagnostic(mu, s, static_cast<int>(n), nn, m, delta, p); });
    r.report["trace"] = io::to_json(tr);
    r.summary_csv = checks_csv(tr.checks);
  }
  return r;
}

RunResult run_decompose(const GridMeasure& mu, const MultiplierSet& s, const ParamSet& p) {
  const DecompositionResult res = keyed("params", [&] { return decompose(mu, s, p); });
  RunResult r;
  r.report["result"] = io::to_json(res);
  r.summary_csv = iterations_csv(res);
  return r;
}

RunResult run_probe(const Config& c, const ParamSet& p) {
  std::vector<Point2> pts;
  int sources = 0;
  if (c.has("probe.points")) {
    ++sources;
    pts = keyed("probe.points", [&] { return io::read_planar_csv(c.path("probe.points")); });
  }
  if (c.has("probe.grid")) {
    ++sources;
    const std::int64_t g = c.integer("probe.grid", 0);
    if (g < 1 || g > 200) throw ConfigError("probe.grid", "must lie in [1, 200]");
    for (std::int64_t i = 0; i < g; ++i)
      for (std::int64_t j = 0; j < g; ++j)
        pts.push_back({(2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(g) - 1.0,
                       (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(g) - 1.0});
  }
  if (c.has("probe.random")) {
    ++sources;
    const std::int64_t cnt = c.integer("probe.random", 0);
    if (cnt < 1 || cnt > 40000) throw ConfigError("probe.random", "must lie in [1, 40000]");
    SplitRng rng(c.seed("probe.random"));
    for (std::int64_t i = 0; i < cnt; ++i) {
      const double x = 2.0 * rng.uniform() - 1.0;
      pts.push_back({x, 2.0 * rng.uniform() - 1.0});
    }
  }
  if (sources != 1) throw ConfigError("probe.points", "give exactly one of probe.points, probe.grid, probe.random");
  const double rr = c.num("probe.r", 1.0 / 16.0);
  std::vector<double> thetas;
  if (c.has("probe.directions")) {
    const Json& d = c.raw("probe.directions");
    if (!d.is_array() || d.empty()) throw ConfigError("probe.directions", "expected a nonempty array of angles");
    for (const Json& e : d) {
      if (!e.is_number()) throw ConfigError("probe.directions", "angles must be numbers");
      thetas.push_back(e.get<double>());
    }
  } else {
    const std::int64_t k = c.integer("probe.direction_count", 8);
    if (k < 1) throw ConfigError("probe.direction_count", "must be >= 1");
    for (std::int64_t i = 0; i < k; ++i) thetas.push_back(std::numbers::pi * static_cast<double>(i) / static_cast<double>(k));
  }
  const PlanarPointSet e = keyed("probe.points", [&] { return PlanarPointSet(pts, rr); });
  const DirectionMeasure eta = keyed("probe.directions", [&] { return DirectionMeasure::uniform(thetas); });
  const ProjectionProbe pr = keyed("probe.r", [&] {
    return projection_probe(e, eta, rr, c.num("probe.alpha", 0.5), c.num("probe.alpha_delta", p.alpha_delta),
                            c.num("probe.eps0", p.eps0), c.num("probe.kappa", 0.1), c.num("probe.tau0", p.tau0));
  });
  RunResult r;
  r.report["probe"] = io::to_json(pr);
  r.report["points"] = pts.size();
  r.summary_csv = "theta,weight,cover,achieves\n";
  for (const auto& d : pr.directions)
    r.summary_csv += num(d.theta) + "," + num(d.weight) + "," + std::to_string(d.cover) + "," + bool_str(d.achieves) + "\n";
  return r;
}

const char* kind_name(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid_input";
  if (dynamic_cast<const HypothesisFailed*>(&e)) return "hypothesis_failed";
  if (dynamic_cast<const ExtractionFailed*>(&e)) return "extraction_failed";
  if (dynamic_cast<const InternalAssertion*>(&e)) return "internal_assertion";
  return "internal_error";
}

}  // namespace

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> names = {"spectrum",  "walk-decay", "regularity",
                                                 "bsg",       "granulate",  "bootstrap",
                                                 "final-bootstrap", "decompose", "projection-probe"};
  return names;
}

RunResult execute(const std::string& experiment, const Json& config, std::optional<std::uint64_t> seed,
                  const fs::path& base_dir) {
  const auto& table = experiment_keys();
  const auto it = table.find(experiment);
  if (it == table.end()) throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  if (!config.is_object()) throw ConfigError("", "config must be a flat JSON object");
  std::set<std::string> allowed(kCommonKeys.begin(), kCommonKeys.end());
  allowed.insert(it->second.begin(), it->second.end());
  for (const auto& item : config.items())
    if (!allowed.count(item.key())) throw ConfigError(item.key(), "unknown key for experiment '" + experiment + "'");
  if (config.contains("experiment") &&
      (!config["experiment"].is_string() || config["experiment"].get<std::string>() != experiment))
    throw ConfigError("experiment", "does not match the subcommand '" + experiment + "'");

  const Config c(config, seed, base_dir);
  const ParamSet p = read_params(c);
  RunResult r;
  if (experiment == "projection-probe") {
    r = run_probe(c, p);
  } else {
    const GridMeasure mu = read_measure(c, p);
    const MultiplierSet s = read_multipliers(c, p);
    if (experiment == "spectrum") r = run_spectrum(c, mu, s);
    else if (experiment == "walk-decay") r = run_walk_decay(c, mu, s);
    else if (experiment == "regularity") r = run_regularity(c, s, p);
    else if (experiment == "bsg") r = run_bsg(c, mu);
    else if (experiment == "granulate") r = run_granulate(c, mu);
    else if (experiment == "bootstrap") r = run_bootstrap(c, mu, s, p, false);
    else if (experiment == "final-bootstrap") r = run_bootstrap(c, mu, s, p, true);
    else r = run_decompose(mu, s, p);
    r.report["measure"] = Json{{"Q", mu.q()}, {"mass", mu.mass()}};
    r.report["multipliers"] = io::multipliers_to_json(s);
  }
  Json full;
  full["experiment"] = experiment;
  const auto sd = c.seed_if_any();
  full["seed"] = sd ? Json(*sd) : Json(nullptr);
  full["config"] = config;
  full["params"] = io::to_json(p);
  for (auto& item : r.report.items()) full[item.key()] = item.value();
  r.report = std::move(full);
  return r;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return kExitInvalid;
  if (dynamic_cast<const HypothesisFailed*>(&e)) return kExitHypothesis;
  if (dynamic_cast<const ExtractionFailed*>(&e)) return kExitExtraction;
  return kExitInternal;
}

std::string error_json(const std::exception& e) {
  Json j;
  j["error"] = kind_name(e);
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) j["key"] = ce->key();
  else j["key"] = nullptr;
  j["message"] = e.what();
  j["exit_code"] = exit_code_for(e);
  return j.dump();
}

int run(const std::string& experiment, const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed, std::ostream& err) {
  try {
    Json config;
    try {
      config = Json::parse(io::read_text(config_path));
    } catch (const Json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    const fs::path base = fs::path(config_path).parent_path();
    RunResult r = execute(experiment, config, seed, base.empty() ? fs::path(".") : base);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + out_dir + "': " + ec.message());
    io::write_text((fs::path(out_dir) / "report.json").string(), r.report.dump(1) + "\n");
    io::write_text((fs::path(out_dir) / "summary.csv").string(), r.summary_csv);
    return kExitOk;
  } catch (const std::exception& e) {
    err << error_json(e) << "\n";
    return exit_code_for(e);
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Measure decomposition on the torus: experiment harness"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_value = 0;
  std::vector<CLI::App*> subs;
  for (const auto& name : experiments()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "flat JSON config")->required();
    sub->add_option("--out", out_dir, "output directory for report.json and summary.csv");
    sub->add_option("--seed", seed_value, "seed for randomized generators");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json j{{"error", "invalid_input"}, {"key", nullptr}, {"message", e.what()}, {"exit_code", kExitInvalid}};
    std::cerr << j.dump() << "\n";
    return kExitInvalid;
  }
  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    std::optional<std::uint64_t> seed;
    if (sub->count("--seed") > 0) seed = seed_value;
    return run(sub->get_name(), config_path, out_dir, seed, std::cerr);
  }
  return kExitInvalid;
}

}  // namespace torusdec::harness
