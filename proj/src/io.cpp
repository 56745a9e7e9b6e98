#include "torusdec/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "torusdec/error.hpp"

namespace torusdec::io {
namespace {

template <class T>
Json array_of(std::span<const T> v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

template <class T>
Json array_of(const std::vector<T>& v) {
  return array_of(std::span<const T>(v));
}

std::int64_t get_int(const Json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw InvalidInput(ctx + ": missing or non-integer field '" + key + "'");
  return j[key].get<std::int64_t>();
}

Json checks_json(const std::vector<DiagnosticCheck>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}

}  // namespace

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

Json measure_to_json(const GridMeasure& mu, bool sparse) {
  Json j;
  j["Q"] = mu.q();
  Json w;
  if (sparse) {
    Json pairs = Json::array();
    for (std::int64_t i = 0; i < mu.q(); ++i)
      if (mu.weight(i) != 0.0) pairs.push_back(Json::array({i, mu.weight(i)}));
    w["sparse"] = std::move(pairs);
  } else {
    w["dense"] = array_of(mu.weights());
  }
  j["weights"] = std::move(w);
  return j;
}

GridMeasure measure_from_json(const Json& j) {
  const std::string ctx = "measure file";
  if (!j.is_object()) throw InvalidInput(ctx + ": expected an object");
  const std::int64_t q = get_int(j, "Q", ctx);
  if (q < 2) throw InvalidInput(ctx + ": Q must be >= 2");
  if (!j.contains("weights") || !j["weights"].is_object())
    throw InvalidInput(ctx + ": missing 'weights' object");
  const Json& w = j["weights"];
  std::vector<double> dense(static_cast<std::size_t>(q), 0.0);
  if (w.contains("dense")) {
    const Json& d = w["dense"];
    if (!d.is_array() || static_cast<std::int64_t>(d.size()) != q)
      throw InvalidInput(ctx + ": 'weights.dense' must be an array of length Q");
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d[i].is_number()) throw InvalidInput(ctx + ": non-numeric dense weight");
      dense[i] = d[i].get<double>();
    }
  } else if (w.contains("sparse")) {
    const Json& s = w["sparse"];
    if (!s.is_array()) throw InvalidInput(ctx + ": 'weights.sparse' must be an array");
    for (const Json& e : s) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
        throw InvalidInput(ctx + ": sparse entries must be [index, weight]");
      const auto idx = e[0].get<std::int64_t>();
      if (idx < 0 || idx >= q) throw InvalidInput(ctx + ": sparse index out of range");
      dense[static_cast<std::size_t>(idx)] += e[1].get<double>();
    }
  } else {
    throw InvalidInput(ctx + ": 'weights' needs 'dense' or 'sparse'");
  }
  return GridMeasure(q, std::move(dense));
}

GridMeasure load_measure(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput("measure file '" + path + "': " + e.what());
  }
  return measure_from_json(j);
}

void save_measure(const std::string& path, const GridMeasure& mu, bool sparse) {
  write_text(path, measure_to_json(mu, sparse).dump(1) + "\n");
}

Json multipliers_to_json(const MultiplierSet& s) {
  Json j;
  j["L"] = s.scale();
  j["elements"] = array_of(s.elements());
  return j;
}

MultiplierSet multipliers_from_json(const Json& j) {
  const std::string ctx = "multiplier file";
  if (!j.is_object()) throw InvalidInput(ctx + ": expected an object");
  const std::int64_t l = get_int(j, "L", ctx);
  if (!j.contains("elements") || !j["elements"].is_array())
    throw InvalidInput(ctx + ": missing 'elements' array");
  std::vector<std::int64_t> el;
  for (const Json& e : j["elements"]) {
    if (!e.is_number_integer()) throw InvalidInput(ctx + ": elements must be integers");
    el.push_back(e.get<std::int64_t>());
  }
  return MultiplierSet(l, std::move(el));
}

MultiplierSet load_multipliers(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput("multiplier file '" + path + "': " + e.what());
  }
  return multipliers_from_json(j);
}

std::string spectrum_csv(const Spectrum& spec) {
  std::string out = "n,re,im,abs\n";
  for (std::int64_t n = -spec.n_max(); n <= spec.n_max(); ++n) {
    const Complex c = spec(n);
    out += std::to_string(n) + "," + num(c.real()) + "," + num(c.imag()) + "," + num(std::abs(c)) + "\n";
  }
  return out;
}

std::vector<Point2> read_planar_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<Point2> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line == "x,y")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InvalidInput("planar csv '" + path + "' line " + std::to_string(lineno) + ": expected x,y");
    try {
      std::size_t used = 0;
      const double x = std::stod(line.substr(0, comma), &used);
      const std::string ys = line.substr(comma + 1);
      const double y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument("trailing");
      pts.push_back({x, y});
    } catch (const std::exception&) {
      throw InvalidInput("planar csv '" + path + "' line " + std::to_string(lineno) + ": bad number");
    }
  }
  return pts;
}

std::string planar_csv(std::span<const Point2> points) {
  std::string out = "x,y\n";
  for (const auto& p : points) out += num(p.x) + "," + num(p.y) + "\n";
  return out;
}

BipartiteGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::set<std::int64_t> as, bs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::int64_t a = 0, b = 0;
    if (!(ls >> a)) continue;
    std::string rest;
    if (!(ls >> b) || (ls >> rest))
      throw InvalidInput("edge list line " + std::to_string(lineno) + ": expected 'a b'");
    raw.emplace_back(a, b);
    as.insert(a);
    bs.insert(b);
  }
  BipartiteGraph g;
  g.part_a.assign(as.begin(), as.end());
  g.part_b.assign(bs.begin(), bs.end());
  for (const auto& [a, b] : raw) {
    const auto ia = static_cast<std::size_t>(std::lower_bound(g.part_a.begin(), g.part_a.end(), a) - g.part_a.begin());
    const auto ib = static_cast<std::size_t>(std::lower_bound(g.part_b.begin(), g.part_b.end(), b) - g.part_b.begin());
    g.edges.emplace_back(ia, ib);
  }
  validate_graph(g);
  return g;
}

BipartiteGraph read_edge_list(const std::string& path) { return parse_edge_list(read_text(path)); }

Json to_json(const FrequencySet& f) { return array_of(f.elements()); }

Json to_json(const CoverReport& c) {
  return Json{{"count", c.count}, {"radius", c.radius}, {"centers", array_of(c.centers)}};
}

Json to_json(const RegularityCertificate& c) {
  return Json{{"lambda", c.lambda},
              {"scale_r", c.scale_r},
              {"c_tilde", c.c_tilde},
              {"witness_left", c.witness_left},
              {"witness_length", c.witness_length},
              {"witness_count", c.witness_count}};
}

Json to_json(const BsgCertificate& c) {
  return Json{{"n", c.n},
              {"K", c.k},
              {"cross_edges", c.cross_edges},
              {"min_paths", c.min_paths},
              {"need_a", c.need_a},
              {"need_b", c.need_b},
              {"need_cross", c.need_cross},
              {"need_paths", c.need_paths},
              {"size_ok", c.size_ok},
              {"cross_ok", c.cross_ok},
              {"paths_ok", c.paths_ok}};
}

Json to_json(const BsgExtraction& b) {
  Json checks = Json::array();
  for (const auto& c : b.checks)
    checks.push_back(Json{{"name", c.name}, {"exact", c.exact}, {"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  return Json{{"a1", to_json(b.a1)},
              {"theta", b.theta},
              {"delta", b.delta},
              {"R", b.r_bound},
              {"N", b.window_n},
              {"M", b.sep_m},
              {"size_a0", b.size_a0},
              {"size_a", b.size_a},
              {"size_a_bar", b.size_a_bar},
              {"size_h", b.size_h},
              {"cover_f", b.cover_f},
              {"edges", b.edges},
              {"edges_bar", b.edges_bar},
              {"K", b.k},
              {"size_a_prime", b.size_a_prime},
              {"size_b_prime", b.size_b_prime},
              {"min_paths", b.min_paths},
              {"diff_a_prime_b_prime", b.diff_a_prime_b_prime},
              {"diff_a_prime_a_prime", b.diff_a_prime_a_prime},
              {"ruzsa_rhs", b.ruzsa_rhs},
              {"alignment", b.alignment},
              {"cover_a1_diff", b.cover_a1_diff},
              {"cover_bound", b.cover_bound},
              {"cover_slack", b.cover_bound - static_cast<double>(b.cover_a1_diff)},
              {"size_bound", b.size_bound},
              {"size_bound_delta2", b.size_bound_delta2},
              {"c_size", b.c_size},
              {"checks", checks}};
}

Json to_json(const RegularSubsetReport& r) {
  return Json{{"n_input", r.n_input},     {"n1", r.n1},
              {"subset", to_json(r.subset)}, {"c_reg", r.c_reg},
              {"alpha_reg", r.alpha_reg}, {"fitted_alpha", r.fitted_alpha},
              {"scale", r.scale},         {"diam", r.diam},
              {"input_cover", r.input_cover}, {"windows_tried", r.windows_tried}};
}

Json to_json(const GranuleFamily& f, bool with_trace) {
  Json j{{"points", array_of(f.points)},
         {"Q", f.grid_q},
         {"sep", f.sep},
         {"radius", f.radius},
         {"mass", f.captured_mass},
         {"M", f.m},
         {"N", f.n},
         {"t", f.t},
         {"s", f.s}};
  if (with_trace) {
    const auto& t = f.trace;
    Json cubes = Json::array();
    for (const auto& c : t.cubes)
      cubes.push_back(Json{{"index", c.index},
                           {"center", c.center},
                           {"ball_mass", c.ball_mass},
                           {"g_max", c.g_max},
                           {"h_ratio", c.h_ratio},
                           {"argmax", c.argmax}});
    j["trace"] = Json{{"cube_scale", t.cube_scale},
                      {"theta", t.theta},
                      {"C1", t.c1},
                      {"C2", t.c2},
                      {"C3", t.c3},
                      {"select_threshold", t.select_threshold},
                      {"hypothesis_cover", t.hypothesis_cover},
                      {"hypothesis_need", t.hypothesis_need},
                      {"separated_size", t.separated_size},
                      {"aligned_size", t.aligned_size},
                      {"selected", array_of(t.selected)},
                      {"families", t.families},
                      {"family_masses", array_of(t.family_masses)},
                      {"chosen_family", t.chosen_family},
                      {"bound", t.bound},
                      {"ref_bound_2d", t.ref_bound_2d},
                      {"bound_holds", f.captured_mass > t.bound},
                      {"cubes", cubes}};
  }
  return j;
}

Json to_json(const EnergyReport& e) {
  return Json{{"alpha", e.alpha},
              {"dim", e.dim},
              {"smooth_r", e.smooth_r},
              {"spatial", e.spatial},
              {"spectral", e.spectral},
              {"ratio", e.ratio},
              {"calibrated_ratio", e.calibrated_ratio},
              {"riesz_constant", e.riesz_constant},
              {"raster_step", e.raster_step},
              {"raster_cells", e.raster_cells}};
}

Json to_json(const DirectionalEnergyCheck& d) {
  return Json{{"lhs", d.lhs},
              {"rhs", d.rhs},
              {"c_eta", d.c_eta},
              {"c_d", d.c_d},
              {"c_add", d.c_add},
              {"planar_integral", d.planar_integral},
              {"fitted_c_add", d.fitted_c_add},
              {"holds", d.holds},
              {"worst_theta", d.worst_theta},
              {"worst_eps", d.worst_eps}};
}

Json to_json(const ProjectionProbe& p) {
  Json dirs = Json::array();
  for (const auto& d : p.directions)
    dirs.push_back(Json{{"theta", d.theta}, {"weight", d.weight}, {"cover", d.cover}, {"achieves", d.achieves}});
  return Json{{"size_ok", p.size_ok},
              {"separated_ok", p.separated_ok},
              {"concentration_ok", p.concentration_ok},
              {"direction_ok", p.direction_ok},
              {"declined", p.declined},
              {"decline_reason", p.decline_reason},
              {"threshold", p.threshold},
              {"achieving_mass", p.achieving_mass},
              {"exceptional_mass", p.exceptional_mass},
              {"predicted_min_mass", p.predicted_min_mass},
              {"directions", dirs}};
}

Json to_json(const ParamSet& p) {
  return Json{{"L", p.L},
              {"beta", p.beta},
              {"lambda", p.lambda},
              {"tau", p.tau},
              {"tau0", p.tau0},
              {"k", p.k},
              {"c_tilde_max", p.c_tilde_max},
              {"kappa", p.kappa},
              {"c_growth", p.c_growth},
              {"u_exp", p.u_exp},
              {"alpha_ini", p.alpha_ini},
              {"alpha_high", p.alpha_high},
              {"alpha_delta", p.alpha_delta},
              {"alpha_inc", p.alpha_inc},
              {"eps0", p.eps0},
              {"c_star", p.c_star},
              {"c1", p.c1},
              {"q_grid", p.q_grid},
              {"iteration_cap", p.iteration_cap},
              {"convolved_loop", p.convolved_loop},
              {"regularity_c", p.regularity_c},
              {"rho_c", p.rho_c},
              {"force_branch", p.force_branch}};
}

Json to_json(const DiagnosticCheck& c) {
  return Json{{"name", c.name}, {"exact", c.exact}, {"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}};
}

Json to_json(const InitialDimensionReport& r) {
  return Json{{"n", r.n},
              {"a", r.a},
              {"delta0", r.delta0},
              {"coeff_abs", r.coeff_abs},
              {"markov_count", r.markov_count},
              {"markov_need", r.markov_need},
              {"window", r.window},
              {"sep", r.sep},
              {"cover", r.cover},
              {"need", r.need},
              {"need_proven", r.need_proven},
              {"holds", r.holds},
              {"holds_proven", r.holds_proven}};
}

Json to_json(const BootstrapTrace& t) {
  Json j{{"n", t.n},
         {"windows",
          Json{{"N", t.window_n}, {"M", t.sep_m}, {"N0", t.n0}, {"N1", t.n1}, {"N_prime", t.n_prime}, {"M_prime", t.m_prime}}},
         {"thresholds", Json{{"delta", t.delta}, {"delta_prime", t.delta_prime}, {"delta4_256", t.delta4}}},
         {"alpha", t.alpha},
         {"alpha_measured", t.alpha_measured},
         {"hypothesis_cover", t.hypothesis_cover},
         {"size_e0", t.size_e0},
         {"size_e0_prime", t.size_e0_prime},
         {"size_e1", t.size_e1},
         {"rho", t.rho},
         {"rho_threshold", t.rho_threshold},
         {"branch", t.branch},
         {"regular", to_json(t.regular)}};
  if (t.branch == "rho-large") {
    j["size_e1_prime"] = t.size_e1_prime;
    j["s0"] = t.s0;
    j["size_e2"] = t.size_e2;
  } else {
    if (t.bsg) j["bsg"] = to_json(*t.bsg);
    j["size_e"] = t.size_e;
    j["size_e3"] = t.size_e3;
    j["s1"] = t.s1;
    j["set_b"] = array_of(t.set_b);
    j["c_tilde"] = t.c_tilde;
    j["c_tilde1"] = t.c_tilde1;
    if (t.probe) j["probe"] = to_json(*t.probe);
    if (!t.probe_note.empty()) j["probe_note"] = t.probe_note;
  }
  j["output_cover"] = t.output_cover;
  j["output_need"] = t.output_need;
  j["increment_met"] = t.increment_met;
  j["checks"] = checks_json(t.checks);
  return j;
}

Json to_json(const FinalBootstrapTrace& t) {
  Json dens = Json::array();
  for (const auto& d : t.densities)
    dens.push_back(Json{{"s1", d.s1},
                        {"theta", d.theta},
                        {"l2sq", d.l2sq},
                        {"cover_lower_bound", d.cover_lower_bound},
                        {"cover", d.cover}});
  Json j{{"n", t.n},
         {"N", t.window_n},
         {"M", t.sep_m},
         {"N1", t.n1},
         {"delta", t.delta},
         {"delta_prime", t.delta_prime},
         {"eps0", t.eps0},
         {"hypothesis_cover", t.hypothesis_cover},
         {"hypothesis_need", t.hypothesis_need},
         {"regular", to_json(t.regular)},
         {"size_e", t.size_e},
         {"s2", t.s2},
         {"size_q", t.size_q},
         {"s_prime", array_of(t.s_prime)},
         {"c_tilde", t.c_tilde},
         {"densities", dens},
         {"conclusion_window", t.conclusion_window},
         {"conclusion_cover", t.conclusion_cover},
         {"conclusion_target", t.conclusion_target},
         {"conclusion_met", t.conclusion_met},
         {"checks", checks_json(t.checks)}};
  if (t.energy) j["energy"] = to_json(*t.energy);
  return j;
}

Json to_json(const GranuleSearch& g) {
  Json grid = Json::array();
  for (const auto& p : g.grid)
    grid.push_back(Json{{"N", p.n},
                        {"M", p.m},
                        {"t", p.t},
                        {"cover", p.cover},
                        {"s", p.s},
                        {"admissible", p.admissible},
                        {"captured_mass", p.captured_mass},
                        {"outcome", p.outcome}});
  return Json{{"target_M", g.target_m},
              {"target_N", g.target_n},
              {"coeff_abs", g.coeff_abs},
              {"reference_bound", g.reference_bound},
              {"family", to_json(g.family)},
              {"grid", grid}};
}

Json to_json(const DecompositionResult& r) {
  Json fams = Json::array();
  for (const auto& f : r.families) fams.push_back(to_json(f));
  Json iters = Json::array();
  for (const auto& it : r.iterations)
    iters.push_back(Json{{"ell", it.ell},
                         {"a", it.a},
                         {"t", it.t},
                         {"family_size", it.family_size},
                         {"captured_mass", it.captured_mass},
                         {"remaining_mass", it.remaining_mass},
                         {"max_coeff", it.max_coeff}});
  Json j{{"status", to_string(r.status)},
         {"ell", r.ell},
         {"budget", r.budget},
         {"c_tilde", r.c_tilde},
         {"mu1_mass", r.mu1.mass()},
         {"mu2_mass", r.mu2.mass()},
         {"final_spectrum_check", r.final_spectrum_check},
         {"conclusion_holds", r.conclusion_holds},
         {"params", to_json(r.params)},
         {"families", fams},
         {"iterations", iters},
         {"mu1", measure_to_json(r.mu1)},
         {"mu2", measure_to_json(r.mu2)}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

}  // namespace torusdec::io
