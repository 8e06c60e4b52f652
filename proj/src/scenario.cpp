#include "fblab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Core>

#include "fblab/boundary_geometry.hpp"
#include "fblab/datum_expr.hpp"
#include "fblab/field_io.hpp"
#include "fblab/operator_json.hpp"
#include "fblab/regularity.hpp"
#include "fblab/simd/kernels.hpp"
#include "fblab/structure_check.hpp"

namespace fblab {

using nlohmann::json;
namespace fs = std::filesystem;

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
    : ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ParseError(source, line, column, what);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

namespace {

// Object reader that rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw ValidationError(where_ + ": expected a JSON object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return doc_.contains(key) && !doc_.at(key).is_null();
  }

  const json& raw(const char* key) {
    if (!has(key)) throw ValidationError(path(key) + ": missing field");
    return doc_.at(key);
  }

  double number(const char* key) {
    const auto& v = raw(key);
    if (!v.is_number()) throw ValidationError(path(key) + ": must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(path(key) + ": must be finite");
    return x;
  }
  double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const char* key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ValidationError(path(key) + ": must be > 0");
    return x;
  }

  int integer(const char* key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number_integer()) throw ValidationError(path(key) + ": must be an integer");
    return v.get<int>();
  }

  std::uint64_t u64(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ValidationError(path(key) + ": must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) throw ValidationError(path(key) + ": must be true or false");
    return v.get<bool>();
  }

  std::string string(const char* key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw ValidationError(path(key) + ": must be a string");
    return v.get<std::string>();
  }

  Point point(const char* key, Point fallback) {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ValidationError(path(key) + ": must be [x1, x2]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> radii(const char* key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_array() || v.empty()) throw ValidationError(path(key) + ": must be a nonempty array of radii");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > 0.0) || !(e.get<double>() <= 1.0)) {
        throw ValidationError(path(key) + ": radii must lie in (0, 1]");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Fields child(const char* key) { return Fields(raw(key), path(key)); }

  std::string path(const char* key) const { return where_ + "." + key; }
  const std::string& where() const { return where_; }

  void finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ValidationError(where_ + ": unknown field '" + item.key() + "'");
    }
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

void require_flat_node(Point c, int n, const std::string& where) {
  const double scaled = (c.x1 + 1.0) * n;
  if (c.x2 != 0.0 || !(std::abs(c.x1) < 1.0) || std::abs(scaled - std::round(scaled)) > 1e-9) {
    throw ValidationError(where + ": center must be a flat-boundary grid node [x1, 0] with |x1| < 1");
  }
}

void require_in_half_disk(Point c, const std::string& where) {
  if (c.x2 < 0.0 || !(norm(c) < 1.0)) throw ValidationError(where + ": center must lie in the half disk");
}

json point_json(Point p) { return json::array({p.x1, p.x2}); }

json matrix_json(const SymMatrix& m) { return m.rows(); }

json witness_json(const Witness& w) {
  return {{"m", matrix_json(w.m)}, {"n", matrix_json(w.n)}, {"x", point_json(w.x)}, {"y", point_json(w.y)}};
}

json hypothesis_json(const HypothesisResult& h, bool required) {
  json j{{"name", h.name},
         {"checked", h.checked},
         {"required", required},
         {"passed", h.passed},
         {"worst_margin", h.worst_margin}};
  j["witness"] = h.witness ? witness_json(*h.witness) : json(nullptr);
  return j;
}

json structure_json(const StructureReport& rep) {
  const bool need_h4 = rep.h4.checked;
  return {{"seed", rep.seed},
          {"samples", rep.samples},
          {"tolerance", rep.tolerance},
          {"shape", to_string(rep.shape)},
          {"hypotheses", json::array({hypothesis_json(rep.h1, true), hypothesis_json(rep.h2, true),
                                      hypothesis_json(rep.h3, true), hypothesis_json(rep.h4, need_h4)})},
          {"passed", rep.passes_h1_to_h3() && (!need_h4 || rep.h4.passed)}};
}

json solver_json(const SolveReport& r) {
  json j{{"converged", r.converged},
         {"status", r.status},
         {"pde_residual", r.pde_residual},
         {"complementarity_residual", r.complementarity_residual},
         {"min_value", r.min_value},
         {"off_omega_hessian_max", r.off_omega_hessian_max},
         {"K", r.K},
         {"hessian_within_K", r.hessian_within_K},
         {"outer_iterations", r.outer_iterations},
         {"newton_steps", r.newton_steps},
         {"picard_steps", r.picard_steps},
         {"linear_iterations", r.linear_iterations},
         {"tol_u", r.tol_u},
         {"tol_grad", r.tol_grad},
         {"residual_tol", r.residual_tol},
         {"omega_size", r.omega_size}};
  if (r.oscillation) j["oscillation_set_sizes"] = {r.oscillation->first.count(), r.oscillation->second.count()};
  return j;
}

json blowup_json(const BlowupReport& r) {
  json fits = json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"radius", f.radius}, {"a", f.a}, {"b", f.b}, {"residual", f.residual}, {"nodes", f.nodes}});
  }
  json shells = json::array();
  for (const auto& [rad, m] : r.profile.shells) shells.push_back({{"r", rad}, {"m", m}});
  return {{"center", point_json(r.center)},
          {"gradient_norm", r.gradient_norm},
          {"gate_passed", r.gate_passed},
          {"status", r.status},
          {"reference_spacing", r.reference_spacing},
          {"fits", fits},
          {"m_profile",
           {{"shells", shells},
            {"smallest_shell", r.profile.smallest_shell},
            {"extrapolated", r.profile.extrapolated},
            {"extrapolated_raw", r.profile.extrapolated_raw},
            {"has_extrapolation", r.profile.has_extrapolation},
            {"estimate", r.profile.estimate()}}},
          {"classification",
           {{"alternative", to_string(r.classification.alternative)},
            {"a", r.classification.a},
            {"b", r.classification.b},
            {"accepted", r.classification.accepted},
            {"diagnostics", r.classification.diagnostics}}},
          {"uniqueness",
           {{"accepted", r.uniqueness.accepted},
            {"spread", r.uniqueness.spread},
            {"consistent", r.uniqueness.consistent},
            {"limit_value", r.uniqueness.limit_value},
            {"limit_target", r.uniqueness.limit_target},
            {"limit_ok", r.uniqueness.limit_ok},
            {"diagnostics", r.uniqueness.diagnostics}}},
          {"thresholds",
           {{"fit_accept", r.thresholds.fit_accept},
            {"m_zero_tol", r.thresholds.m_zero_tol},
            {"a_zero_tol", r.thresholds.a_zero_tol},
            {"uniq_tol", r.thresholds.uniq_tol},
            {"limit_tol", r.thresholds.limit_tol}}}};
}

json modulus_json(const ModulusTable& t) {
  json rows = json::array();
  for (const auto& e : t.entries) rows.push_back({{"r", e.r}, {"omega", e.omega}, {"empty", e.empty}});
  return {{"entries", rows}, {"r0", t.r0}};
}

// Infinity has no JSON spelling; the empty flag carries it instead.
json clearance_json(double d) { return std::isfinite(d) ? json(d) : json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::string& base_dir) {
  Fields top(doc, "scenario");
  Scenario s;
  s.name = top.string("name");
  if (s.name.empty()) throw ValidationError("scenario.name: must be nonempty");

  const bool inline_op = top.has("operator");
  const bool file_op = top.has("operator_file");
  if (inline_op == file_op) throw ValidationError("scenario: give exactly one of 'operator' and 'operator_file'");
  if (inline_op) {
    try {
      s.op = operator_from_json(top.raw("operator"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("scenario.") + e.what());
    }
  } else {
    fs::path p = top.string("operator_file");
    if (p.is_relative()) p = fs::path(base_dir) / p;
    try {
      s.op = operator_from_json(read_json_file(p.string()));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ValidationError("scenario.operator_file (" + p.string() + "): " + e.what());
    }
  }
  s.operator_spec = operator_to_json(s.op);

  {
    auto g = top.child("grid");
    const bool has_n = g.has("n"), has_h = g.has("h");
    if (!has_n && !has_h) throw ValidationError("scenario.grid: give 'n' or 'h'");
    if (has_h) {
      const double h = g.positive("h", 1.0);
      const double inv = 1.0 / h;
      if (std::abs(inv - std::round(inv)) > 1e-9 * inv) throw ValidationError("scenario.grid.h: 1/h must be an integer");
      s.n = static_cast<int>(std::round(inv));
    }
    if (has_n) {
      const int n = static_cast<int>(g.integer("n", 0));
      if (has_h && n != s.n) throw ValidationError("scenario.grid: 'n' and 'h' disagree");
      s.n = n;
    }
    if (s.n < 4) throw ValidationError("scenario.grid: need n = 1/h >= 4");
    if (g.has("box")) {
      const auto& box = g.raw("box");
      if (box != json::array({-1, 1, 0, 1})) {
        throw ValidationError("scenario.grid.box: only the unit half disk box [-1, 1, 0, 1] is supported");
      }
    }
    g.finish();
  }

  try {
    s.mode = solve_mode_from_string(top.string("mode"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("scenario.mode: ") + e.what());
  }
  s.datum = top.string("datum");
  try {
    (void)DatumExpr::parse(s.datum);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("scenario.datum: ") + e.what());
  }
  s.seed = top.u64("seed", s.solver.structure_seed);
  s.solver.mode = s.mode;
  s.solver.structure_seed = s.seed;

  if (top.has("solver")) {
    auto c = top.child("solver");
    s.solver.K = c.positive("K", s.solver.K);
    s.solver.max_outer_iters = c.integer("max_outer_iters", s.solver.max_outer_iters);
    s.solver.newton_damping = c.number("newton_damping", s.solver.newton_damping);
    s.solver.residual_tol = c.positive("residual_tol", s.solver.residual_tol);
    s.solver.linear_tol = c.positive("linear_tol", s.solver.linear_tol);
    s.solver.structure_samples = c.integer("structure_samples", s.solver.structure_samples);
    if (c.has("active_set_tol_u")) s.solver.active_set_tol_u = c.positive("active_set_tol_u", 1.0);
    if (c.has("active_set_tol_grad")) s.solver.active_set_tol_grad = c.positive("active_set_tol_grad", 1.0);
    c.finish();
    try {
      s.solver.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("scenario.solver: ") + e.what());
    }
  }

  if (top.has("analyses")) {
    auto a = top.child("analyses");
    if (a.has("blowup")) {
      auto b = a.child("blowup");
      s.blowup.enabled = b.boolean("enabled", true);
      s.blowup.center = b.point("center", {});
      s.blowup.radii = b.radii("radii", {});
      if (b.has("thresholds")) {
        auto t = b.child("thresholds");
        auto& th = s.blowup.thresholds;
        th.fit_accept = t.positive("fit_accept", th.fit_accept);
        th.m_zero_tol = t.positive("m_zero_tol", th.m_zero_tol);
        th.a_zero_tol = t.positive("a_zero_tol", th.a_zero_tol);
        th.uniq_tol = t.positive("uniq_tol", th.uniq_tol);
        th.limit_tol = t.positive("limit_tol", th.limit_tol);
        t.finish();
      }
      b.finish();
      if (s.blowup.enabled) require_flat_node(s.blowup.center, s.n, b.path("center"));
    }
    if (a.has("boundary")) {
      auto b = a.child("boundary");
      s.boundary.enabled = b.boolean("enabled", true);
      s.boundary.center = b.point("center", {});
      s.boundary.radii = b.radii("radii", s.boundary.radii);
      s.boundary.cone_epsilon = b.positive("cone_epsilon", s.boundary.cone_epsilon);
      s.boundary.cone_rho = b.positive("cone_rho", s.boundary.cone_rho);
      if (b.has("gamma_i_tol")) s.boundary.gamma_i_tol = b.positive("gamma_i_tol", 1.0);
      s.boundary.complement_radii = b.radii("complement_radii", s.boundary.complement_radii);
      b.finish();
      require_in_half_disk(s.boundary.center, b.path("center"));
    }
    if (a.has("bmo")) {
      auto b = a.child("bmo");
      s.bmo.enabled = b.boolean("enabled", true);
      s.bmo.center = b.point("center", {});
      s.bmo.rho = b.number("rho", s.bmo.rho);
      if (!(s.bmo.rho > 0.0 && s.bmo.rho < 1.0)) throw ValidationError(b.path("rho") + ": must lie in (0, 1)");
      b.finish();
      if (s.bmo.enabled) require_flat_node(s.bmo.center, s.n, b.path("center"));
    }
    if (a.has("c11")) {
      auto b = a.child("c11");
      s.c11.enabled = b.boolean("enabled", true);
      s.c11.center = b.point("center", {});
      s.c11.radius = b.positive("radius", s.c11.radius);
      b.finish();
      require_in_half_disk(s.c11.center, b.path("center"));
    }
    if (a.has("nondegeneracy")) {
      auto b = a.child("nondegeneracy");
      s.nondegeneracy.enabled = b.boolean("enabled", true);
      s.nondegeneracy.center = b.point("center", {});
      s.nondegeneracy.radii = b.radii("radii", s.nondegeneracy.radii);
      b.finish();
      require_in_half_disk(s.nondegeneracy.center, b.path("center"));
    }
    a.finish();
  }

  s.output_dir = top.has("output_dir") ? top.string("output_dir") : "fblab-out/" + s.name;
  top.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  const json doc = read_json_file(path);
  return scenario_from_json(doc, fs::path(path).parent_path().string());
}

json Scenario::to_json() const {
  json j;
  j["name"] = name;
  j["operator"] = operator_spec;
  j["grid"] = {{"n", n}, {"h", 1.0 / n}, {"box", {-1, 1, 0, 1}}};
  j["mode"] = fblab::to_string(mode);
  j["datum"] = datum;
  j["seed"] = seed;
  json sv{{"K", solver.K},
          {"max_outer_iters", solver.max_outer_iters},
          {"newton_damping", solver.newton_damping},
          {"residual_tol", solver.residual_tol},
          {"linear_tol", solver.linear_tol},
          {"structure_samples", solver.structure_samples}};
  sv["active_set_tol_u"] = solver.active_set_tol_u ? json(*solver.active_set_tol_u) : json(nullptr);
  sv["active_set_tol_grad"] = solver.active_set_tol_grad ? json(*solver.active_set_tol_grad) : json(nullptr);
  j["solver"] = sv;
  json an;
  an["blowup"] = {{"enabled", blowup.enabled}, {"center", point_json(blowup.center)}};
  // No radii means the automatic dyadic sequence.
  if (!blowup.radii.empty()) an["blowup"]["radii"] = blowup.radii;
  an["boundary"] = {{"enabled", boundary.enabled},
                    {"center", point_json(boundary.center)},
                    {"radii", boundary.radii},
                    {"cone_epsilon", boundary.cone_epsilon},
                    {"cone_rho", boundary.cone_rho},
                    {"gamma_i_tol", boundary.gamma_i_tol ? json(*boundary.gamma_i_tol) : json(nullptr)},
                    {"complement_radii", boundary.complement_radii}};
  an["bmo"] = {{"enabled", bmo.enabled}, {"center", point_json(bmo.center)}, {"rho", bmo.rho}};
  an["c11"] = {{"enabled", c11.enabled}, {"center", point_json(c11.center)}, {"radius", c11.radius}};
  an["nondegeneracy"] = {
      {"enabled", nondegeneracy.enabled}, {"center", point_json(nondegeneracy.center)}, {"radii", nondegeneracy.radii}};
  j["analyses"] = an;
  j["output_dir"] = output_dir;
  return j;
}

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  Scenario sc = scenario;
  if (options.seed) {
    sc.seed = *options.seed;
    sc.solver.structure_seed = *options.seed;
  }
  if (options.output_dir) sc.output_dir = *options.output_dir;
  const fs::path out_dir = sc.output_dir;
  fs::create_directories(out_dir);

  json report;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  report["scenario"] = sc.to_json();
  report["seed"] = sc.seed;
  report["kernel"] = std::string(simd::kernels().name);
  json timings;
  json artifacts = json::object();
  std::vector<std::string> flags;
  bool failed = false;
  std::string error;

  const auto grid = HalfDiskGrid::make(sc.n);
  const auto datum_expr = DatumExpr::parse(sc.datum);
  const Datum datum = [&](Point p) { return datum_expr(p); };

  const auto structure = check_structure(sc.op, sc.solver.structure_samples, sc.seed);
  report["structure"] = structure_json(structure);

  std::optional<SolveResult> result;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      result = solve(sc.op, datum, grid, sc.solver);
    } catch (const std::exception& e) {
      failed = true;
      error = e.what();
    }
    timings["solve_seconds"] = seconds_since(t0);
  }

  if (result) {
    const auto& r = result->report;
    report["solver"] = solver_json(r);
    if (!r.converged) failed = true;
    if (!r.hessian_within_K) flags.push_back("off-omega Hessian exceeds K");

    write_field_dump((out_dir / "u.bin").string(), result->u);
    artifacts["field_dump"] = "u.bin";
    write_field_csv((out_dir / "u.csv").string(), result->u);
    artifacts["field_csv"] = "u.csv";

    json analyses = json::object();
    const auto t0 = std::chrono::steady_clock::now();
    const double h = grid->h();
    std::optional<Alternative> alternative;
    try {
      if (sc.blowup.enabled) {
        BlowupConfig cfg;
        cfg.center = sc.blowup.center;
        cfg.radii = sc.blowup.radii;
        cfg.thresholds = sc.blowup.thresholds;
        const auto br = analyze_blowup(result->u, sc.op, cfg);
        analyses["blowup"] = blowup_json(br);
        if (br.status == "refused") {
          flags.push_back("blow-up refused: gradient at the center exceeds h");
        } else {
          alternative = br.classification.alternative;
          if (*alternative == Alternative::Indeterminate) flags.push_back("blow-up classification indeterminate");
          if (br.uniqueness.accepted >= 3 && !br.uniqueness.consistent) {
            flags.push_back("blow-up fits across radii are inconsistent");
          }
        }
      }

      const double gamma_i_tol = sc.boundary.gamma_i_tol.value_or(result->report.tol_u);
      const auto gamma_i = extract_gamma_i(result->u, gamma_i_tol);
      const Point gi_center = sc.blowup.enabled ? sc.blowup.center : sc.boundary.center;
      const double gi_clear = gamma_i_clearance(gamma_i, gi_center);

      if (sc.boundary.enabled) {
        const auto& cfg = sc.boundary;
        const auto gamma = extract_gamma(result->active);
        const auto table = modulus_table(gamma, cfg.radii, cfg.center);
        const auto cone = cone_clearance(gamma, cfg.cone_epsilon, cfg.cone_rho, cfg.center);
        json witnesses = json::array();
        for (const auto& w : cone.witnesses) witnesses.push_back(point_json(w));
        json complement = json::array();
        for (double s : cfg.complement_radii) {
          const auto cm = complement_measure(result->active, s, cfg.center);
          complement.push_back(
              {{"s", s}, {"measure", cm.measure}, {"nodes", cm.nodes}, {"empty_interior", cm.empty_interior}});
        }
        analyses["boundary"] = {{"gamma_vertices", gamma.vertex_count()},
                                {"gamma_polylines", gamma.polylines.size()},
                                {"gamma_i_vertices", gamma_i.vertex_count()},
                                {"gamma_i_tol", gamma_i_tol},
                                {"gamma_i_empty", gamma_i.empty()},
                                {"gamma_i_clearance", clearance_json(gi_clear)},
                                {"modulus", modulus_json(table)},
                                {"cone",
                                 {{"epsilon", cfg.cone_epsilon},
                                  {"rho", cfg.cone_rho},
                                  {"clear", cone.clear},
                                  {"witnesses", witnesses}}},
                                {"complement", complement}};
        write_curve_csv((out_dir / "gamma.csv").string(), gamma);
        artifacts["gamma_csv"] = "gamma.csv";
        write_curve_csv((out_dir / "gamma_i.csv").string(), gamma_i);
        artifacts["gamma_i_csv"] = "gamma_i.csv";
        write_modulus_csv((out_dir / "modulus.csv").string(), table);
        artifacts["modulus_csv"] = "modulus.csv";
        if (!cone.clear) flags.push_back("free boundary enters the cone near the center");
      }
      if (alternative == Alternative::CaseII && gi_clear < 4.0 * h) {
        flags.push_back("case-ii run with gamma_i within 4h of the center");
      }

      if (sc.bmo.enabled) {
        const auto dyadic = dyadic_profile(result->u, sc.bmo.center, sc.bmo.rho, sc.op);
        const auto bmo = bmo_profile(result->u, dyadic, sc.bmo.center);
        json levels = json::array();
        for (std::size_t k = 0; k < dyadic.levels.size(); ++k) {
          const auto& l = dyadic.levels[k];
          json row{{"k", l.k},
                   {"radius", l.radius},
                   {"misfit", l.misfit},
                   {"scaled_misfit", l.scaled_misfit},
                   {"increment", l.increment},
                   {"hessian_norm", l.hessian_norm},
                   {"nodes", l.nodes}};
          row["bmo"] = k < bmo.levels.size() ? json(bmo.levels[k].value) : json(nullptr);
          levels.push_back(row);
        }
        analyses["bmo"] = {{"center", point_json(sc.bmo.center)},
                           {"rho", dyadic.rho},
                           {"levels", levels},
                           {"constant", dyadic.constant},
                           {"max_increment", dyadic.max_increment},
                           {"uniform_constant", dyadic.uniform_constant},
                           {"bmo_max", bmo.max_value}};
        write_dyadic_csv((out_dir / "dyadic.csv").string(), dyadic, bmo);
        artifacts["dyadic_csv"] = "dyadic.csv";
      }

      if (sc.c11.enabled) {
        analyses["c11"] = {{"center", point_json(sc.c11.center)},
                           {"radius", sc.c11.radius},
                           {"sup", c11_sup(result->u, sc.c11.radius, sc.c11.center)}};
      }

      if (sc.nondegeneracy.enabled) {
        json rows = json::array();
        for (const auto& e : nondegeneracy_profile(result->u, sc.nondegeneracy.center, sc.nondegeneracy.radii)) {
          rows.push_back({{"r", e.r}, {"value", e.value}});
        }
        analyses["nondegeneracy"] = {{"center", point_json(sc.nondegeneracy.center)}, {"entries", rows}};
      }
    } catch (const std::exception& e) {
      failed = true;
      error = std::string("analysis failed: ") + e.what();
    }
    timings["analyses_seconds"] = seconds_since(t0);
    report["analyses"] = analyses;
  }

  int exit_code = failed ? 1 : (flags.empty() ? 0 : 2);
  report["flags"] = flags;
  report["status"] = exit_code == 0 ? "ok" : exit_code == 2 ? "flagged" : "failed";
  if (!error.empty()) report["error"] = error;
  report["exit_code"] = exit_code;
  artifacts["report"] = "report.json";
  report["artifacts"] = artifacts;
  report["output_dir"] = out_dir.string();
  timings["total_seconds"] = seconds_since(t_start);
  report["timings"] = timings;

  if (options.normalize) report = normalize_report(std::move(report));
  const fs::path report_path = out_dir / "report.json";
  write_text(report_path, report.dump(2) + "\n");
  return {report, exit_code, report_path.string()};
}

json normalize_report(json report) {
  report.erase("timings");
  report.erase("output_dir");
  if (report.contains("scenario") && report["scenario"].is_object()) report["scenario"].erase("output_dir");
  return report;
}

OperatorValidation validate_operator(const EllipticOperator& op, std::uint64_t seed, int samples) {
  const auto rep = check_structure(op, samples, seed);
  json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["operator"] = operator_to_json(op);
  j["structure"] = structure_json(rep);
  const bool passed = j["structure"]["passed"].get<bool>();
  j["exit_code"] = passed ? 0 : 1;
  return {j, passed ? 0 : 1};
}

namespace {

void flatten(const json& v, const std::string& path, std::map<std::string, double>& out) {
  if (v.is_object()) {
    for (const auto& item : v.items()) {
      if (path.empty() && (item.key() == "timings" || item.key() == "output_dir" || item.key() == "artifacts")) {
        continue;
      }
      flatten(item.value(), path + "/" + item.key(), out);
    }
  } else if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) flatten(v[k], path + "/" + std::to_string(k), out);
  } else if (v.is_number()) {
    out[path] = v.get<double>();
  } else if (v.is_boolean()) {
    out[path] = v.get<bool>() ? 1.0 : 0.0;
  }
}

std::string scenario_name(const json& report, const char* which) {
  if (!report.is_object() || !report.contains("scenario") || !report["scenario"].contains("name")) {
    throw ValidationError(std::string("report ") + which + " has no scenario name");
  }
  return report["scenario"]["name"].get<std::string>();
}

}  // namespace

std::vector<CompareRow> compare_reports(const json& a, const json& b, double tolerance) {
  const auto name_a = scenario_name(a, "A"), name_b = scenario_name(b, "B");
  if (name_a != name_b) {
    throw ValidationError("reports describe different scenarios ('" + name_a + "' vs '" + name_b + "')");
  }
  std::map<std::string, double> fa, fb;
  flatten(a, "", fa);
  flatten(b, "", fb);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CompareRow> rows;
  for (const auto& [key, va] : fa) {
    const auto it = fb.find(key);
    if (it == fb.end()) {
      rows.push_back({key, va, nan, nan, false});
    } else if (it->second != va) {
      const double d = it->second - va;
      rows.push_back({key, va, it->second, d, std::abs(d) <= tolerance});
    }
  }
  for (const auto& [key, vb] : fb) {
    if (!fa.count(key)) rows.push_back({key, nan, vb, nan, false});
  }
  return rows;
}

json dump_info() {
  json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["kernels"] = {{"selected", std::string(simd::kernels().name)},
                  {"scalar", true},
                  {"avx2", simd::avx2_kernels() != nullptr}};
  j["compiler"] = __VERSION__;
  j["cxx_standard"] = static_cast<long>(__cplusplus);
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["field_dump"] = {{"format", "fblab-field"}, {"version", 1}, {"byte_order", "little"}};
  j["modes"] = {"dirichlet", "obstacle", "nosign"};
  j["operator_kinds"] = {"linear-trace", "pucci-plus", "pucci-minus", "bellman-min", "custom-table"};
  return j;
}

}  // namespace fblab
