// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance [--known-failures 8,...] [--out DIR]
//
// A criterion listed in --known-failures still prints FAIL, but does not
// change the exit status. Any other FAIL exits 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/boundary_geometry.hpp"
#include "fblab/datum_expr.hpp"
#include "fblab/field_io.hpp"
#include "fblab/regularity.hpp"
#include "fblab/scenario.hpp"
#include "support.hpp"

using namespace fblab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Accumulates failed conditions into one detail string.
class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  Outcome outcome() const {
    Outcome o;
    o.verdict = failures_.empty() ? Verdict::Pass : Verdict::Fail;
    std::string d;
    for (const auto& f : failures_) d += (d.empty() ? "" : "; ") + std::string("failed: ") + f;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    o.detail = d;
    return o;
  }

 private:
  std::vector<std::string> failures_, notes_;
};

const fs::path kSource = FBLAB_SOURCE_DIR;
fs::path g_out;
std::vector<json> g_reports;  // every scenario report produced by the suite

json scenario_doc(const std::string& file) { return read_json_file((kSource / "scenarios" / file).string()); }

json run(json doc, const std::string& tag, bool normalize = false) {
  RunOptions opt;
  opt.output_dir = (g_out / tag).string();
  opt.normalize = normalize;
  auto outcome = run_scenario(scenario_from_json(doc, (kSource / "scenarios").string()), opt);
  g_reports.push_back(outcome.report);
  return outcome.report;
}

double pucci_oracle(const oracle::Mat2& m, double l0, double l1, bool plus) {
  const auto [lo, hi] = oracle::eigenvalues(m);
  auto w = [&](double e) { return plus ? (e > 0 ? l1 : l0) * e : (e > 0 ? l0 : l1) * e; };
  return w(lo) + w(hi);
}

// --- criteria -------------------------------------------------------------

Outcome crit1() {
  const auto t0 = std::chrono::steady_clock::now();
  const EllipticityBounds b{1.0, 2.0};
  std::mt19937_64 rng(20240601);
  Checks c;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto m = oracle::random_mat2(rng, 5.0);
    const auto s = oracle::brute_force_pucci(m, b.lambda0, b.lambda1, 10000, 1000 + k);
    const double plus = pucci_plus(oracle::to_sym(m), b), minus = pucci_minus(oracle::to_sym(m), b);
    c.require(plus >= s.sup - 1e-12, "P+ below a sample at matrix " + std::to_string(k));
    c.require(minus <= s.inf + 1e-12, "P- above a sample at matrix " + std::to_string(k));
    worst = std::max({worst, plus - s.sup, s.inf - minus});
  }
  const double t = seconds_since(t0);
  c.require(worst <= 1e-3, "max gap to sampled extremum " + num(worst) + " > 1e-3");
  c.require(t < 10.0, "runtime " + num(t) + " s >= 10 s");
  c.note("max gap " + num(worst) + ", " + num(t) + " s");
  return c.outcome();
}

Outcome crit2() {
  const auto t0 = std::chrono::steady_clock::now();
  const EllipticityBounds b{1.0, 2.0};
  const std::vector<std::pair<std::string, EllipticOperator>> ops{
      {"linear-trace", EllipticOperator::linear_trace(b)},
      {"pucci-minus", EllipticOperator::pucci_minus(b)},
      {"bellman-min", EllipticOperator::bellman_min(b, {SymMatrix::two_by_two(1.0, 0.0, 2.0),
                                                        SymMatrix::two_by_two(1.5, 0.3, 1.4)})}};
  std::mt19937_64 rng(31337);
  Checks c;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [name, op] : ops) {
    for (int k = 0; k < 1000; ++k) {
      const auto m = oracle::random_mat2(rng, 5.0), n = oracle::random_mat2(rng, 5.0);
      const oracle::Mat2 d{m.a - n.a, m.b - n.b, m.c - n.c};
      const double diff = op.evaluate(oracle::to_sym(m)) - op.evaluate(oracle::to_sym(n));
      const double lo = pucci_oracle(d, b.lambda0, b.lambda1, false), hi = pucci_oracle(d, b.lambda0, b.lambda1, true);
      worst = std::max({worst, lo - diff, diff - hi});
      if (diff < lo - 1e-9 || diff > hi + 1e-9) {
        c.require(false, name + " pair " + std::to_string(k));
        break;
      }
    }
  }
  const double t = seconds_since(t0);
  c.require(t < 5.0, "runtime " + num(t) + " s >= 5 s");
  c.note("3000 pairs, worst violation " + num(worst) + ", " + num(t) + " s");
  return c.outcome();
}

Outcome crit3() {
  const auto t0 = std::chrono::steady_clock::now();
  auto g = HalfDiskGrid::make(128);
  auto exact = [](Point p) { return 0.5 * p.x2 * p.x2; };
  SolverConfig cfg;
  cfg.mode = SolveMode::Obstacle;
  Checks c;
  for (const auto& [name, op] : std::vector<std::pair<std::string, EllipticOperator>>{
           {"linear-trace", EllipticOperator::linear_trace()},
           {"pucci-minus", EllipticOperator::pucci_minus({1.0, 2.0})}}) {
    const auto r = solve(op, exact, g, cfg);
    double err = 0.0;
    for (std::size_t id = 0; id < g->size(); ++id)
      if (!g->is_exterior(id)) err = std::max(err, std::abs(r.u[id] - exact(g->point(id))));
    c.require(r.report.converged, name + " did not converge");
    c.require(err <= 1e-8, name + " error " + num(err) + " > 1e-8");
    c.note(name + " error " + num(err));
  }
  const double t = seconds_since(t0);
  c.require(t < 60.0, "runtime " + num(t) + " s >= 60 s");
  c.note(num(t) + " s");
  return c.outcome();
}

double line_hausdorff(const BoundaryCurve& curve, double level, double h) {
  double d = 0.0;
  const auto verts = curve.vertices();
  if (verts.empty()) return std::numeric_limits<double>::infinity();
  for (const auto& v : verts) d = std::max(d, std::abs(v.x2 - level));
  // The contour stops a cell or two short of the arc, where Omega ends.
  const double half = std::sqrt(1.0 - level * level) - 3.0 * h;
  for (int k = 0; k <= 400; ++k) {
    const Point t{-half + 2.0 * half * k / 400, level};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : verts) best = std::min(best, norm(v - t));
    d = std::max(d, best);
  }
  return d;
}

Outcome crit4() {
  Checks c;
  for (int n : {64, 128}) {
    auto doc = scenario_doc("detached.json");
    doc["grid"]["n"] = n;
    const auto s = scenario_from_json(doc, (kSource / "scenarios").string());
    auto g = HalfDiskGrid::make(n);
    const double h = g->h();
    const auto datum = DatumExpr::parse(s.datum);
    const auto r = solve(s.op, datum, g, s.solver);
    c.require(r.report.converged, "n=" + std::to_string(n) + " did not converge");
    const double dh = line_hausdorff(extract_gamma(r.active), 0.25, h);
    const double clear = gamma_i_clearance(extract_gamma_i(r.u, r.report.tol_u));
    c.require(dh <= 2 * h, "n=" + std::to_string(n) + " Hausdorff " + num(dh) + " > 2h");
    c.require(std::abs(clear - 0.25) <= 2 * h, "n=" + std::to_string(n) + " clearance " + num(clear));
    c.note("n=" + std::to_string(n) + ": Hausdorff " + num(dh) + " (2h=" + num(2 * h) + "), clearance " + num(clear));
  }
  return c.outcome();
}

Outcome crit5() {
  const auto rep = run(scenario_doc("halfspace.json"), "halfspace");
  const auto& b = rep["analyses"]["blowup"];
  Checks c;
  c.require(b["classification"]["alternative"] == "case-i", "classification " + b["classification"]["alternative"].get<std::string>());
  const double bb = b["classification"]["b"].get<double>(), a = b["classification"]["a"].get<double>();
  const double m = b["m_profile"]["estimate"].get<double>();
  c.require(std::abs(bb - 0.5) <= 0.02, "|b-0.5| = " + num(std::abs(bb - 0.5)));
  c.require(m <= 0.05, "M = " + num(m));
  c.require(std::abs(a) <= 0.02, "|a| = " + num(std::abs(a)));
  std::set<double> radii;
  for (const auto& f : b["fits"]) {
    radii.insert(f["radius"].get<double>());
    c.require(std::abs(f["b"].get<double>() - 0.5) <= 0.02 && std::abs(f["a"].get<double>()) <= 0.02,
              "fit at r=" + num(f["radius"].get<double>()));
  }
  for (double r : {0.5, 0.25, 0.125}) c.require(radii.count(r) == 1, "no fit at r=" + num(r));
  c.require(b["uniqueness"]["consistent"].get<bool>(), "fits inconsistent across radii");
  c.note("a=" + num(a) + " b=" + num(bb) + " M=" + num(m) + " spread=" + num(b["uniqueness"]["spread"].get<double>()));
  return c.outcome();
}

Outcome crit6() {
  const auto rep = run(scenario_doc("tilted.json"), "tilted");
  const auto& b = rep["analyses"]["blowup"];
  Checks c;
  c.require(b["classification"]["alternative"] == "case-ii", "classification " + b["classification"]["alternative"].get<std::string>());
  const double a = b["classification"]["a"].get<double>(), m = b["m_profile"]["estimate"].get<double>();
  c.require(std::abs(a - 1.0) <= 0.05, "|a-1| = " + num(std::abs(a - 1.0)));
  c.require(std::abs(m - std::abs(a)) <= 0.05, "|M-|a|| = " + num(std::abs(m - std::abs(a))));
  c.note("a=" + num(a) + " M=" + num(m));
  return c.outcome();
}

Outcome crit7() {
  Checks c;
  int case_ii = 0;
  for (const auto& rep : g_reports) {
    if (!rep.contains("analyses") || !rep["analyses"].contains("blowup")) continue;
    const auto& b = rep["analyses"]["blowup"];
    if (!b.contains("classification") || b["classification"]["alternative"] != "case-ii") continue;
    ++case_ii;
    const double h = rep["scenario"]["grid"]["h"].get<double>();
    const auto& clear = rep["analyses"]["boundary"]["gamma_i_clearance"];
    const double d = clear.is_null() ? std::numeric_limits<double>::infinity() : clear.get<double>();
    const std::string name = rep["scenario"]["name"].get<std::string>();
    c.require(d >= 4 * h, name + " clearance " + num(d) + " < 4h");
    c.note(name + " clearance " + (clear.is_null() ? std::string("inf (empty)") : num(d)) + " vs 4h=" + num(4 * h));
  }
  if (case_ii == 0) return {Verdict::Skip, "no Case(ii) run in the suite"};
  return c.outcome();
}

Outcome crit8() {
  const auto doc = scenario_doc("contact.json");
  const auto rep = run(doc, "contact");
  const double h = rep["scenario"]["grid"]["h"].get<double>();
  const auto& bd = rep["analyses"]["boundary"];
  // Contact: the lowest Gamma vertex sits in the fixed boundary's halo near 0.
  std::ifstream in(g_out / "contact" / rep["artifacts"]["gamma_csv"].get<std::string>());
  std::string line;
  std::getline(in, line);
  Point lowest{0.0, std::numeric_limits<double>::infinity()};
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[4];
    for (auto& x : f) std::getline(ss, x, ',');
    const Point p{std::stod(f[2]), std::stod(f[3])};
    if (p.x2 < lowest.x2 || (p.x2 == lowest.x2 && std::abs(p.x1) < std::abs(lowest.x1))) lowest = p;
  }
  if (!(lowest.x2 <= 2 * h && std::abs(lowest.x1) <= 8 * h)) {
    return {Verdict::Skip, "designated datum produced no contact near the origin at h=" + num(h) +
                               " (lowest Gamma vertex " + num(lowest.x1) + ", " + num(lowest.x2) + ")"};
  }
  Checks c;
  std::vector<double> omega;
  for (const auto& e : bd["modulus"]["entries"]) omega.push_back(e["omega"].get<double>());
  c.require(omega.size() == 3, "expected radii 0.4, 0.2, 0.1");
  if (omega.size() == 3) {
    c.require(omega[1] <= omega[0] && omega[2] <= omega[1], "omega not nonincreasing");
    c.require(omega[2] <= 0.5 * omega[0], "omega(0.1)/omega(0.4) = " + num(omega[2] / omega[0]) + " > 0.5");
    c.note("omega(0.4, 0.2, 0.1) = " + num(omega[0]) + ", " + num(omega[1]) + ", " + num(omega[2]));
  }
  c.require(bd["cone"]["clear"].get<bool>(), "cone eps=0.5 rho=0.1 not clear");
  c.note("contact at x1=" + num(lowest.x1) + " (" + num(lowest.x1 / h) + "h)");
  return c.outcome();
}

Outcome crit9() {
  Checks c;
  json reps[2];
  int idx = 0;
  for (int n : {64, 128}) {
    auto doc = scenario_doc("detached.json");
    doc["grid"]["n"] = n;
    reps[idx++] = run(doc, "detached_n" + std::to_string(n));
  }
  const double c0 = reps[0]["analyses"]["c11"]["sup"].get<double>(), c1 = reps[1]["analyses"]["c11"]["sup"].get<double>();
  const double b0 = reps[0]["analyses"]["bmo"]["bmo_max"].get<double>(),
               b1 = reps[1]["analyses"]["bmo"]["bmo_max"].get<double>();
  const double dc = std::abs(c1 - c0) / c0;
  c.require(dc < 0.10, "c11 change " + num(100 * dc) + "%");
  c.require(b1 < 1.5 * b0, "bmo growth " + num(b1 / b0) + "x");
  c.note("c11 " + num(c0) + " -> " + num(c1) + ", bmo_max " + num(b0) + " -> " + num(b1));

  auto g = HalfDiskGrid::make(128);
  double worst = 0.0;
  const std::vector<std::pair<EllipticOperator, std::function<double(Point)>>> quads{
      {EllipticOperator::linear_trace(), [](Point p) { return 0.5 * p.x2 * p.x2; }},
      {EllipticOperator::linear_trace(), [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; }},
      {EllipticOperator::pucci_minus({1.0, 2.0}), [](Point p) { return 0.5 * p.x2 * p.x2; }}};
  for (const auto& [op, f] : quads) {
    const auto u = ScalarField::sample(g, f);
    const auto d = dyadic_profile(u, {}, 0.5, op);
    worst = std::max({worst, d.constant, d.max_increment, bmo_profile(u, d, {}).max_value});
  }
  c.require(worst <= 1e-10, "quadratic diagnostics " + num(worst) + " > 1e-10");
  c.note("quadratic diagnostics <= " + num(worst));
  return c.outcome();
}

Outcome crit10() {
  Checks c;
  const auto doc = scenario_doc("detached_pucci.json");
  const auto a = run(doc, "determinism_a", true), b = run(doc, "determinism_b", true);
  std::ifstream fa(g_out / "determinism_a" / "report.json"), fb(g_out / "determinism_b" / "report.json");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  c.require(!sa.str().empty() && sa.str() == sb.str(), "normalized reports differ");

  auto g = HalfDiskGrid::make(64);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  std::vector<double> v(g->size(), 0.0);
  for (std::size_t id = 0; id < g->size(); ++id)
    if (!g->is_exterior(id)) v[id] = d(rng);
  const ScalarField u(g, v);
  const auto path = (g_out / "roundtrip.bin").string();
  write_field_dump(path, u);
  const auto back = read_field_dump(path);
  c.require(back.size() == u.size() &&
                std::memcmp(back.values().data(), u.values().data(), u.size() * sizeof(double)) == 0,
            "field dump round trip is not bit-exact");
  c.note("report " + std::to_string(sa.str().size()) + " bytes, dump " + std::to_string(fs::file_size(path)) + " bytes");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  g_out = fs::temp_directory_path() / "fblab_acceptance";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--known-failures") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) known.insert(std::stoi(tok));
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--known-failures N,...] [--out DIR]\n");
      return 1;
    }
  }
  fs::remove_all(g_out);
  fs::create_directories(g_out);

  const std::vector<std::function<Outcome()>> criteria{crit1, crit2, crit3, crit4, crit5,
                                                       crit6, crit7, crit8, crit9, crit10};
  // Criterion 7 inspects the runs of the others, so it goes last.
  const std::vector<int> order{1, 2, 3, 4, 5, 6, 8, 9, 10, 7};
  std::vector<Outcome> results(criteria.size());
  for (int k : order) {
    try {
      results[k - 1] = criteria[k - 1]();
    } catch (const std::exception& e) {
      results[k - 1] = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
  }

  int unexpected = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const auto& r = results[i];
    const char* tag = r.verdict == Verdict::Pass ? "PASS" : r.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    const bool expected = known.count(k) > 0;
    if (r.verdict == Verdict::Fail && !expected) ++unexpected;
    std::printf("criterion %2d: %s%s  %s\n", k, tag, r.verdict == Verdict::Fail && expected ? " (known)" : "",
                r.detail.c_str());
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
