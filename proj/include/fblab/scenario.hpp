#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fblab/blowup.hpp"
#include "fblab/elliptic_operator.hpp"
#include "fblab/fb_solver.hpp"

namespace fblab {

inline constexpr const char* kToolName = "fblab";
inline constexpr const char* kToolVersion = "0.1.0";

struct BlowupAnalysis {
  bool enabled = false;
  Point center{};
  std::vector<double> radii;  // empty: default radii
  BlowupThresholds thresholds;
};

struct BoundaryAnalysis {
  bool enabled = false;
  Point center{};
  std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  double cone_epsilon = 0.5;
  double cone_rho = 0.1;
  std::optional<double> gamma_i_tol;  // unset: solver tol_u
  std::vector<double> complement_radii{0.25, 0.5};
};

struct BmoAnalysis {
  bool enabled = false;
  Point center{};
  double rho = 0.5;
};

struct C11Analysis {
  bool enabled = false;
  Point center{};
  double radius = 0.5;
};

struct NondegeneracyAnalysis {
  bool enabled = false;
  Point center{};
  std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
};

struct Scenario {
  std::string name;
  nlohmann::json operator_spec;  // resolved operator JSON
  EllipticOperator op = EllipticOperator::linear_trace();
  int n = 64;
  SolveMode mode = SolveMode::Dirichlet;
  std::string datum;
  std::uint64_t seed = 0;
  SolverConfig solver;
  BlowupAnalysis blowup;
  BoundaryAnalysis boundary;
  BmoAnalysis bmo;
  C11Analysis c11;
  NondegeneracyAnalysis nondegeneracy;
  std::string output_dir;

  /// Canonical echo of every field, defaults filled in.
  nlohmann::json to_json() const;
};

/// Raised for malformed scenario or report text; carries line and column.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// Parses JSON text, converting syntax errors into ParseError.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

/// Unknown keys are errors. `base_dir` resolves a relative operator_file.
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

struct RunOptions {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool normalize = false;
};

struct RunOutcome {
  nlohmann::json report;
  int exit_code = 1;
  std::string report_path;
};

/// Solve, analyses, artifacts. Exit code 0 when converged and unflagged,
/// 2 when converged with flags, 1 on failure.
RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Drops wall-clock timings and the output directory.
nlohmann::json normalize_report(nlohmann::json report);

struct OperatorValidation {
  nlohmann::json report;
  int exit_code = 1;
};

OperatorValidation validate_operator(const EllipticOperator& op, std::uint64_t seed, int samples = 256);

struct CompareRow {
  std::string metric;  // JSON pointer
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
  bool within_tolerance = false;
};

/// Numeric leaves that differ between two reports of the same scenario.
/// Timings, output_dir and artifacts are skipped. Throws ValidationError
/// when the scenario names differ.
std::vector<CompareRow> compare_reports(const nlohmann::json& a, const nlohmann::json& b, double tolerance);

nlohmann::json dump_info();

}  // namespace fblab
