#include "fblab/operator_json.hpp"

#include <fstream>
#include <sstream>

namespace fblab {

namespace {

double require_number(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ValidationError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

SymMatrix matrix_from_json(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": matrix must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : v) {
    if (!row.is_array()) throw ValidationError(where + ": matrix row must be an array");
    std::vector<double> r;
    for (const auto& e : row) {
      if (!e.is_number()) throw ValidationError(where + ": matrix entries must be numbers");
      r.push_back(e.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return SymMatrix::from_rows(rows);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

std::vector<SymMatrix> family_from_json(const nlohmann::json& doc) {
  if (!doc.contains("family")) throw ValidationError("operator: missing field 'family'");
  const auto& fam = doc.at("family");
  if (!fam.is_array() || fam.empty()) throw ValidationError("operator: 'family' must be a nonempty array");
  std::vector<SymMatrix> out;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    out.push_back(matrix_from_json(fam[i], "operator.family[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

EllipticOperator operator_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("operator: document must be a JSON object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    throw ValidationError("operator: missing string field 'kind'");
  }
  const OperatorKind kind = operator_kind_from_string(doc.at("kind").get<std::string>());
  EllipticityBounds bounds{1.0, 1.0};
  if (doc.contains("lambda0") || doc.contains("lambda1") || kind == OperatorKind::PucciPlus ||
      kind == OperatorKind::PucciMinus || kind == OperatorKind::BellmanMin) {
    bounds.lambda0 = require_number(doc, "lambda0", "operator");
    bounds.lambda1 = require_number(doc, "lambda1", "operator");
  }
  int dim = 2;
  if (doc.contains("dim")) {
    if (!doc.at("dim").is_number_integer()) throw ValidationError("operator: 'dim' must be an integer");
    dim = doc.at("dim").get<int>();
  }

  auto op = [&] {
    switch (kind) {
      case OperatorKind::LinearTrace: return EllipticOperator::linear_trace(bounds, dim);
      case OperatorKind::PucciPlus: return EllipticOperator::pucci_plus(bounds, dim);
      case OperatorKind::PucciMinus: return EllipticOperator::pucci_minus(bounds, dim);
      case OperatorKind::BellmanMin: return EllipticOperator::bellman_min(bounds, family_from_json(doc));
      case OperatorKind::CustomTable: {
        TableCombine combine = TableCombine::Min;
        if (doc.contains("combine")) {
          const auto c = doc.at("combine").get<std::string>();
          if (c == "min") combine = TableCombine::Min;
          else if (c == "max") combine = TableCombine::Max;
          else throw ValidationError("operator: 'combine' must be \"min\" or \"max\"");
        }
        return EllipticOperator::custom_table(bounds, family_from_json(doc), combine);
      }
    }
    throw ValidationError("operator: unsupported kind");
  }();

  if (doc.contains("x_dependence") && !doc.at("x_dependence").is_null()) {
    const auto& xd = doc.at("x_dependence");
    HolderDependence dep;
    dep.cbar = require_number(xd, "cbar", "operator.x_dependence");
    dep.alphabar = require_number(xd, "alphabar", "operator.x_dependence");
    op = op.with_x_dependence(dep);
  }
  return op;
}

EllipticOperator load_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open operator file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return operator_from_json(doc);
}

nlohmann::json operator_to_json(const EllipticOperator& op) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(op.kind()));
  j["lambda0"] = op.bounds().lambda0;
  j["lambda1"] = op.bounds().lambda1;
  j["dim"] = op.dim();
  if (!op.family().empty()) {
    j["family"] = nlohmann::json::array();
    for (const auto& a : op.family()) j["family"].push_back(a.rows());
  }
  if (op.kind() == OperatorKind::CustomTable) j["combine"] = op.combine() == TableCombine::Max ? "max" : "min";
  if (const auto& dep = op.x_dependence()) {
    j["x_dependence"] = {{"cbar", dep->cbar}, {"alphabar", dep->alphabar}};
  }
  return j;
}

}  // namespace fblab
