#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fblab/elliptic_operator.hpp"

namespace fblab {

/// Builds an operator from its JSON description (schema in docs/formats.md).
/// Field errors are reported as ValidationError naming the offending key.
EllipticOperator operator_from_json(const nlohmann::json& doc);
EllipticOperator load_operator_file(const std::string& path);

nlohmann::json operator_to_json(const EllipticOperator& op);

}  // namespace fblab
