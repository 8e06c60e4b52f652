#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fblab/scalar_field.hpp"

namespace fblab {

// Dump format: one JSON header line
//   {"format":"fblab-field","version":1,"nx":..,"ny":..,"h":..,
//    "domain":[-1,1,0,1],"byte_order":"little","value_count":..}
// followed by nx*ny row-major IEEE-754 binary64 values, little endian.
// Exterior nodes are written as NaN.

void write_field_dump(const std::string& path, const ScalarField& u);
ScalarField read_field_dump(const std::string& path);
nlohmann::json read_field_dump_header(const std::string& path);

/// CSV with columns x1,x2,value over non-exterior nodes.
void write_field_csv(const std::string& path, const ScalarField& u);

}  // namespace fblab
