#include "fblab/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>

namespace fblab {

namespace {

constexpr const char* kFormat = "fblab-field";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

nlohmann::json parse_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty field dump");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": bad dump header: " + e.what());
  }
  if (header.value("format", "") != kFormat) throw ValidationError(path + ": not a field dump");
  if (header.value("byte_order", "") != "little") throw ValidationError(path + ": unsupported byte order");
  return header;
}

}  // namespace

void write_field_dump(const std::string& path, const ScalarField& u) {
  const auto& g = u.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write field dump '" + path + "'");
  const nlohmann::json header = {{"format", kFormat}, {"version", 1},          {"nx", g.nx()},
                                 {"ny", g.ny()},      {"h", g.h()},            {"domain", {-1.0, 1.0, 0.0, 1.0}},
                                 {"byte_order", "little"}, {"value_count", u.size()}};
  out << header.dump() << '\n';
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = g.is_exterior(k) ? std::numeric_limits<double>::quiet_NaN() : u[k];
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw ValidationError("failed writing field dump '" + path + "'");
}

nlohmann::json read_field_dump_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open field dump '" + path + "'");
  return parse_header(in, path);
}

ScalarField read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open field dump '" + path + "'");
  const auto header = parse_header(in, path);
  auto grid = HalfDiskGrid::from_spacing(header.at("h").get<double>());
  const auto count = header.at("value_count").get<std::size_t>();
  if (header.at("nx").get<int>() != grid->nx() || header.at("ny").get<int>() != grid->ny() || count != grid->size()) {
    throw ValidationError(path + ": header dimensions are inconsistent");
  }
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw ValidationError(path + ": truncated value block");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    const double v = std::bit_cast<double>(to_little(bits));
    values[k] = grid->is_exterior(k) ? 0.0 : v;
  }
  return ScalarField(grid, std::move(values));
}

void write_field_csv(const std::string& path, const ScalarField& u) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "x1,x2,value\n" << std::setprecision(17);
  const auto& g = u.grid();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (g.is_exterior(k)) continue;
    const Point p = g.point(k);
    out << p.x1 << ',' << p.x2 << ',' << u[k] << '\n';
  }
}

}  // namespace fblab
