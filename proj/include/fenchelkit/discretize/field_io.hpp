#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/discretize/grid.hpp"

namespace fenchelkit {

// CSV: a header naming the index columns (i, or i,j) and the value
// column(s), then one row per node or cell in index order (i fastest).
//
// Binary: the 8 magic bytes "FKFIELD1", then little-endian uint32 values
// n, the extents along x1 (and x2), and the component count, then the
// values as little-endian IEEE-754 doubles with i fastest, components
// interleaved.

namespace detail {

inline void write_row_index(std::ostream& os, const std::array<int, 2>& ij, int n) {
  os << ij[0];
  if (n == 2) os << ',' << ij[1];
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

inline void put_f64(std::ostream& os, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("binary field: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("binary field: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

constexpr char kMagic[8] = {'F', 'K', 'F', 'I', 'E', 'L', 'D', '1'};

}  // namespace detail

inline void write_csv(std::ostream& os, const ScalarField& u) {
  const Grid& g = u.grid();
  os << (g.dim() == 1 ? "i,value\n" : "i,j,value\n") << std::setprecision(17);
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    detail::write_row_index(os, g.node_coords(k), g.dim());
    os << ',' << u[k] << '\n';
  }
}

inline void write_csv(std::ostream& os, const VectorField& V) {
  const Grid& g = V.grid();
  os << (g.dim() == 1 ? "i,value\n" : "i,j,value_1,value_2\n") << std::setprecision(17);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    detail::write_row_index(os, g.cell_coords(c), g.dim());
    os << ',' << V[c][0];
    if (g.dim() == 2) os << ',' << V[c][1];
    os << '\n';
  }
}

inline ScalarField read_csv(std::istream& is, const Grid& g) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("csv field: empty input");
  const std::string want = g.dim() == 1 ? "i,value" : "i,j,value";
  if (line != want) throw ValidationError("csv field: expected header '" + want + "', got '" + line + "'");
  ScalarField u(g);
  std::vector<char> seen(g.nodes(), 0);
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    if (parts.size() != static_cast<std::size_t>(g.dim()) + 1)
      throw ValidationError("csv field: row " + std::to_string(row) + " has " + std::to_string(parts.size()) + " columns");
    try {
      const int i = std::stoi(parts[0]);
      const int j = g.dim() == 2 ? std::stoi(parts[1]) : 0;
      const int N = g.cells_per_axis();
      if (i < 0 || i > N || j < 0 || j > N) throw ValidationError("index out of range");
      const std::size_t k = g.node(i, j);
      u[k] = std::stod(parts.back());
      seen[k] = 1;
    } catch (const std::exception& e) {
      throw ValidationError("csv field: row " + std::to_string(row) + ": " + e.what());
    }
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) throw ValidationError("csv field: node " + std::to_string(k) + " missing");
  u.require_finite();
  return u;
}

inline void write_binary(std::ostream& os, const Grid& g, const std::vector<double>& data,
                         std::uint32_t extent, std::uint32_t components) {
  os.write(detail::kMagic, 8);
  detail::put_u32(os, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) detail::put_u32(os, extent);
  detail::put_u32(os, components);
  for (double d : data) detail::put_f64(os, d);
}

inline void write_binary(std::ostream& os, const ScalarField& u) {
  const Grid& g = u.grid();
  write_binary(os, g, u.values(), static_cast<std::uint32_t>(g.cells_per_axis() + 1), 1);
}

inline void write_binary(std::ostream& os, const VectorField& V) {
  const Grid& g = V.grid();
  std::vector<double> flat;
  flat.reserve(V.size() * static_cast<std::size_t>(g.dim()));
  for (const Vec2N& v : V.values())
    for (int a = 0; a < g.dim(); ++a) flat.push_back(v[a]);
  write_binary(os, g, flat, static_cast<std::uint32_t>(g.cells_per_axis()), static_cast<std::uint32_t>(g.dim()));
}

/// Reads a nodal scalar field written by write_binary.
inline ScalarField read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, detail::kMagic, 8) != 0)
    throw ValidationError("binary field: bad magic bytes");
  const std::uint32_t n = detail::get_u32(is);
  if (n != 1 && n != 2) throw ValidationError("binary field: bad dimension " + std::to_string(n));
  std::uint32_t extent = detail::get_u32(is);
  if (n == 2 && detail::get_u32(is) != extent) throw ValidationError("binary field: non-square extents");
  if (detail::get_u32(is) != 1) throw ValidationError("binary field: expected a scalar field");
  if (extent < 5) throw ValidationError("binary field: too few nodes");
  const Grid g(static_cast<int>(n), static_cast<int>(extent) - 1);
  std::vector<double> v(g.nodes());
  for (double& d : v) d = detail::get_f64(is);
  return ScalarField(g, std::move(v));
}

}  // namespace fenchelkit
