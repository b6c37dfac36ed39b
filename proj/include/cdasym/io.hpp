#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"

namespace cdasym::io {

// Shortest round-trippable decimal at 17 significant digits.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot open " + path.string() + " for writing");
  return out;
}

// CSV table with a header row; every cell formatted with format_real.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  auto out = open_for_write(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw Error(ErrorKind::ShapeMismatch, "ragged CSV columns");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_real(columns[c][r]);
    out << '\n';
  }
}

// Field file: header `x,<name>`, one row per node.
inline void write_field_csv(const std::filesystem::path& path, const Field& f,
                            const std::string& value_name = "u") {
  write_csv(path, {"x", value_name}, {f.grid().nodes(), f.data()});
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidField, path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= t.columns.size()) throw Error(ErrorKind::ShapeMismatch, "row wider than header in " + path.string());
      t.columns[c++].push_back(std::stod(cell));
    }
    if (c != t.columns.size()) throw Error(ErrorKind::ShapeMismatch, "short row in " + path.string());
  }
  return t;
}

// Reads a field file written by write_field_csv onto `grid`.
inline Field read_field_csv(const std::filesystem::path& path, const Grid1D& grid) {
  Table t = read_csv(path);
  if (t.columns.size() < 2) throw Error(ErrorKind::ShapeMismatch, "field file needs two columns");
  const auto& x = t.columns[0];
  const auto& u = t.columns[1];
  if (u.size() != grid.size()) {
    throw Error(ErrorKind::ShapeMismatch, path.string() + " has " + std::to_string(u.size()) +
                                              " rows, grid has " + std::to_string(grid.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - grid.node(i)) > 1e-9 * std::max(1.0, std::abs(grid.node(i)))) {
      throw Error(ErrorKind::ShapeMismatch, path.string() + " nodes do not match the grid");
    }
  }
  return Field(grid, u);
}

}  // namespace cdasym::io
