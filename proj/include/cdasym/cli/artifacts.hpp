#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "cdasym/error.hpp"
#include "cdasym/io.hpp"
#include "cdasym/solver.hpp"

namespace cdasym::cli {

// Git blob id: sha1("blob <size>\0<content>"), lowercase hex.
inline std::string git_blob_hash(const std::string& content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data += content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw Error(ErrorKind::InternalError, "SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Keys are sorted (nlohmann::json objects are ordered maps).
inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = io::open_for_write(path);
  out << j.dump(2) << '\n';
}

// Two-column (or wider) whitespace-separated data for gnuplot.
struct Plot {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

inline void write_plot(const std::filesystem::path& dir, const Plot& plot) {
  auto out = io::open_for_write(dir / (plot.name + ".dat"));
  out << '#';
  for (const auto& h : plot.header) out << ' ' << h;
  out << '\n';
  const std::size_t rows = plot.columns.empty() ? 0 : plot.columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < plot.columns.size(); ++c) out << (c ? " " : "") << io::format_real(plot.columns[c][r]);
    out << '\n';
  }
}

// series.csv with columns t,mass,l1,l2,linf,grad_l2.
inline void write_series(const std::filesystem::path& path, const Trajectory& traj) {
  std::vector<std::vector<double>> cols(6);
  for (const auto& r : traj.series) {
    cols[0].push_back(r.t);
    cols[1].push_back(r.mass);
    cols[2].push_back(r.l1);
    cols[3].push_back(r.l2);
    cols[4].push_back(r.linf);
    cols[5].push_back(r.grad_l2);
  }
  io::write_csv(path, {"t", "mass", "l1", "l2", "linf", "grad_l2"}, cols);
}

inline void write_snapshots(const std::filesystem::path& dir, const Trajectory& traj) {
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%04zu.csv", k);
    io::write_field_csv(dir / name, traj.snapshots[k]);
  }
}

}  // namespace cdasym::cli
