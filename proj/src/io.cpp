#include "simcurv/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + tmp.string());
    f << content;
    if (!f) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string curvature_csv(const std::vector<NodeResult>& nodes, int k, int m, std::string_view route) {
  std::string out = "t";
  for (int i = 1; i <= k; ++i) out += ",x_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",p_" + std::to_string(i);
  for (int i = 2; i <= k + 1; ++i) out += ",K_" + std::to_string(i);
  out += ",route\n";
  for (const auto& nd : nodes) {
    for (Eigen::Index i = 0; i < nd.point.size(); ++i) out += (i ? "," : "") + format_double(nd.point[i]);
    for (Eigen::Index i = 0; i < nd.p.size(); ++i) out += "," + format_double(nd.p[i]);
    for (Eigen::Index i = 0; i < nd.K.size(); ++i) out += "," + format_double(nd.K[i]);
    out += ",";
    out += route;
    out += "\n";
  }
  return out;
}

std::vector<std::vector<double>> read_curvature_csv(const std::filesystem::path& path,
                                                    std::vector<std::string>* header) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw InvalidArgument(path.string() + ": empty file");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.empty() || cols.back() != "route") throw InvalidArgument(path.string() + ": bad header");
  if (header) *header = cols;
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::vector<double> row;
    for (std::size_t i = 0; i + 1 < cols.size() && std::getline(ss, c, ','); ++i) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw InvalidArgument(path.string() + ": bad number '" + c + "'");
      row.push_back(v);
    }
    if (row.size() + 1 != cols.size()) throw InvalidArgument(path.string() + ": short row");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace simcurv
