#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "simcurv/sweep.hpp"

namespace simcurv {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Header t, x_1..x_k, p_1..p_m, K_2..K_{k+1}, route and one row per node.
std::string curvature_csv(const std::vector<NodeResult>& nodes, int k, int m, std::string_view route);

/// Parses a curvature CSV back into rows of numbers (route column dropped).
std::vector<std::vector<double>> read_curvature_csv(const std::filesystem::path& path,
                                                    std::vector<std::string>* header = nullptr);

std::string dump_json(const nlohmann::json& j);

}  // namespace simcurv
