#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "simcurv/system.hpp"

namespace simcurv {

struct ModelInfo {
  std::string name;
  int slow_dim;
  int fast_dim;
  ParamMap defaults;
  std::string summary;
};

/// The five registered models in a fixed order.
const std::vector<ModelInfo>& list_models();

/// Builds a model from its registry name and a JSON object of parameters.
/// Missing parameters take their defaults; unknown keys and non-numeric
/// values are rejected.
SystemPtr make_system(std::string_view name, const nlohmann::json& params = nlohmann::json::object());

/// Parses {"model": ..., "params": {...}}.
SystemPtr system_from_json(const nlohmann::json& selection);

}  // namespace simcurv
