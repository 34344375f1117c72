#include "simcurv/registry.hpp"

#include "simcurv/error.hpp"
#include "simcurv/models.hpp"

namespace simcurv {

const std::vector<ModelInfo>& list_models() {
  static const std::vector<ModelInfo> models = {
      {"davis_skodje", 1, 1, {{"gamma", 3.5}}, "(1,1) Davis-Skodje model, SIM x/(x+1)"},
      {"kuehn_nonlinear", 1, 1, {{"eps", 0.01}}, "(1,1) x' = -eps x, y' = x^2 - y"},
      {"enzyme_mmh", 1, 1, {{"lambda", 0.5}, {"kappa", 1.5}, {"eps", 0.01}},
       "(1,1) Michaelis-Menten-Henri enzyme kinetics (no closed-form flow)"},
      {"ds_2_1", 2, 1, {{"gamma", 3.5}}, "(2,1) Davis-Skodje extension"},
      {"model_3_2", 3, 2, {{"eps", 0.01}}, "(3,2) polynomial model"},
  };
  return models;
}

SystemPtr make_system(std::string_view name, const nlohmann::json& params) {
  const ModelInfo* info = nullptr;
  for (const auto& m : list_models())
    if (m.name == name) info = &m;
  if (!info) throw InvalidArgument("unknown model '" + std::string(name) + "'");
  if (!params.is_null() && !params.is_object())
    throw InvalidArgument("model parameters must be a JSON object");

  ParamMap p = info->defaults;
  if (params.is_object()) {
    for (const auto& [key, value] : params.items()) {
      if (!p.contains(key))
        throw InvalidArgument(info->name + ": unknown parameter '" + key + "'");
      if (!value.is_number())
        throw InvalidArgument(info->name + ": parameter '" + key + "' must be a number");
      p[key] = value.get<double>();
    }
  }

  if (name == "davis_skodje") return make_davis_skodje(p.at("gamma"));
  if (name == "kuehn_nonlinear") return make_kuehn_nonlinear(p.at("eps"));
  if (name == "enzyme_mmh") return make_enzyme_mmh(p.at("lambda"), p.at("kappa"), p.at("eps"));
  if (name == "ds_2_1") return make_ds_2_1(p.at("gamma"));
  return make_model_3_2(p.at("eps"));
}

SystemPtr system_from_json(const nlohmann::json& selection) {
  if (!selection.is_object() || !selection.contains("model") || !selection["model"].is_string())
    throw InvalidArgument("model selection needs a string field 'model'");
  return make_system(selection["model"].get<std::string>(),
                     selection.value("params", nlohmann::json::object()));
}

}  // namespace simcurv
