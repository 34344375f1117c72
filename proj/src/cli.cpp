#include "simcurv/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "simcurv/asymptotic.hpp"
#include "simcurv/criteria.hpp"
#include "simcurv/error.hpp"
#include "simcurv/io.hpp"
#include "simcurv/registry.hpp"
#include "simcurv/sweep.hpp"

namespace simcurv {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToleranceLedger =
    "Tolerances for validate-necessary:\n"
    "  --tol-closed  (1e-7) nodes whose partials come from the closed parameterization\n"
    "  --tol-numeric (1e-4) nodes whose partials are finite differences over the shooting\n"
    "                solver (step 1e-3, integrator rtol 1e-10, Newton |r| <= 1e-10)\n"
    "Exit codes: 0 success/pass, 1 validation failed, 2 numerical failure, 3 bad input.\n"
    "SIMCURV_JOBS overrides --jobs.";

double to_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InvalidArgument("bad number '" + std::string(s) + "' in " + std::string(what));
  return v;
}

std::vector<double> to_doubles(std::string_view s, std::string_view what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(',', pos);
    out.push_back(to_double(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos), what));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

struct Common {
  std::string model;
  std::string params = "{}";
  std::string a = "h_eps";
  std::string grid;
  std::string route = "gauss";
  std::string mode = "auto";
  std::string fd_base = "bvp";
  std::string out;
  int jobs = 0;
  double tol_closed = 1e-7;
  double tol_numeric = 1e-4;
};

struct Resolved {
  SystemPtr system;
  IvfPtr a;
  GridSpec grid;
  SweepOptions sweep;
};

json parse_params(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("--params is not valid JSON: ") + e.what());
  }
}

int jobs_from_env(int flag) {
  if (const char* env = std::getenv("SIMCURV_JOBS"); env && *env) {
    const double v = to_double(env, "SIMCURV_JOBS");
    if (v < 1 || v != std::floor(v)) throw InvalidArgument("SIMCURV_JOBS must be a positive integer");
    return static_cast<int>(v);
  }
  if (flag < 0) throw InvalidArgument("--jobs must be >= 0");
  return flag;
}

GraphOptions graph_options(const Common& c) {
  GraphOptions g;
  if (c.mode == "auto") g.mode = GraphMode::automatic;
  else if (c.mode == "closed") g.mode = GraphMode::closed;
  else if (c.mode == "numeric") g.mode = GraphMode::numeric;
  else throw InvalidArgument("--mode must be auto, closed or numeric");
  if (c.fd_base == "bvp") g.fd_base = FdBase::bvp;
  else if (c.fd_base == "closed") g.fd_base = FdBase::closed_p;
  else throw InvalidArgument("--fd-base must be bvp or closed");
  return g;
}

Resolved resolve(const Common& c, bool need_grid = true) {
  Resolved r;
  r.system = make_system(c.model, parse_params(c.params));
  r.a = parse_lift(r.system, c.a);
  if (need_grid) r.grid = GridSpec::parse(c.grid);
  r.sweep.route = parse_route(c.route);
  r.sweep.graph = graph_options(c);
  r.sweep.jobs = jobs_from_env(c.jobs);
  if (!(c.tol_closed > 0.0) || !(c.tol_numeric > 0.0))
    throw InvalidArgument("tolerances must be > 0");
  return r;
}

json point_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json manifest(const std::string& command, const Common& c, const Resolved& r,
              const std::vector<std::string>& argv) {
  json params = json::object();
  for (const auto& [k, v] : r.system->params()) params[k] = v;
  const auto& bvp = r.sweep.graph.bvp;
  return {{"tool", "simcurv"},
          {"version", std::string(kToolVersion)},
          {"command", command},
          {"model", {{"model", r.system->name()}, {"params", params}}},
          {"a", c.a},
          {"grid", r.grid.axes.empty() ? json(nullptr) : json(r.grid.to_string())},
          {"route", std::string(route_name(r.sweep.route))},
          {"mode", c.mode},
          {"fd_base", c.fd_base},
          {"tolerances",
           {{"tol_closed", c.tol_closed},
            {"tol_numeric", c.tol_numeric},
            {"integrator_rtol", bvp.integrator.rtol},
            {"integrator_atol", bvp.integrator.atol},
            {"bvp_tol", bvp.tol}}},
          {"jobs", resolve_jobs(r.sweep.jobs)},
          {"argv", argv}};
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw InvalidArgument("--out is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InvalidArgument("cannot create output directory " + out);
  return dir;
}

json summary_json(const std::vector<NodeResult>& nodes) {
  const SweepSummary s = summarize(nodes);
  json argmax = nullptr;
  double best = -1.0;
  for (const auto& nd : nodes) {
    const double v = nd.K.cwiseAbs().maxCoeff();
    if (v > best) {
      best = v;
      argmax = point_json(nd.point);
    }
  }
  return {{"node_count", s.node_count}, {"max_abs_K", s.max_abs_K},  {"mean_abs_K", s.mean_abs_K},
          {"mean_abs_K2", s.mean_abs_K2}, {"argmax", argmax},       {"failures", json::array()}};
}

// Runs the sweep; on failure removes stale data, records the failure and rethrows.
std::vector<NodeResult> guarded_sweep(const Resolved& r, const std::optional<fs::path>& dir,
                                      const std::string& csv_name) {
  try {
    return curvature_sweep(r.system, r.a, r.grid, r.sweep);
  } catch (const Error& e) {
    if (dir) {
      std::error_code ec;
      fs::remove(*dir / csv_name, ec);
      json s = {{"node_count", r.grid.node_count()}, {"failures", json::array({e.what()})}};
      write_text_file(*dir / "summary.json", dump_json(s));
    }
    throw;
  }
}

int cmd_list_models(bool as_json, std::ostream& out) {
  if (as_json) {
    json j = json::array();
    for (const auto& m : list_models()) {
      json d = json::object();
      for (const auto& [k, v] : m.defaults) d[k] = v;
      j.push_back({{"name", m.name}, {"k", m.slow_dim}, {"m", m.fast_dim}, {"defaults", d},
                   {"summary", m.summary}});
    }
    out << dump_json(j);
    return kExitOk;
  }
  for (const auto& m : list_models()) {
    out << m.name << "  (" << m.slow_dim << "," << m.fast_dim << ")  ";
    bool first = true;
    for (const auto& [k, v] : m.defaults) {
      out << (first ? "" : " ") << k << "=" << format_double(v);
      first = false;
    }
    out << "  " << m.summary << "\n";
  }
  return kExitOk;
}

int cmd_curvature_grid(const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  const Resolved r = resolve(c);
  const fs::path dir = prepare_out(c.out);
  write_text_file(dir / "manifest.json", dump_json(manifest("curvature-grid", c, r, argv)));
  const auto nodes = guarded_sweep(r, dir, "curvature.csv");
  write_text_file(dir / "curvature.csv", curvature_csv(nodes, r.system->slow_dim(), r.system->fast_dim(),
                                                       route_name(r.sweep.route)));
  const json s = summary_json(nodes);
  write_text_file(dir / "summary.json", dump_json(s));
  out << "nodes " << s["node_count"].get<std::size_t>() << "  max|K| "
      << format_double(s["max_abs_K"].get<double>()) << "  mean|K| "
      << format_double(s["mean_abs_K"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_validate(const Common& c, const std::vector<std::string>& argv, std::ostream& out) {
  const Resolved r = resolve(c);
  std::optional<fs::path> dir;
  if (!c.out.empty()) {
    dir = prepare_out(c.out);
    write_text_file(*dir / "manifest.json", dump_json(manifest("validate-necessary", c, r, argv)));
  }
  const auto nodes = guarded_sweep(r, dir, "curvature.csv");

  bool all_closed = true;
  for (const auto& nd : nodes) all_closed = all_closed && nd.source == GraphSource::closed_form;
  const double tol = all_closed ? c.tol_closed : c.tol_numeric;

  json s = summary_json(nodes);
  const double max_k = s["max_abs_K"].get<double>();
  const bool pass = max_k <= tol;
  s["tolerance"] = tol;
  s["tolerance_kind"] = all_closed ? "closed" : "numeric";
  s["pass"] = pass;
  if (dir) {
    write_text_file(*dir / "curvature.csv", curvature_csv(nodes, r.system->slow_dim(),
                                                          r.system->fast_dim(), route_name(r.sweep.route)));
    write_text_file(*dir / "summary.json", dump_json(s));
  }

  out << (pass ? "PASS" : "FAIL") << "  max|K| " << format_double(max_k) << (pass ? " <= " : " > ")
      << format_double(tol) << " (" << s["tolerance_kind"].get<std::string>() << ")";
  if (!pass) {
    for (const auto& nd : nodes)
      if (nd.K.cwiseAbs().maxCoeff() == max_k) {
        out << "  at (";
        for (Eigen::Index i = 0; i < nd.point.size(); ++i) out << (i ? ", " : "") << format_double(nd.point[i]);
        out << ") K = (";
        for (Eigen::Index i = 0; i < nd.K.size(); ++i) out << (i ? ", " : "") << format_double(nd.K[i]);
        out << ")";
        break;
      }
  }
  out << "\n";
  return pass ? kExitOk : kExitValidationFailed;
}

int cmd_integral(Common c, const std::string& orders_text, const std::vector<std::string>& argv,
                 std::ostream& out) {
  std::vector<int> orders;
  for (double v : to_doubles(orders_text, "--orders")) {
    if (v != std::floor(v) || v < 0 || v > kMaxAsymptoticOrder)
      throw InvalidArgument("--orders entries must be integers in [0, 8]");
    orders.push_back(static_cast<int>(v));
  }
  c.a = "asym:" + std::to_string(orders.front());
  Resolved r = resolve(c);
  const fs::path dir = prepare_out(c.out);
  json m = manifest("integral", c, r, argv);
  m["a"] = "asym:k";
  m["orders"] = orders;
  write_text_file(dir / "manifest.json", dump_json(m));

  std::string csv = "k,I\n";
  std::vector<double> values;
  for (int k : orders) {
    r.a = asymptotic_lift(r.system, k);
    const auto nodes = guarded_sweep(r, dir, "integral.csv");
    const double I = summarize(nodes).mean_abs_K2;
    values.push_back(I);
    csv += std::to_string(k) + "," + format_double(I) + "\n";
    out << "I[a_" << k << "] = " << format_double(I) << "\n";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  write_text_file(dir / "integral.csv", csv);
  write_text_file(dir / "summary.json",
                  dump_json({{"orders", orders}, {"values", values}, {"strictly_decreasing", decreasing},
                             {"failures", json::array()}}));
  out << "strictly decreasing: " << (decreasing ? "yes" : "no") << "\n";
  return kExitOk;
}

struct CriteriaArgs {
  double u = 2.0;
  double k1 = 1.0;
  std::optional<double> k2;
  std::string c_range = "-0.05:0.05";
  int samples = 201;
};

int cmd_criteria(const Common& c, const CriteriaArgs& ca, const std::vector<std::string>& argv,
                 std::ostream& out) {
  Resolved r;
  r.system = make_system(c.model, parse_params(c.params));
  const auto colon = ca.c_range.find(':');
  if (colon == std::string::npos) throw InvalidArgument("--c-range must be c0:c1");
  const double c0 = to_double(ca.c_range.substr(0, colon), "--c-range");
  const double c1 = to_double(ca.c_range.substr(colon + 1), "--c-range");
  double k2 = 0.0;
  if (ca.k2) {
    k2 = *ca.k2;
  } else {
    const auto& p = r.system->params();
    if (!p.contains("gamma")) throw InvalidArgument("--k2 is required for models without gamma");
    k2 = p.find("gamma")->second / (ca.u + 1.0);
  }
  const auto rows = criteria_sweep(r.system, ca.u, ca.k1, k2, c0, c1, ca.samples);

  const fs::path dir = prepare_out(c.out);
  json m = manifest("criteria-sweep", c, r, argv);
  m.erase("a");
  m.erase("grid");
  m.erase("route");
  m["criteria"] = {{"u", ca.u}, {"k1", ca.k1}, {"k2", k2}, {"c_range", {c0, c1}}, {"samples", ca.samples}};
  write_text_file(dir / "manifest.json", dump_json(m));

  std::string csv = "c,F1,F2,F3\n";
  for (const auto& row : rows)
    csv += format_double(row.c) + "," + format_double(row.F1) + "," + format_double(row.F2) + "," +
           format_double(row.F3) + "\n";
  write_text_file(dir / "criteria.csv", csv);

  json mins = json::array();
  out << "criterion  c_closed  c_numeric  F(c_min)  F''\n";
  for (auto kind : {CriterionKind::F1_squared_graph_curvature, CriterionKind::F2_jacobian_weighted_field,
                    CriterionKind::F3_energy}) {
    const CriterionSpec spec{kind, ca.u, ca.k1, k2, r.system};
    const Minimizer mn = minimize_criterion(spec);
    mins.push_back({{"criterion", std::string(criterion_name(kind))},
                    {"c_closed", mn.c_closed ? json(*mn.c_closed) : json(nullptr)},
                    {"c_numeric", mn.c_numeric},
                    {"c_min", mn.c_min},
                    {"value", mn.value},
                    {"second_derivative", mn.second_derivative}});
    out << criterion_name(kind) << "  " << (mn.c_closed ? format_double(*mn.c_closed) : "-") << "  "
        << format_double(mn.c_numeric) << "  " << format_double(mn.value) << "  "
        << format_double(mn.second_derivative) << "\n";
  }
  write_text_file(dir / "minimizers.json", dump_json(mins));
  return kExitOk;
}

void add_model_options(CLI::App* sub, Common& c) {
  sub->add_option("--model", c.model, "Model name (see list-models)")->required();
  sub->add_option("--params", c.params, "Model parameters as a JSON object");
}

void add_grid_options(CLI::App* sub, Common& c, bool out_required) {
  add_model_options(sub, c);
  sub->add_option("--a", c.a, "Lift: h_eps | h0 | asym:K | family:c=v[,v] | const:v[,v]");
  sub->add_option("--grid", c.grid, "Grid, e.g. t=0:2:10,x1=0:3:20")->required();
  sub->add_option("--route", c.route, "Curvature route: gauss | christoffel | closed11");
  sub->add_option("--mode", c.mode, "Partials of p: auto | closed | numeric");
  sub->add_option("--fd-base", c.fd_base, "Numeric mode differences over: bvp | closed");
  auto* o = sub->add_option("--out", c.out, "Output directory");
  if (out_required) o->required();
  sub->add_option("--jobs", c.jobs, "Worker threads (0: all)");
  sub->add_option("--tol-closed", c.tol_closed, "Tolerance for closed-form nodes");
  sub->add_option("--tol-numeric", c.tol_numeric, "Tolerance for shooting-based nodes");
}

}  // namespace

IvfPtr parse_lift(const SystemPtr& system, std::string_view spec) {
  auto need = [&](IvfPtr p, const char* what) {
    if (!p) throw Unsupported(system->name() + " has no " + what);
    return p;
  };
  if (spec == "h_eps") return need(system->slow_manifold(), "slow manifold");
  if (spec == "h0") return need(system->critical_manifold(), "critical manifold");
  if (spec.starts_with("asym:")) {
    const double k = to_double(spec.substr(5), "--a");
    if (k != std::floor(k)) throw InvalidArgument("asym order must be an integer");
    return asymptotic_lift(system, static_cast<int>(k));
  }
  if (spec == "family" || spec.starts_with("family:")) {
    std::vector<double> values;
    if (spec.size() > 7) {
      auto body = spec.substr(7);
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) body = body.substr(eq + 1);
      values = to_doubles(body, "--a");
    } else {
      values.assign(system->family_parameter_count(), 0.0);
    }
    return system->invariant_family(values);
  }
  if (spec.starts_with("const:")) {
    auto values = to_doubles(spec.substr(6), "--a");
    if (values.size() == 1 && system->fast_dim() > 1) values.assign(system->fast_dim(), values.front());
    if (static_cast<int>(values.size()) != system->fast_dim())
      throw InvalidArgument("const lift needs " + std::to_string(system->fast_dim()) + " values");
    return constant_ivf(system->slow_dim(), values);
  }
  throw InvalidArgument("unknown lift '" + std::string(spec) + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-sectional curvature of phase-space-time graphs of slow-fast systems", "simcurv"};
  app.footer(kToleranceLedger);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common c;
  bool as_json = false;
  std::string orders = "0,1,2,3,4,5";
  CriteriaArgs ca;
  double k2_value = 0.0;

  auto* list = app.add_subcommand("list-models", "List registered models and default parameters");
  list->add_flag("--json", as_json, "JSON output");

  auto* grid = app.add_subcommand("curvature-grid", "Curvature field over a grid (CSV + summary)");
  add_grid_options(grid, c, true);

  auto* validate = app.add_subcommand("validate-necessary", "Check max|K| against the route tolerance");
  add_grid_options(validate, c, false);

  auto* integral = app.add_subcommand("integral", "Curvature integral of asymptotic lifts a_k");
  add_model_options(integral, c);
  integral->add_option("--grid", c.grid, "Grid, e.g. t=0:2:10,x1=0:3:20")->required();
  integral->add_option("--orders", orders, "Comma-separated orders k");
  integral->add_option("--route", c.route, "Curvature route");
  integral->add_option("--out", c.out, "Output directory")->required();
  integral->add_option("--jobs", c.jobs, "Worker threads (0: all)");

  auto* crit = app.add_subcommand("criteria-sweep", "Criteria F1, F2, F3 over the invariant family");
  c.model = "davis_skodje";
  crit->add_option("--model", c.model, "Model name");
  crit->add_option("--params", c.params, "Model parameters as a JSON object");
  crit->add_option("--u", ca.u, "Slow coordinate u");
  crit->add_option("--k1", ca.k1, "F3 weight k1");
  auto* k2_opt = crit->add_option("--k2", k2_value, "F3 weight k2 (default gamma/(u+1))");
  crit->add_option("--c-range", ca.c_range, "c0:c1");
  crit->add_option("--samples", ca.samples, "Number of c samples");
  crit->add_option("--out", c.out, "Output directory")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (list->parsed()) return cmd_list_models(as_json, out);
    if (grid->parsed()) return cmd_curvature_grid(c, args, out);
    if (validate->parsed()) return cmd_validate(c, args, out);
    if (integral->parsed()) return cmd_integral(c, orders, args, out);
    if (crit->parsed()) {
      if (k2_opt->count() > 0) ca.k2 = k2_value;
      return cmd_criteria(c, ca, args, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitBadInput;
}

}  // namespace simcurv
