#include "simcurv/criteria.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"
#include "simcurv/sweep.hpp"

namespace simcurv {
namespace {

bool is_davis_skodje(const SlowFastSystem& s) { return s.name() == "davis_skodje"; }

}  // namespace

std::string_view criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::F1_squared_graph_curvature: return "F1";
    case CriterionKind::F2_jacobian_weighted_field: return "F2";
    case CriterionKind::F3_energy: return "F3";
  }
  return "F1";
}

void CriterionSpec::validate() const {
  if (!model) throw InvalidArgument("criterion: model is required");
  if (model->slow_dim() != 1 || model->fast_dim() != 1)
    throw Unsupported(model->name() + ": criteria are defined for (1,1) models");
  if (model->family_parameter_count() != 1)
    throw Unsupported(model->name() + ": criteria need a one-parameter invariant family");
  if (!std::isfinite(u) || !std::isfinite(k1) || !std::isfinite(k2))
    throw InvalidArgument("criterion: u, k1, k2 must be finite");
}

double eval_criterion(const CriterionSpec& spec, double c) {
  spec.validate();
  const double cs[1] = {c};
  const IvfPtr a = spec.model->invariant_family(cs);
  const double us[1] = {spec.u};
  const Taylor jet = a->expand(us, 2)[0];
  Vector state(2);
  state << spec.u, jet.value();
  switch (spec.kind) {
    case CriterionKind::F1_squared_graph_curvature: {
      const int e[1] = {2};
      const double a2 = jet.derivative_value(e);
      return a2 * a2;
    }
    case CriterionKind::F2_jacobian_weighted_field:
      return (spec.model->rhs_jacobian(state) * spec.model->rhs(state)).squaredNorm();
    case CriterionKind::F3_energy:
      return spec.k1 * spec.model->rhs(state).squaredNorm() - spec.k2 * state.squaredNorm();
  }
  return 0.0;
}

double ds_c_min_f1(double gamma, double u) {
  return 2.0 / (std::pow(u + 1.0, 3) * gamma * (gamma - 1.0) * std::pow(u, gamma - 2.0));
}

double ds_c_min_f2(double gamma, double u) {
  return u * (u - 1.0) / (std::pow(u, gamma) * gamma * gamma * (u * u * u + 3 * u * u + 3 * u + 1));
}

double ds_c_min_f3(double gamma, double u, double k1, double k2) {
  const double g2 = gamma * gamma;
  return -(gamma * k1 - u * k2 - k2) * u /
         ((g2 * u * u * k1 + 2 * g2 * u * k1 + g2 * k1 - u * u * k2 - 2 * u * k2 - k2) *
          std::pow(u, gamma));
}

double ds_f1_second_derivative(double gamma, double u) {
  const double v = gamma * (gamma - 1.0) * std::pow(u, gamma - 2.0);
  return 2.0 * v * v;
}

double ds_f2_second_derivative(double gamma, double u) {
  const double v = std::pow(u, gamma) * gamma * gamma;
  return 2.0 * v * v;
}

double ds_f3_second_derivative(double gamma, double u, double k1, double k2) {
  return 2.0 * std::pow(u, 2.0 * gamma) * (k1 * gamma * gamma - k2);
}

Minimizer minimize_criterion(const CriterionSpec& spec, double agreement_tol) {
  spec.validate();
  Minimizer out;
  auto F = [&spec](double c) { return eval_criterion(spec, c); };

  const double fm = F(-1.0), f0 = F(0.0), fp = F(1.0);
  out.second_derivative = fp - 2.0 * f0 + fm;
  if (!(out.second_derivative > 0.0)) {
    std::ostringstream msg;
    msg << criterion_name(spec.kind) << " at u = " << spec.u << " has F'' = " << out.second_derivative
        << " (no minimum)";
    throw NumericalFailure(msg.str());
  }

  std::uintmax_t iters = 1000;
  const auto res = boost::math::tools::brent_find_minima(F, -1.0, 1.0,
                                                         std::numeric_limits<double>::digits - 1, iters);
  out.c_numeric = res.first;
  // Brent stops near sqrt(eps); finish with parabolic steps
  for (int pass = 0; pass < 2; ++pass) {
    const double c = out.c_numeric, h = 0.05;
    const double lo = F(c - h), mid = F(c), hi = F(c + h);
    const double curv = hi - 2.0 * mid + lo;
    if (!(curv > 0.0)) break;
    const double next = c - 0.5 * h * (hi - lo) / curv;
    if (!std::isfinite(next) || std::abs(next - c) > h) break;
    out.c_numeric = next;
  }

  if (is_davis_skodje(*spec.model)) {
    const double gamma = spec.model->param("gamma");
    switch (spec.kind) {
      case CriterionKind::F1_squared_graph_curvature:
        out.c_closed = ds_c_min_f1(gamma, spec.u);
        out.second_derivative_closed = ds_f1_second_derivative(gamma, spec.u);
        break;
      case CriterionKind::F2_jacobian_weighted_field:
        out.c_closed = ds_c_min_f2(gamma, spec.u);
        out.second_derivative_closed = ds_f2_second_derivative(gamma, spec.u);
        break;
      case CriterionKind::F3_energy:
        out.c_closed = ds_c_min_f3(gamma, spec.u, spec.k1, spec.k2);
        out.second_derivative_closed = ds_f3_second_derivative(gamma, spec.u, spec.k1, spec.k2);
        break;
    }
  }
  if (out.c_closed && std::abs(*out.c_closed - out.c_numeric) > agreement_tol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << criterion_name(spec.kind) << ": closed-form minimizer " << *out.c_closed
        << " and numeric minimizer " << out.c_numeric << " disagree";
    throw NumericalFailure(msg.str());
  }
  out.c_min = out.c_closed.value_or(out.c_numeric);
  out.value = F(out.c_min);
  return out;
}

std::vector<CriteriaRow> criteria_sweep(const SystemPtr& model, double u, double k1, double k2,
                                        double c0, double c1, int samples) {
  if (samples < 1) throw InvalidArgument("criteria sweep: samples must be >= 1");
  if (!std::isfinite(c0) || !std::isfinite(c1) || (samples > 1 && !(c1 > c0)))
    throw InvalidArgument("criteria sweep: need a finite range c0 < c1");
  CriterionSpec s1{CriterionKind::F1_squared_graph_curvature, u, k1, k2, model};
  CriterionSpec s2 = s1, s3 = s1;
  s2.kind = CriterionKind::F2_jacobian_weighted_field;
  s3.kind = CriterionKind::F3_energy;
  std::vector<CriteriaRow> rows;
  rows.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double c = samples == 1 ? c0
                     : i == samples - 1 ? c1
                                        : c0 + (c1 - c0) * static_cast<double>(i) / (samples - 1);
    rows.push_back({c, eval_criterion(s1, c), eval_criterion(s2, c), eval_criterion(s3, c)});
  }
  return rows;
}

CharacterizationReport sufficient_characterization_check(const SystemPtr& model,
                                                         const GridSpec& grid,
                                                         const std::vector<double>& u_samples,
                                                         const std::vector<double>& c_values,
                                                         double k_tol) {
  if (!model || !is_davis_skodje(*model))
    throw Unsupported("sufficient characterization is implemented for davis_skodje");
  const double gamma = model->param("gamma");
  CharacterizationReport rep;
  auto flag = [&rep](const std::string& s) {
    rep.passed = false;
    rep.violations.push_back(s);
  };

  auto max_k = [&](double c) {
    const double cs[1] = {c};
    return summarize(curvature_sweep(model, model->invariant_family(cs), grid, {})).max_abs_K;
  };

  rep.max_abs_K_slow = max_k(0.0);
  if (rep.max_abs_K_slow > k_tol) flag("c = 0 member is not K-flat");
  for (double c : c_values) {
    const double k = max_k(c);
    rep.c_flat.push_back(c);
    rep.max_abs_K_flat.push_back(k);
    if (k > k_tol) {
      std::ostringstream s;
      s << "c = " << c << " member is not K-flat (max |K| = " << k << ")";
      flag(s.str());
    }
  }

  for (double u : u_samples) {
    if (u == 0.0) continue;
    CriterionSpec spec{CriterionKind::F3_energy, u, 1.0, gamma / (u + 1.0), model};
    const Minimizer mn = minimize_criterion(spec);
    if (std::abs(mn.c_min) > 1e-10) {
      std::ostringstream s;
      s << "u = " << u << ": F3 minimizer " << mn.c_min << " != 0";
      flag(s.str());
    }
    const double f0 = eval_criterion(spec, 0.0);
    for (double c : c_values) {
      if (c == 0.0) continue;
      if (!(eval_criterion(spec, c) > f0)) {
        std::ostringstream s;
        s << "u = " << u << ": F3(" << c << ") <= F3(0)";
        flag(s.str());
      }
    }
  }
  return rep;
}

}  // namespace simcurv
