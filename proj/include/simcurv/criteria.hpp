#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simcurv/grid.hpp"
#include "simcurv/system.hpp"

namespace simcurv {

enum class CriterionKind { F1_squared_graph_curvature, F2_jacobian_weighted_field, F3_energy };

std::string_view criterion_name(CriterionKind kind);

/// A scalar criterion over the one-parameter invariant family a_c of a (1,1)
/// model, evaluated at the slow coordinate u.
struct CriterionSpec {
  CriterionKind kind = CriterionKind::F1_squared_graph_curvature;
  double u = 2.0;
  double k1 = 1.0;  // F3 weights
  double k2 = 0.0;
  SystemPtr model;

  void validate() const;
};

/// F1(c) = a_c''(u)^2
/// F2(c) = |J(u, a_c(u)) (f, g)^T|^2
/// F3(c) = k1 |(f, g)|^2 - k2 |(u, a_c(u))|^2
double eval_criterion(const CriterionSpec& spec, double c);

struct Minimizer {
  std::optional<double> c_closed;  // closed-form root of F'(c), when known for the model
  double c_numeric = 0.0;          // bracketing minimizer on [-1, 1]
  double c_min = 0.0;              // c_closed when present, else c_numeric
  double value = 0.0;              // F(c_min)
  double second_derivative = 0.0;  // F''(c) from the three-point quadratic fit
  std::optional<double> second_derivative_closed;
};

/// Minimizes the criterion. Throws NumericalFailure when closed form and
/// numeric minimizer disagree by more than `agreement_tol`, or when F'' <= 0.
Minimizer minimize_criterion(const CriterionSpec& spec, double agreement_tol = 1e-8);

/// Closed-form minimizers for the Davis-Skodje family a_c(u) = u/(u+1) + c u^gamma.
double ds_c_min_f1(double gamma, double u);
double ds_c_min_f2(double gamma, double u);
double ds_c_min_f3(double gamma, double u, double k1, double k2);
double ds_f1_second_derivative(double gamma, double u);
double ds_f2_second_derivative(double gamma, double u);
double ds_f3_second_derivative(double gamma, double u, double k1, double k2);

struct CriteriaRow {
  double c;
  double F1, F2, F3;
};

/// F1, F2, F3 at `samples` equidistant c in [c0, c1] (samples = 1 gives c0).
std::vector<CriteriaRow> criteria_sweep(const SystemPtr& model, double u, double k1, double k2,
                                        double c0, double c1, int samples);

struct CharacterizationReport {
  bool passed = true;
  double max_abs_K_slow = 0.0;          // c = 0 member over the grid
  std::vector<double> c_flat;           // c != 0 members tested
  std::vector<double> max_abs_K_flat;   // their max |K| over the grid
  std::vector<std::string> violations;
};

/// Checks, for the invariant family, that the c = 0 member is K-flat on the
/// grid and F3-minimal (k1 = 1, k2 = gamma/(u+1)) at each sampled u != 0, and
/// that the members c in `c_values` are K-flat but not F3-minimal.
CharacterizationReport sufficient_characterization_check(const SystemPtr& model,
                                                         const GridSpec& grid,
                                                         const std::vector<double>& u_samples,
                                                         const std::vector<double>& c_values,
                                                         double k_tol = 1e-7);

}  // namespace simcurv
