#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simcurv/taylor.hpp"

namespace simcurv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ParamMap = std::map<std::string, double, std::less<>>;

class InitialValueFunction;
using IvfPtr = std::shared_ptr<const InitialValueFunction>;

/// On which side the time-scale parameter sits in the published equations.
/// fast_time: x' = eps f(x, y), y' = g(x, y).  slow_time: x' = f, y' = g / eps
/// (possibly written with gamma = 1/eps inside g).
enum class TimeConvention { fast_time, slow_time };

/// Pieces of a right-hand side that is affine in the fast variables, in the
/// fast-time form x' = eps (f0 + F1 y), y' = g0 + G1 y, expanded as Taylor
/// polynomials in the slow variables.
struct AffineSplit {
  std::vector<Taylor> f0;               // k
  std::vector<std::vector<Taylor>> F1;  // k x m
  std::vector<Taylor> g0;               // m
  std::vector<std::vector<Taylor>> G1;  // m x m
};

/// A (k, m)-(slow, fast) ODE system.
///
/// State vectors are ordered (x_1..x_k, y_1..y_m). Instances are immutable.
/// Optional closed-form artifacts (critical manifold, slow manifold, closed
/// parameterization of the phase-space-time graph, flow solution, invariant
/// family) are exposed through virtual hooks; the defaults report absence.
class SlowFastSystem : public std::enable_shared_from_this<SlowFastSystem> {
 public:
  virtual ~SlowFastSystem() = default;

  const std::string& name() const { return name_; }
  int slow_dim() const { return k_; }
  int fast_dim() const { return m_; }
  int dim() const { return k_ + m_; }
  const ParamMap& params() const { return params_; }
  double param(std::string_view key) const;
  TimeConvention time_convention() const { return convention_; }
  /// The time-scale separation parameter eps (1/gamma for gamma models).
  virtual double epsilon() const = 0;

  Vector rhs(const Vector& state) const;
  Matrix rhs_jacobian(const Vector& state) const;
  /// Unchecked fast path used by integrators.
  virtual void rhs_into(const double* state, double* out) const = 0;

  // Analytic artifacts.
  virtual IvfPtr critical_manifold() const { return nullptr; }
  virtual IvfPtr slow_manifold() const { return nullptr; }

  virtual bool has_closed_parameterization() const { return false; }
  /// p(t, x; a) from the closed-form flow; throws Unsupported by default.
  virtual void p_closed(double t, std::span<const double> x, const InitialValueFunction& a,
                        std::span<double> out) const;
  virtual void p_closed(const Taylor& t, std::span<const Taylor> x,
                        const InitialValueFunction& a, std::span<Taylor> out) const;

  virtual bool has_flow_solution() const { return false; }
  /// Integration constants c_1.. of the closed-form solution through state0 at t = 0.
  virtual Vector flow_constants(const Vector& state0) const;
  virtual Vector flow_solution(const Vector& constants, double t) const;

  /// Number of free constants of the published invariant family (0: none).
  virtual int family_parameter_count() const { return 0; }
  virtual IvfPtr invariant_family(std::span<const double> free_params) const;

  /// Affine-in-y structure needed by asymptotic_coefficients; nullopt when the
  /// model does not have the fast-time affine form.
  virtual std::optional<AffineSplit> affine_split(std::span<const Taylor> x) const;

  /// Hard domain of the slow variables (where the model and its lifts are
  /// defined). Leaving it is an error for the shooting solver.
  virtual bool slow_state_defined(std::span<const double> /*x*/) const { return true; }
  /// Physically meaningful slow states (e.g. non-negative concentrations).
  /// Leaving it is reported, not treated as an error.
  virtual bool slow_state_physical(std::span<const double> /*x*/) const { return true; }

 protected:
  SlowFastSystem(std::string name, int k, int m, ParamMap params, TimeConvention convention);
  virtual void jacobian_into(const double* state, Matrix& out) const = 0;

 private:
  std::string name_;
  int k_;
  int m_;
  ParamMap params_;
  TimeConvention convention_;
};

using SystemPtr = std::shared_ptr<const SlowFastSystem>;

/// The lift a: R^k -> R^m coupling x(0) and y(0).
///
/// Every implementation provides truncated Taylor expansions about a point;
/// plain values and Jacobians are the degree-0 and degree-1 cases.
class InitialValueFunction {
 public:
  enum class Kind { closed_form, asymptotic_truncation, invariant_family };

  virtual ~InitialValueFunction() = default;

  int slow_dim() const { return k_; }
  int fast_dim() const { return m_; }
  Kind kind() const { return kind_; }
  /// Truncation order for asymptotic lifts, else 0.
  int order() const { return order_; }
  /// Free parameters for family members, else empty.
  const std::vector<double>& free_parameters() const { return free_; }
  const std::string& description() const { return description_; }

  /// m polynomials in k variables about u0, truncated at `degree`.
  virtual std::vector<Taylor> expand(std::span<const double> u0, int degree) const = 0;
  virtual void eval(std::span<const double> u, std::span<double> out) const;

  Vector operator()(const Vector& u) const;
  /// m x k Jacobian Da(u).
  Matrix jacobian(const Vector& u) const;
  /// a evaluated on Taylor arguments (chain rule through `expand`).
  std::vector<Taylor> eval(std::span<const Taylor> u) const;

 protected:
  InitialValueFunction(int k, int m, Kind kind, std::string description, int order = 0,
                       std::vector<double> free = {});

 private:
  int k_;
  int m_;
  Kind kind_;
  int order_;
  std::vector<double> free_;
  std::string description_;
};

/// Lift defined by a generic callable usable with both double and Taylor
/// scalars: fn(std::span<const S> u, std::span<S> out).
template <class Fn>
class ClosedFormIvf final : public InitialValueFunction {
 public:
  ClosedFormIvf(int k, int m, Kind kind, std::string description, Fn fn,
                std::vector<double> free = {})
      : InitialValueFunction(k, m, kind, std::move(description), 0, std::move(free)),
        fn_(std::move(fn)) {}

  std::vector<Taylor> expand(std::span<const double> u0, int degree) const override {
    const auto vars = make_variables(u0, degree);
    std::vector<Taylor> out(fast_dim(), Taylor::constant_like(vars.front(), 0.0));
    fn_(std::span<const Taylor>(vars), std::span<Taylor>(out));
    return out;
  }

  void eval(std::span<const double> u, std::span<double> out) const override {
    fn_(u, out);
  }

 private:
  Fn fn_;
};

template <class Fn>
IvfPtr make_closed_ivf(int k, int m, std::string description, Fn fn,
                       InitialValueFunction::Kind kind = InitialValueFunction::Kind::closed_form,
                       std::vector<double> free = {}) {
  return std::make_shared<ClosedFormIvf<Fn>>(k, m, kind, std::move(description), std::move(fn),
                                             std::move(free));
}

/// a(u) = v (constant lift).
IvfPtr constant_ivf(int k, std::vector<double> value);

/// Invariance-equation residual of the graph y = a(x) at x:
/// eps Da(x) f(x, a(x)) - g(x, a(x)) in the eq. form x' = f, eps y' = g,
/// computed from the published right-hand side of `system`.
Vector invariance_residual(const SlowFastSystem& system, const InitialValueFunction& a,
                           const Vector& x);

}  // namespace simcurv
