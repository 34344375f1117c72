#pragma once

#include <functional>
#include <vector>

#include "simcurv/system.hpp"

namespace simcurv {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // <= 0 selects the starting step automatically
  double h_min = 1e-12;
  long max_steps = 1'000'000;

  void validate() const;
};

/// Accepted steps of an integration plus the continuous extension of each step.
class Trajectory {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector>& states() const { return states_; }
  std::size_t size() const { return times_.size(); }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const Vector& final_state() const { return states_.back(); }
  /// Number of rejected steps during the integration.
  long rejected_steps() const { return rejected_; }

  /// State at t in [t_begin, t_end]; returns the stored node exactly when t is a node.
  Vector dense_eval(double t) const;

 private:
  friend class Dopri5Stepper;
  std::vector<double> times_;
  std::vector<Vector> states_;
  // Per step: columns (y1-y0, h k1 - (y1-y0), (y1-y0) - h k7 - col1, h sum d_i k_i).
  std::vector<Matrix> dense_;
  long rejected_ = 0;
};

/// y' = rhs(t, y) written into dy; arrays have the dimension passed to integrate.
using RhsFunction = std::function<void(double t, const double* y, double* dy)>;

/// Dormand-Prince 5(4) with step-size control on the error model
/// atol + rtol |y| (RMS norm), step rejection, and the 4th-order continuous
/// extension for dense output. Integrates forward on [t0, t1], t1 >= t0.
///
/// Throws NumericalFailure on step underflow below h_min, when max_steps is
/// exceeded, or when the right-hand side produces non-finite values.
Trajectory integrate(const RhsFunction& rhs, const Vector& y0, double t0, double t1,
                     const IntegratorConfig& config = {});

/// Flow map of a slow-fast system.
Trajectory integrate(const SlowFastSystem& system, const Vector& state0, double t0, double t1,
                     const IntegratorConfig& config = {});

}  // namespace simcurv
