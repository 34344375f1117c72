#pragma once

#include <optional>

#include "simcurv/ode.hpp"
#include "simcurv/system.hpp"

namespace simcurv {

/// x(t*) = x*, y(0) = a(x(0)).
struct BvpProblem {
  SystemPtr system;
  double t_star = 0.0;
  Vector x_star;
  IvfPtr a;
};

enum class InitialGuess { backward_slow, x_star };

struct BvpConfig {
  IntegratorConfig integrator{};
  double tol = 1e-10;          // on |x(t*) - x*|_inf
  int max_iter = 25;
  double fd_rel_step = 1e-7;   // Newton Jacobian step, times max(1, |xi_j|)
  InitialGuess guess = InitialGuess::backward_slow;
  std::optional<Vector> initial_xi;  // overrides `guess`
  bool check_uniqueness = false;
  // Extra Newton steps after convergence while they keep reducing the residual.
  int polish_steps = 2;
};

struct BvpSolution {
  Vector xi0;
  Vector y_star;
  Trajectory trajectory;  // on [0, |t*|]; for t* < 0 the time axis is reversed
  int newton_iters = 0;
  double residual_norm = 0.0;
  bool outside_physical_domain = false;
  bool multiple_root_suspected = false;
};

/// Single shooting over xi = x(0): integrate from (xi, a(xi)) to t*, Newton with
/// a finite-difference Jacobian and halving line search on x(t*; xi) - x*.
/// t* < 0 integrates backwards in time.
///
/// Throws NumericalFailure when Newton does not converge, an integration fails,
/// or xi leaves the model's domain of definition.
BvpSolution solve_bvp(const BvpProblem& problem, const BvpConfig& config = {});

/// Flow map Phi^t(state0) for either sign of t.
Trajectory flow(const SlowFastSystem& system, const Vector& state0, double t,
                const IntegratorConfig& config = {});

}  // namespace simcurv
