#include "simcurv/bvp.hpp"

#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

std::string describe(const BvpProblem& pb) {
  std::ostringstream s;
  s << pb.system->name() << " bvp at t* = " << pb.t_star << ", x* = (";
  for (Eigen::Index i = 0; i < pb.x_star.size(); ++i) s << (i ? ", " : "") << pb.x_star[i];
  s << ")";
  return s.str();
}

struct Shot {
  Trajectory traj;
  Vector residual;
};

class Shooter {
 public:
  Shooter(const BvpProblem& pb, const BvpConfig& cfg) : pb_(pb), cfg_(cfg) {}

  bool defined(const Vector& xi) const {
    return xi.allFinite() && pb_.system->slow_state_defined(std::span<const double>(xi.data(), xi.size()));
  }

  Shot shoot(const Vector& xi) const {
    const int k = pb_.system->slow_dim();
    const int m = pb_.system->fast_dim();
    Vector state(k + m);
    state.head(k) = xi;
    state.tail(m) = (*pb_.a)(xi);
    Shot s{flow(*pb_.system, state, pb_.t_star, cfg_.integrator), Vector()};
    s.residual = s.traj.final_state().head(k) - pb_.x_star;
    return s;
  }

  Vector backward_guess() const {
    const auto& sys = *pb_.system;
    const int k = sys.slow_dim();
    const int m = sys.fast_dim();
    const Vector y_frozen = (*pb_.a)(pb_.x_star);
    const double dir = pb_.t_star > 0.0 ? -1.0 : 1.0;
    const RhsFunction slow = [&sys, &y_frozen, k, m, dir](double, const double* x, double* dx) {
      Vector state(k + m), out(k + m);
      for (int i = 0; i < k; ++i) state[i] = x[i];
      state.tail(m) = y_frozen;
      sys.rhs_into(state.data(), out.data());
      for (int i = 0; i < k; ++i) dx[i] = dir * out[i];
    };
    return integrate(slow, pb_.x_star, 0.0, std::abs(pb_.t_star), cfg_.integrator).final_state();
  }

  Vector first_guess(InitialGuess mode) const {
    if (cfg_.initial_xi) return *cfg_.initial_xi;
    if (mode == InitialGuess::x_star) return pb_.x_star;
    try {
      Vector g = backward_guess();
      if (defined(g)) return g;
    } catch (const Error&) {
    }
    return pb_.x_star;
  }

  BvpSolution newton(Vector xi) const {
    if (!defined(xi)) xi = pb_.x_star;
    Shot cur = shoot(xi);
    double norm = cur.residual.lpNorm<Eigen::Infinity>();
    const int k = static_cast<int>(xi.size());
    int iters = 0;

    auto newton_step = [&](const Shot& at, const Vector& x) {
      Matrix J(k, k);
      for (int j = 0; j < k; ++j) {
        const double h = cfg_.fd_rel_step * std::max(1.0, std::abs(x[j]));
        Vector xp = x;
        xp[j] += h;
        J.col(j) = (shoot(xp).residual - at.residual) / h;
      }
      Vector dx = J.fullPivLu().solve(-at.residual);
      if (!dx.allFinite()) throw NumericalFailure(describe(pb_) + ": singular shooting Jacobian");
      return dx;
    };

    while (norm > cfg_.tol) {
      if (iters >= cfg_.max_iter) {
        std::ostringstream msg;
        msg << describe(pb_) << ": Newton did not converge in " << cfg_.max_iter
            << " iterations (|r| = " << norm << ")";
        throw NumericalFailure(msg.str());
      }
      const Vector dx = newton_step(cur, xi);
      double lambda = 1.0;
      bool accepted = false;
      std::string last_failure;
      for (int halving = 0; halving < 30 && !accepted; ++halving, lambda *= 0.5) {
        const Vector cand = xi + lambda * dx;
        if (!defined(cand)) {
          last_failure = "iterate left the domain of definition";
          continue;
        }
        try {
          Shot trial = shoot(cand);
          const double n = trial.residual.lpNorm<Eigen::Infinity>();
          if (n < norm) {
            xi = cand;
            cur = std::move(trial);
            norm = n;
            accepted = true;
          }
        } catch (const NumericalFailure& e) {
          last_failure = e.what();
        }
      }
      if (!accepted) {
        std::ostringstream msg;
        msg << describe(pb_) << ": line search failed (|r| = " << norm << ")";
        if (!last_failure.empty()) msg << ": " << last_failure;
        throw NumericalFailure(msg.str());
      }
      ++iters;
    }

    for (int s = 0; s < cfg_.polish_steps && norm > 0.0; ++s) {
      const Vector cand = xi + newton_step(cur, xi);
      if (!defined(cand)) break;
      Shot trial = shoot(cand);
      const double n = trial.residual.lpNorm<Eigen::Infinity>();
      if (!(n < norm)) break;
      xi = cand;
      cur = std::move(trial);
      norm = n;
    }

    BvpSolution sol;
    sol.xi0 = xi;
    sol.y_star = cur.traj.final_state().tail(pb_.system->fast_dim());
    sol.newton_iters = iters;
    sol.residual_norm = norm;
    sol.trajectory = std::move(cur.traj);
    for (const auto& st : sol.trajectory.states()) {
      if (!pb_.system->slow_state_physical(std::span<const double>(st.data(), k))) {
        sol.outside_physical_domain = true;
        break;
      }
    }
    return sol;
  }

 private:
  const BvpProblem& pb_;
  const BvpConfig& cfg_;
};

void validate(const BvpProblem& pb, const BvpConfig& cfg) {
  if (!pb.system || !pb.a) throw InvalidArgument("bvp: system and lift are required");
  if (pb.x_star.size() != pb.system->slow_dim())
    throw InvalidArgument(pb.system->name() + ": x* has the wrong dimension");
  if (pb.a->slow_dim() != pb.system->slow_dim() || pb.a->fast_dim() != pb.system->fast_dim())
    throw InvalidArgument(pb.system->name() + ": lift dimensions do not match the system");
  if (!std::isfinite(pb.t_star) || !pb.x_star.allFinite())
    throw InvalidArgument("bvp: t* and x* must be finite");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || !(cfg.fd_rel_step > 0.0))
    throw InvalidArgument("bvp: invalid solver configuration");
  if (cfg.initial_xi && cfg.initial_xi->size() != pb.x_star.size())
    throw InvalidArgument("bvp: initial guess has the wrong dimension");
}

}  // namespace

Trajectory flow(const SlowFastSystem& system, const Vector& state0, double t,
                const IntegratorConfig& config) {
  if (t >= 0.0) return integrate(system, state0, 0.0, t, config);
  if (state0.size() != system.dim())
    throw InvalidArgument(system.name() + ": initial state has the wrong dimension");
  const RhsFunction reversed = [&system](double, const double* y, double* dy) {
    system.rhs_into(y, dy);
    for (int i = 0; i < system.dim(); ++i) dy[i] = -dy[i];
  };
  return integrate(reversed, state0, 0.0, -t, config);
}

BvpSolution solve_bvp(const BvpProblem& problem, const BvpConfig& config) {
  validate(problem, config);
  if (problem.t_star == 0.0) {
    BvpSolution sol;
    sol.xi0 = problem.x_star;
    sol.y_star = (*problem.a)(problem.x_star);
    Vector state(problem.system->dim());
    state << problem.x_star, sol.y_star;
    sol.trajectory = integrate(*problem.system, state, 0.0, 0.0, config.integrator);
    sol.outside_physical_domain = !problem.system->slow_state_physical(
        std::span<const double>(problem.x_star.data(), problem.x_star.size()));
    return sol;
  }
  if (!problem.system->slow_state_defined(
          std::span<const double>(problem.x_star.data(), problem.x_star.size())))
    throw InvalidArgument(describe(problem) + ": x* outside the domain of definition");

  const Shooter shooter(problem, config);
  BvpSolution sol = shooter.newton(shooter.first_guess(config.guess));
  if (config.check_uniqueness) {
    const InitialGuess other =
        config.guess == InitialGuess::x_star ? InitialGuess::backward_slow : InitialGuess::x_star;
    BvpConfig alt = config;
    alt.initial_xi.reset();
    const Shooter second(problem, alt);
    try {
      const BvpSolution s2 = second.newton(second.first_guess(other));
      const double d = (s2.xi0 - sol.xi0).lpNorm<Eigen::Infinity>();
      sol.multiple_root_suspected = d > 1e-8 * std::max(1.0, sol.xi0.lpNorm<Eigen::Infinity>());
    } catch (const NumericalFailure&) {
    }
  }
  return sol;
}

}  // namespace simcurv
