#include "simcurv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("integrator: rtol and atol must be > 0");
  if (!(h_min > 0.0)) throw InvalidArgument("integrator: h_min must be > 0");
  if (max_steps < 1) throw InvalidArgument("integrator: max_steps must be >= 1");
}

Vector Trajectory::dense_eval(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    std::ostringstream msg;
    msg << "dense_eval: t = " << t << " outside [" << times_.front() << ", " << times_.back() << "]";
    throw InvalidArgument(msg.str());
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto idx = static_cast<std::size_t>(it - times_.begin());
  if (idx < times_.size() && times_[idx] == t) return states_[idx];
  const std::size_t step = idx - 1;
  const double h = times_[step + 1] - times_[step];
  const double th = (t - times_[step]) / h;
  const double th1 = 1.0 - th;
  const Matrix& r = dense_[step];
  return states_[step] + th * (r.col(0) + th1 * (r.col(1) + th * (r.col(2) + th1 * r.col(3))));
}

class Dopri5Stepper {
 public:
  Dopri5Stepper(const RhsFunction& rhs, int n, const IntegratorConfig& cfg)
      : rhs_(rhs), n_(n), cfg_(cfg),
        k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), k7_(n), ytmp_(n), ynew_(n), err_(n) {}

  Trajectory run(const Vector& y0, double t0, double t1) {
    Trajectory traj;
    traj.times_.push_back(t0);
    traj.states_.push_back(y0);
    if (t1 == t0) return traj;

    Vector y = y0;
    double t = t0;
    eval(t, y, k1_);
    double h = cfg_.h_init > 0.0 ? cfg_.h_init : initial_step(t, y, t1);
    bool last_rejected = false;
    long steps = 0;

    while (t < t1) {
      if (++steps > cfg_.max_steps) {
        std::ostringstream msg;
        msg << "integrator: exceeded max_steps = " << cfg_.max_steps << " at t = " << t;
        throw NumericalFailure(msg.str());
      }
      if (h < cfg_.h_min) {
        std::ostringstream msg;
        msg << "integrator: step size " << h << " fell below h_min = " << cfg_.h_min << " at t = " << t
            << " (problem too stiff for the explicit pair; reduce t* or the eps range)";
        throw NumericalFailure(msg.str());
      }
      const bool final_step = t + h >= t1 || (t1 - (t + h)) < 1e-12 * std::max(1.0, std::abs(t1));
      const double hs = final_step ? t1 - t : h;

      step(t, y, hs);
      const double err = error_norm(y);
      if (err <= 1.0) {
        store(traj, t, y, hs);
        t = final_step ? t1 : t + hs;
        y = ynew_;
        traj.times_.push_back(t);
        traj.states_.push_back(y);
        k1_ = k7_;
        double fac = err == 0.0 ? kFacMax : std::clamp(kSafety * std::pow(err, -0.2), kFacMin, kFacMax);
        if (last_rejected) fac = std::min(fac, 1.0);
        h = hs * fac;
        last_rejected = false;
      } else {
        ++traj.rejected_;
        h = hs * std::max(kFacMin, kSafety * std::pow(err, -0.2));
        last_rejected = true;
      }
    }
    return traj;
  }

 private:
  void eval(double t, const Vector& y, Vector& dy) {
    rhs_(t, y.data(), dy.data());
    if (!dy.allFinite()) {
      std::ostringstream msg;
      msg << "integrator: right-hand side is not finite at t = " << t;
      throw NumericalFailure(msg.str());
    }
  }

  double initial_step(double t, const Vector& y, double t1) {
    const Vector sk = (cfg_.atol + cfg_.rtol * y.array().abs()).matrix();
    const double dnf = std::sqrt((k1_.array() / sk.array()).square().mean());
    const double dny = std::sqrt((y.array() / sk.array()).square().mean());
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h0 = std::min(h0, t1 - t);
    ytmp_ = y + h0 * k1_;
    eval(t + h0, ytmp_, k2_);
    const double der2 = std::sqrt(((k2_ - k1_).array() / sk.array()).square().mean()) / h0;
    const double der12 = std::max(der2, dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h0, h1, t1 - t});
  }

  void step(double t, const Vector& y, double h) {
    ytmp_ = y + h * a21 * k1_;
    eval(t + c2 * h, ytmp_, k2_);
    ytmp_ = y + h * (a31 * k1_ + a32 * k2_);
    eval(t + c3 * h, ytmp_, k3_);
    ytmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    eval(t + c4 * h, ytmp_, k4_);
    ytmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    eval(t + c5 * h, ytmp_, k5_);
    ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    eval(t + h, ytmp_, k6_);
    ynew_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    eval(t + h, ynew_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
  }

  double error_norm(const Vector& y) const {
    const auto sc = cfg_.atol + cfg_.rtol * y.array().abs().max(ynew_.array().abs());
    const double e = std::sqrt((err_.array() / sc).square().mean());
    return std::isfinite(e) ? e : 1e10;
  }

  void store(Trajectory& traj, double, const Vector& y, double h) {
    Matrix r(n_, 4);
    r.col(0) = ynew_ - y;
    r.col(1) = h * k1_ - r.col(0);
    r.col(2) = r.col(0) - h * k7_ - r.col(1);
    r.col(3) = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
    traj.dense_.push_back(std::move(r));
  }

  const RhsFunction& rhs_;
  int n_;
  IntegratorConfig cfg_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, err_;
};

Trajectory integrate(const RhsFunction& rhs, const Vector& y0, double t0, double t1,
                     const IntegratorConfig& config) {
  config.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0)
    throw InvalidArgument("integrate: need finite t0 <= t1");
  if (!y0.allFinite()) throw InvalidArgument("integrate: initial state is not finite");
  Dopri5Stepper stepper(rhs, static_cast<int>(y0.size()), config);
  return stepper.run(y0, t0, t1);
}

Trajectory integrate(const SlowFastSystem& system, const Vector& state0, double t0, double t1,
                     const IntegratorConfig& config) {
  if (state0.size() != system.dim())
    throw InvalidArgument(system.name() + ": initial state has the wrong dimension");
  const RhsFunction rhs = [&system](double, const double* y, double* dy) { system.rhs_into(y, dy); };
  return integrate(rhs, state0, t0, t1, config);
}

}  // namespace simcurv
