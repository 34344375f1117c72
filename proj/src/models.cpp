#include "simcurv/models.hpp"

#include <cmath>
#include <sstream>

#include "simcurv/asymptotic.hpp"
#include "simcurv/error.hpp"

namespace simcurv {
namespace {

void lift(const InitialValueFunction& a, std::span<const double> u, std::span<double> out) {
  a.eval(u, out);
}

void lift(const InitialValueFunction& a, std::span<const Taylor> u, std::span<Taylor> out) {
  auto r = a.eval(u);
  std::copy(r.begin(), r.end(), out.begin());
}

void check_lift(const SlowFastSystem& s, const InitialValueFunction& a) {
  if (a.slow_dim() != s.slow_dim() || a.fast_dim() != s.fast_dim())
    throw InvalidArgument(s.name() + ": initial value function has the wrong dimensions");
}

std::string fmt_params(const ParamMap& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : p) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

void require(bool ok, const std::string& model, const std::string& what, const ParamMap& p) {
  if (!ok) throw InvalidArgument(model + ": parameters out of range (" + what + "; got " + fmt_params(p) + ")");
}

// ---------------------------------------------------------------------------
// Davis-Skodje

class DavisSkodje final : public SlowFastSystem {
 public:
  explicit DavisSkodje(double gamma)
      : SlowFastSystem("davis_skodje", 1, 1, {{"gamma", gamma}}, TimeConvention::slow_time),
        gamma_(gamma) {
    require(std::isfinite(gamma) && gamma > 1.0, name(), "gamma > 1", params());
  }

  double epsilon() const override { return 1.0 / gamma_; }

  void rhs_into(const double* s, double* out) const override {
    const double x = s[0], y = s[1];
    out[0] = -x;
    out[1] = -gamma_ * y + ((gamma_ - 1.0) * x + gamma_ * x * x) / ((1.0 + x) * (1.0 + x));
  }

  IvfPtr critical_manifold() const override { return slow_manifold(); }
  IvfPtr slow_manifold() const override {
    return make_closed_ivf(1, 1, "h_eps: x/(x+1)", [](auto u, auto out) { out[0] = u[0] / (u[0] + 1.0); });
  }

  bool has_closed_parameterization() const override { return true; }
  void p_closed(double t, std::span<const double> x, const InitialValueFunction& a,
                std::span<double> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }
  void p_closed(const Taylor& t, std::span<const Taylor> x, const InitialValueFunction& a,
                std::span<Taylor> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }

  bool has_flow_solution() const override { return true; }
  Vector flow_constants(const Vector& s) const override {
    Vector c(2);
    c << s[0], s[1] - s[0] / (s[0] + 1.0);
    return c;
  }
  Vector flow_solution(const Vector& c, double t) const override {
    Vector s(2);
    s << c[0] * std::exp(-t), c[1] * std::exp(-gamma_ * t) + c[0] / (c[0] + std::exp(t));
    return s;
  }

  int family_parameter_count() const override { return 1; }
  IvfPtr invariant_family(std::span<const double> free) const override {
    if (free.size() != 1) throw InvalidArgument("davis_skodje family takes one constant c");
    const double c = free[0];
    const double g = gamma_;
    std::ostringstream d;
    d << "family: u/(u+1) + c u^gamma, c=" << c;
    return make_closed_ivf(
        1, 1, d.str(),
        [c, g](auto u, auto out) {
          using std::pow;
          out[0] = u[0] / (u[0] + 1.0);
          if (c != 0.0) out[0] += c * pow(u[0], g);
        },
        InitialValueFunction::Kind::invariant_family, {c});
  }

  bool slow_state_defined(std::span<const double> x) const override { return x[0] > -1.0; }

 protected:
  void jacobian_into(const double* s, Matrix& J) const override {
    const double x = s[0];
    J(0, 0) = -1.0;
    J(0, 1) = 0.0;
    J(1, 0) = ((gamma_ - 1.0) + (gamma_ + 1.0) * x) / std::pow(1.0 + x, 3);
    J(1, 1) = -gamma_;
  }

 private:
  template <class S>
  void p_impl(const S& t, std::span<const S> x, const InitialValueFunction& a, std::span<S> out) const {
    using std::exp;
    const S u = x[0] * exp(t);
    S au[1] = {u};
    lift(a, std::span<const S>(&u, 1), std::span<S>(au, 1));
    out[0] = au[0] * exp(-gamma_ * t) - x[0] * exp((1.0 - gamma_) * t) / (u + 1.0) + x[0] / (x[0] + 1.0);
  }

  double gamma_;
};

// ---------------------------------------------------------------------------
// (1,1) nonlinear model

class KuehnNonlinear final : public SlowFastSystem {
 public:
  explicit KuehnNonlinear(double eps)
      : SlowFastSystem("kuehn_nonlinear", 1, 1, {{"eps", eps}}, TimeConvention::fast_time), eps_(eps) {
    require(std::isfinite(eps) && eps > 0.0 && eps < 0.5, name(), "0 < eps < 1/2", params());
  }

  double epsilon() const override { return eps_; }

  void rhs_into(const double* s, double* out) const override {
    out[0] = -eps_ * s[0];
    out[1] = s[0] * s[0] - s[1];
  }

  IvfPtr critical_manifold() const override {
    return make_closed_ivf(1, 1, "h0: x^2", [](auto u, auto out) { out[0] = u[0] * u[0]; });
  }
  IvfPtr slow_manifold() const override {
    const double d = 1.0 - 2.0 * eps_;
    return make_closed_ivf(1, 1, "h_eps: x^2/(1-2eps)", [d](auto u, auto out) { out[0] = u[0] * u[0] / d; });
  }

  bool has_closed_parameterization() const override { return true; }
  void p_closed(double t, std::span<const double> x, const InitialValueFunction& a,
                std::span<double> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }
  void p_closed(const Taylor& t, std::span<const Taylor> x, const InitialValueFunction& a,
                std::span<Taylor> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }

  bool has_flow_solution() const override { return true; }
  Vector flow_constants(const Vector& s) const override { return s; }
  Vector flow_solution(const Vector& c, double t) const override {
    const double d = 1.0 - 2.0 * eps_;
    const double q = c[0] * c[0] / d;
    Vector s(2);
    s << c[0] * std::exp(-eps_ * t), (c[1] - q) * std::exp(-t) + q * std::exp(-2.0 * eps_ * t);
    return s;
  }

  int family_parameter_count() const override { return 1; }
  IvfPtr invariant_family(std::span<const double> free) const override {
    if (free.size() != 1) throw InvalidArgument("kuehn_nonlinear family takes one constant c");
    const double c = free[0];
    const double d = 1.0 - 2.0 * eps_;
    const double r = 1.0 / eps_;
    std::ostringstream desc;
    desc << "family: u^2/(1-2eps) + c u^(1/eps), c=" << c;
    return make_closed_ivf(
        1, 1, desc.str(),
        [c, d, r](auto u, auto out) {
          using std::pow;
          out[0] = u[0] * u[0] / d;
          if (c != 0.0) out[0] += c * pow(u[0], r);
        },
        InitialValueFunction::Kind::invariant_family, {c});
  }

  std::optional<AffineSplit> affine_split(std::span<const Taylor> x) const override {
    const Taylor& x0 = x[0];
    AffineSplit s;
    s.f0 = {-x0};
    s.F1 = {{Taylor::constant_like(x0, 0.0)}};
    s.g0 = {x0 * x0};
    s.G1 = {{Taylor::constant_like(x0, -1.0)}};
    return s;
  }

 protected:
  void jacobian_into(const double* s, Matrix& J) const override {
    J(0, 0) = -eps_;
    J(0, 1) = 0.0;
    J(1, 0) = 2.0 * s[0];
    J(1, 1) = -1.0;
  }

 private:
  template <class S>
  void p_impl(const S& t, std::span<const S> x, const InitialValueFunction& a, std::span<S> out) const {
    using std::exp;
    const double d = 1.0 - 2.0 * eps_;
    const S u = x[0] * exp(eps_ * t);
    S au[1] = {u};
    lift(a, std::span<const S>(&u, 1), std::span<S>(au, 1));
    const S x2 = x[0] * x[0];
    out[0] = au[0] * exp(-t) - x2 * exp((2.0 * eps_ - 1.0) * t) / d + x2 / d;
  }

  double eps_;
};

// ---------------------------------------------------------------------------
// Enzyme kinetics (no closed-form flow)

class EnzymeMmh final : public SlowFastSystem {
 public:
  EnzymeMmh(double lambda, double kappa, double eps)
      : SlowFastSystem("enzyme_mmh", 1, 1, {{"eps", eps}, {"kappa", kappa}, {"lambda", lambda}},
                       TimeConvention::fast_time),
        lambda_(lambda), kappa_(kappa), eps_(eps) {
    require(std::isfinite(lambda) && std::isfinite(kappa) && std::isfinite(eps), name(),
            "finite parameters", params());
    require(kappa > lambda && lambda > 0.0, name(), "kappa > lambda > 0", params());
    require(eps > 0.0, name(), "eps > 0", params());
  }

  double epsilon() const override { return eps_; }

  void rhs_into(const double* s, double* out) const override {
    const double x = s[0], y = s[1];
    out[0] = eps_ * (-x + (x + kappa_ - lambda_) * y);
    out[1] = x - (x + kappa_) * y;
  }

  IvfPtr critical_manifold() const override {
    const double kap = kappa_;
    return make_closed_ivf(1, 1, "h0: x/(x+kappa)", [kap](auto u, auto out) { out[0] = u[0] / (u[0] + kap); });
  }
  IvfPtr slow_manifold() const override {
    return asymptotic_lift(shared_from_this(), kEnzymeSlowManifoldOrder);
  }

  std::optional<AffineSplit> affine_split(std::span<const Taylor> x) const override {
    const Taylor& x0 = x[0];
    AffineSplit s;
    s.f0 = {-x0};
    s.F1 = {{x0 + (kappa_ - lambda_)}};
    s.g0 = {x0};
    s.G1 = {{-(x0 + kappa_)}};
    return s;
  }

  // The lifts x/(x+kappa) and its expansion terms have a pole at x = -kappa.
  bool slow_state_defined(std::span<const double> x) const override { return x[0] + kappa_ > 0.0; }
  bool slow_state_physical(std::span<const double> x) const override { return x[0] >= 0.0; }

 protected:
  void jacobian_into(const double* s, Matrix& J) const override {
    const double x = s[0], y = s[1];
    J(0, 0) = eps_ * (-1.0 + y);
    J(0, 1) = eps_ * (x + kappa_ - lambda_);
    J(1, 0) = 1.0 - y;
    J(1, 1) = -(x + kappa_);
  }

 private:
  double lambda_;
  double kappa_;
  double eps_;
};

// ---------------------------------------------------------------------------
// (2,1) model

class Ds21 final : public SlowFastSystem {
 public:
  explicit Ds21(double gamma)
      : SlowFastSystem("ds_2_1", 2, 1, {{"gamma", gamma}}, TimeConvention::slow_time), gamma_(gamma) {
    require(std::isfinite(gamma) && gamma > 2.0, name(), "gamma > 2", params());
  }

  double epsilon() const override { return 1.0 / gamma_; }

  void rhs_into(const double* s, double* out) const override {
    const double x1 = s[0], x2 = s[1], y = s[2];
    const double g = gamma_;
    out[0] = -x1;
    out[1] = -2.0 * x2;
    out[2] = -g * y + ((g - 1.0) * x1 + g * x1 * x1) / ((1.0 + x1) * (1.0 + x1)) +
             (2.0 * (g - 2.0) * x2 + 2.0 * g * x2 * x2) / ((1.0 + x2) * (1.0 + x2));
  }

  IvfPtr critical_manifold() const override { return slow_manifold(); }
  IvfPtr slow_manifold() const override {
    return make_closed_ivf(2, 1, "h_eps: (x1+2x2+3x1x2)/((1+x1)(1+x2))", [](auto u, auto out) {
      out[0] = (u[0] + 2.0 * u[1] + 3.0 * u[0] * u[1]) / ((1.0 + u[0]) * (1.0 + u[1]));
    });
  }

  bool has_closed_parameterization() const override { return true; }
  void p_closed(double t, std::span<const double> x, const InitialValueFunction& a,
                std::span<double> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }
  void p_closed(const Taylor& t, std::span<const Taylor> x, const InitialValueFunction& a,
                std::span<Taylor> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }

  bool has_flow_solution() const override { return true; }
  Vector flow_constants(const Vector& s) const override {
    Vector c(3);
    c << s[0], s[1], s[2] - h(s[0], s[1]);
    return c;
  }
  Vector flow_solution(const Vector& c, double t) const override {
    const double x1 = c[0] * std::exp(-t);
    const double x2 = c[1] * std::exp(-2.0 * t);
    Vector s(3);
    s << x1, x2, c[2] * std::exp(-gamma_ * t) + h(x1, x2);
    return s;
  }

  int family_parameter_count() const override { return 1; }
  IvfPtr invariant_family(std::span<const double> free) const override {
    if (free.size() != 1) throw InvalidArgument("ds_2_1 family takes one constant v");
    const double v = free[0];
    const double g = gamma_;
    std::ostringstream d;
    d << "family: h_eps(u) + v u1^gamma, v=" << v;
    return make_closed_ivf(
        2, 1, d.str(),
        [v, g](auto u, auto out) {
          using std::pow;
          out[0] = (u[0] + 2.0 * u[1] + 3.0 * u[0] * u[1]) / ((1.0 + u[0]) * (1.0 + u[1]));
          if (v != 0.0) out[0] += v * pow(u[0], g);
        },
        InitialValueFunction::Kind::invariant_family, {v});
  }

  bool slow_state_defined(std::span<const double> x) const override {
    return x[0] > -1.0 && x[1] > -1.0;
  }

 protected:
  void jacobian_into(const double* s, Matrix& J) const override {
    const double x1 = s[0], x2 = s[1];
    const double g = gamma_;
    J.setZero();
    J(0, 0) = -1.0;
    J(1, 1) = -2.0;
    J(2, 0) = ((g - 1.0) + (g + 1.0) * x1) / std::pow(1.0 + x1, 3);
    J(2, 1) = (2.0 * (g - 2.0) + (2.0 * g + 4.0) * x2) / std::pow(1.0 + x2, 3);
    J(2, 2) = -g;
  }

 private:
  static double h(double x1, double x2) { return x1 / (1.0 + x1) + 2.0 * x2 / (1.0 + x2); }

  template <class S>
  void p_impl(const S& t, std::span<const S> x, const InitialValueFunction& a, std::span<S> out) const {
    using std::exp;
    const S u[2] = {x[0] * exp(t), x[1] * exp(2.0 * t)};
    S au[1] = {u[0]};
    lift(a, std::span<const S>(u, 2), std::span<S>(au, 1));
    const S shifted = au[0] - u[0] / (1.0 + u[0]) - 2.0 * u[1] / (1.0 + u[1]);
    out[0] = shifted * exp(-gamma_ * t) + x[0] / (1.0 + x[0]) + 2.0 * x[1] / (1.0 + x[1]);
  }

  double gamma_;
};

// ---------------------------------------------------------------------------
// (3,2) model

class Model32 final : public SlowFastSystem {
 public:
  explicit Model32(double eps)
      : SlowFastSystem("model_3_2", 3, 2, {{"eps", eps}}, TimeConvention::fast_time), eps_(eps) {
    require(std::isfinite(eps) && eps > 0.0 && eps < 0.5, name(), "0 < eps < 1/2", params());
  }

  double epsilon() const override { return eps_; }

  void rhs_into(const double* s, double* out) const override {
    const double x1 = s[0], x2 = s[1], x3 = s[2], y1 = s[3], y2 = s[4];
    out[0] = -eps_ * x1;
    out[1] = -2.0 * eps_ * x2;
    out[2] = -3.0 * eps_ * x3;
    out[3] = 2.0 * x1 * x1 + x2 * x2 * x3 - 4.0 * y1;
    out[4] = 3.0 * std::pow(x1, 4) + x2 * x2 * x2 - 3.0 * y2;
  }

  IvfPtr critical_manifold() const override {
    return make_closed_ivf(3, 2, "h0: (x1^2/2 + x2^2 x3/4, x1^4 + x2^3/3)", [](auto u, auto out) {
      const auto sq = u[0] * u[0];
      out[0] = 0.5 * sq + 0.25 * u[1] * u[1] * u[2];
      out[1] = sq * sq + u[1] * u[1] * u[1] / 3.0;
    });
  }
  IvfPtr slow_manifold() const override {
    const double e = eps_;
    return make_closed_ivf(3, 2, "h_eps", [e](auto u, auto out) {
      const auto sq = u[0] * u[0];
      out[0] = sq / (2.0 - e) + u[1] * u[1] * u[2] / (4.0 - 7.0 * e);
      out[1] = 3.0 * sq * sq / (3.0 - 4.0 * e) + u[1] * u[1] * u[1] / (3.0 - 6.0 * e);
    });
  }

  bool has_closed_parameterization() const override { return true; }
  void p_closed(double t, std::span<const double> x, const InitialValueFunction& a,
                std::span<double> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }
  void p_closed(const Taylor& t, std::span<const Taylor> x, const InitialValueFunction& a,
                std::span<Taylor> out) const override {
    check_lift(*this, a);
    p_impl(t, x, a, out);
  }

  bool has_flow_solution() const override { return true; }
  Vector flow_constants(const Vector& s) const override {
    const double e = eps_;
    Vector c(5);
    c.head(3) = s.head(3);
    c[3] = s[3] - s[0] * s[0] / (2.0 - e) - s[1] * s[1] * s[2] / (4.0 - 7.0 * e);
    c[4] = s[4] - 3.0 * std::pow(s[0], 4) / (3.0 - 4.0 * e) - std::pow(s[1], 3) / (3.0 - 6.0 * e);
    return c;
  }
  Vector flow_solution(const Vector& c, double t) const override {
    const double e = eps_;
    Vector s(5);
    s[0] = c[0] * std::exp(-e * t);
    s[1] = c[1] * std::exp(-2.0 * e * t);
    s[2] = c[2] * std::exp(-3.0 * e * t);
    s[3] = c[3] * std::exp(-4.0 * t) + c[0] * c[0] / (2.0 - e) * std::exp(-2.0 * e * t) +
           c[1] * c[1] * c[2] / (4.0 - 7.0 * e) * std::exp(-7.0 * e * t);
    s[4] = c[4] * std::exp(-3.0 * t) + 3.0 * std::pow(c[0], 4) / (3.0 - 4.0 * e) * std::exp(-4.0 * e * t) +
           std::pow(c[1], 3) / (3.0 - 6.0 * e) * std::exp(-6.0 * e * t);
    return s;
  }

  // Free functions v1, v2 of the published family restricted to constants.
  int family_parameter_count() const override { return 2; }
  IvfPtr invariant_family(std::span<const double> free) const override {
    if (free.size() != 2) throw InvalidArgument("model_3_2 family takes two constants v1, v2");
    const double v1 = free[0], v2 = free[1];
    const double e = eps_;
    std::ostringstream d;
    d << "family: h_eps(u) + (v1 u1^(4/eps), v2 u1^(3/eps)), v1=" << v1 << ", v2=" << v2;
    return make_closed_ivf(
        3, 2, d.str(),
        [v1, v2, e](auto u, auto out) {
          using std::pow;
          const auto sq = u[0] * u[0];
          out[0] = sq / (2.0 - e) + u[1] * u[1] * u[2] / (4.0 - 7.0 * e);
          out[1] = 3.0 * sq * sq / (3.0 - 4.0 * e) + u[1] * u[1] * u[1] / (3.0 - 6.0 * e);
          if (v1 != 0.0) out[0] += v1 * pow(u[0], 4.0 / e);
          if (v2 != 0.0) out[1] += v2 * pow(u[0], 3.0 / e);
        },
        InitialValueFunction::Kind::invariant_family, {v1, v2});
  }

  std::optional<AffineSplit> affine_split(std::span<const Taylor> x) const override {
    const Taylor zero = Taylor::constant_like(x[0], 0.0);
    AffineSplit s;
    s.f0 = {-x[0], -2.0 * x[1], -3.0 * x[2]};
    s.F1.assign(3, std::vector<Taylor>(2, zero));
    const Taylor sq = x[0] * x[0];
    s.g0 = {2.0 * sq + x[1] * x[1] * x[2], 3.0 * sq * sq + x[1] * x[1] * x[1]};
    s.G1 = {{Taylor::constant_like(zero, -4.0), zero}, {zero, Taylor::constant_like(zero, -3.0)}};
    return s;
  }

 protected:
  void jacobian_into(const double* s, Matrix& J) const override {
    const double x1 = s[0], x2 = s[1], x3 = s[2];
    J.setZero();
    J(0, 0) = -eps_;
    J(1, 1) = -2.0 * eps_;
    J(2, 2) = -3.0 * eps_;
    J(3, 0) = 4.0 * x1;
    J(3, 1) = 2.0 * x2 * x3;
    J(3, 2) = x2 * x2;
    J(3, 3) = -4.0;
    J(4, 0) = 12.0 * x1 * x1 * x1;
    J(4, 1) = 3.0 * x2 * x2;
    J(4, 4) = -3.0;
  }

 private:
  template <class S>
  void p_impl(const S& t, std::span<const S> x, const InitialValueFunction& a, std::span<S> out) const {
    using std::exp;
    const double e = eps_;
    const S u[3] = {x[0] * exp(e * t), x[1] * exp(2.0 * e * t), x[2] * exp(3.0 * e * t)};
    S au[2] = {u[0], u[0]};
    lift(a, std::span<const S>(u, 3), std::span<S>(au, 2));
    const S x1sq = x[0] * x[0];
    const S x2sqx3 = x[1] * x[1] * x[2];
    const S x1p4 = x1sq * x1sq;
    const S x2p3 = x[1] * x[1] * x[1];
    const S s1 = au[0] - x1sq * exp(2.0 * e * t) / (2.0 - e) - x2sqx3 * exp(7.0 * e * t) / (4.0 - 7.0 * e);
    const S s2 = au[1] - 3.0 * x1p4 * exp(4.0 * e * t) / (3.0 - 4.0 * e) - x2p3 * exp(6.0 * e * t) / (3.0 - 6.0 * e);
    out[0] = s1 * exp(-4.0 * t) + x1sq / (2.0 - e) + x2sqx3 / (4.0 - 7.0 * e);
    out[1] = s2 * exp(-3.0 * t) + 3.0 * x1p4 / (3.0 - 4.0 * e) + x2p3 / (3.0 - 6.0 * e);
  }

  double eps_;
};

}  // namespace

SystemPtr make_davis_skodje(double gamma) { return std::make_shared<DavisSkodje>(gamma); }
SystemPtr make_kuehn_nonlinear(double eps) { return std::make_shared<KuehnNonlinear>(eps); }
SystemPtr make_enzyme_mmh(double lambda, double kappa, double eps) {
  return std::make_shared<EnzymeMmh>(lambda, kappa, eps);
}
SystemPtr make_ds_2_1(double gamma) { return std::make_shared<Ds21>(gamma); }
SystemPtr make_model_3_2(double eps) { return std::make_shared<Model32>(eps); }

}  // namespace simcurv
