#include "simcurv/system.hpp"

#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {

SlowFastSystem::SlowFastSystem(std::string name, int k, int m, ParamMap params,
                               TimeConvention convention)
    : name_(std::move(name)), k_(k), m_(m), params_(std::move(params)), convention_(convention) {
  if (k_ < 1 || m_ < 1) throw InvalidArgument("slow-fast system needs k >= 1 and m >= 1");
}

double SlowFastSystem::param(std::string_view key) const {
  auto it = params_.find(key);
  if (it == params_.end())
    throw InvalidArgument(name_ + ": no parameter '" + std::string(key) + "'");
  return it->second;
}

namespace {

void check_state(const SlowFastSystem& s, const Vector& state) {
  if (state.size() != s.dim()) {
    std::ostringstream msg;
    msg << s.name() << ": state has dimension " << state.size() << ", expected " << s.dim();
    throw InvalidArgument(msg.str());
  }
  if (!state.allFinite()) throw InvalidArgument(s.name() + ": state is not finite");
}

}  // namespace

Vector SlowFastSystem::rhs(const Vector& state) const {
  check_state(*this, state);
  Vector out(dim());
  rhs_into(state.data(), out.data());
  return out;
}

Matrix SlowFastSystem::rhs_jacobian(const Vector& state) const {
  check_state(*this, state);
  Matrix out = Matrix::Zero(dim(), dim());
  jacobian_into(state.data(), out);
  return out;
}

void SlowFastSystem::p_closed(double, std::span<const double>, const InitialValueFunction&,
                              std::span<double>) const {
  throw Unsupported(name_ + ": no closed-form parameterization");
}

void SlowFastSystem::p_closed(const Taylor&, std::span<const Taylor>, const InitialValueFunction&,
                              std::span<Taylor>) const {
  throw Unsupported(name_ + ": no closed-form parameterization");
}

Vector SlowFastSystem::flow_constants(const Vector&) const {
  throw Unsupported(name_ + ": no closed-form flow solution");
}

Vector SlowFastSystem::flow_solution(const Vector&, double) const {
  throw Unsupported(name_ + ": no closed-form flow solution");
}

IvfPtr SlowFastSystem::invariant_family(std::span<const double>) const {
  throw Unsupported(name_ + ": no published invariant family");
}

std::optional<AffineSplit> SlowFastSystem::affine_split(std::span<const Taylor>) const {
  return std::nullopt;
}

InitialValueFunction::InitialValueFunction(int k, int m, Kind kind, std::string description,
                                           int order, std::vector<double> free)
    : k_(k), m_(m), kind_(kind), order_(order), free_(std::move(free)),
      description_(std::move(description)) {
  if (k_ < 1 || m_ < 1) throw InvalidArgument("initial value function needs k, m >= 1");
}

void InitialValueFunction::eval(std::span<const double> u, std::span<double> out) const {
  const auto series = expand(u, 0);
  for (int r = 0; r < m_; ++r) out[r] = series[r].value();
}

Vector InitialValueFunction::operator()(const Vector& u) const {
  if (u.size() != k_) throw InvalidArgument("initial value function: argument dimension mismatch");
  Vector out(m_);
  eval(std::span<const double>(u.data(), k_), std::span<double>(out.data(), m_));
  return out;
}

Matrix InitialValueFunction::jacobian(const Vector& u) const {
  if (u.size() != k_) throw InvalidArgument("initial value function: argument dimension mismatch");
  const auto series = expand(std::span<const double>(u.data(), k_), 1);
  Matrix jac(m_, k_);
  std::vector<int> e(k_, 0);
  for (int r = 0; r < m_; ++r) {
    for (int s = 0; s < k_; ++s) {
      e.assign(k_, 0);
      e[s] = 1;
      jac(r, s) = series[r].coefficient(e);
    }
  }
  return jac;
}

std::vector<Taylor> InitialValueFunction::eval(std::span<const Taylor> u) const {
  if (static_cast<int>(u.size()) != k_)
    throw InvalidArgument("initial value function: argument dimension mismatch");
  std::vector<double> u0(k_);
  for (int s = 0; s < k_; ++s) u0[s] = u[s].value();
  const auto outer = expand(u0, u.front().degree());
  return compose(outer, u);
}

IvfPtr constant_ivf(int k, std::vector<double> value) {
  const int m = static_cast<int>(value.size());
  std::ostringstream desc;
  desc << "const:";
  for (int r = 0; r < m; ++r) desc << (r ? "," : "") << value[r];
  return make_closed_ivf(k, m, desc.str(), [value](auto u, auto out) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = 0.0 * u[0] + value[r];
  });
}

Vector invariance_residual(const SlowFastSystem& system, const InitialValueFunction& a,
                           const Vector& x) {
  const int k = system.slow_dim();
  const int m = system.fast_dim();
  if (x.size() != k || a.slow_dim() != k || a.fast_dim() != m)
    throw InvalidArgument("invariance_residual: dimension mismatch");
  Vector state(k + m);
  state.head(k) = x;
  state.tail(m) = a(x);
  const Vector f = system.rhs(state);
  Vector r = a.jacobian(x) * f.head(k) - f.tail(m);
  if (system.time_convention() == TimeConvention::slow_time) r *= system.epsilon();
  return r;
}

}  // namespace simcurv
