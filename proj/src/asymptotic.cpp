#include "simcurv/asymptotic.hpp"

#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

// Solves A h = b for small m by Gaussian elimination with partial pivoting on
// the constant terms.
std::vector<Taylor> solve_small(std::vector<std::vector<Taylor>> A, std::vector<Taylor> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(A[r][col].value()) > std::abs(A[piv][col].value())) piv = r;
    if (A[piv][col].value() == 0.0)
      throw NumericalFailure("asymptotic expansion: fast Jacobian block is singular");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const Taylor factor = A[r][col] / A[col][col];
      for (std::size_t c = col; c < m; ++c) A[r][c] -= factor * A[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Taylor> h(m);
  for (std::size_t i = m; i-- > 0;) {
    Taylor acc = b[i];
    for (std::size_t c = i + 1; c < m; ++c) acc -= A[i][c] * h[c];
    h[i] = acc / A[i][i];
  }
  return h;
}

// h_0..h_order at u0, each exact up to `degree`.
std::vector<std::vector<Taylor>> coefficient_series(const SlowFastSystem& system,
                                                    std::span<const double> u0, int order,
                                                    int degree) {
  const int k = system.slow_dim();
  const int m = system.fast_dim();
  const auto x = make_variables(u0, degree + order);
  auto split = system.affine_split(x);
  if (!split) throw Unsupported(system.name() + ": fast right-hand side is not in affine fast-time form");

  std::vector<std::vector<Taylor>> h;
  std::vector<std::vector<Taylor>> f;  // f_j = coefficient of eps^j in f(x, h_eps(x))
  h.reserve(order + 1);

  std::vector<Taylor> rhs(m);
  for (int r = 0; r < m; ++r) rhs[r] = -split->g0[r];
  h.push_back(solve_small(split->G1, rhs));

  auto slow_coefficient = [&](const std::vector<Taylor>& hj, bool with_f0) {
    std::vector<Taylor> out(k);
    for (int s = 0; s < k; ++s) {
      Taylor acc = with_f0 ? split->f0[s] : Taylor::constant_like(x.front(), 0.0);
      for (int r = 0; r < m; ++r) acc += split->F1[s][r] * hj[r];
      out[s] = std::move(acc);
    }
    return out;
  };
  f.push_back(slow_coefficient(h[0], true));

  for (int l = 1; l <= order; ++l) {
    for (int r = 0; r < m; ++r) {
      Taylor acc = Taylor::constant_like(x.front(), 0.0);
      for (int i = 0; i < l; ++i) {
        const auto& fj = f[l - 1 - i];
        for (int s = 0; s < k; ++s) acc += h[i][r].derivative(s) * fj[s];
      }
      rhs[r] = std::move(acc);
    }
    h.push_back(solve_small(split->G1, rhs));
    if (l < order) f.push_back(slow_coefficient(h[l], false));
  }
  return h;
}

Taylor reshape(const Taylor& src, int degree) {
  Taylor out(src.nvars(), degree, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto e = out.exponents(i);
    out.set_coefficient(e, src.coefficient(e));
  }
  return out;
}

class AsymptoticLift final : public InitialValueFunction {
 public:
  // index < 0: the truncated sum a_order; otherwise the single coefficient h_index.
  AsymptoticLift(SystemPtr system, int order, int index, std::string description)
      : InitialValueFunction(system->slow_dim(), system->fast_dim(), Kind::asymptotic_truncation,
                             std::move(description), index < 0 ? order : index),
        system_(std::move(system)), order_(order), index_(index) {}

  std::vector<Taylor> expand(std::span<const double> u0, int degree) const override {
    if (static_cast<int>(u0.size()) != slow_dim())
      throw InvalidArgument("asymptotic lift: argument dimension mismatch");
    const int upto = index_ < 0 ? order_ : index_;
    const auto h = coefficient_series(*system_, u0, upto, degree);
    std::vector<Taylor> out;
    out.reserve(fast_dim());
    if (index_ >= 0) {
      for (const Taylor& c : h[index_]) out.push_back(reshape(c, degree));
      return out;
    }
    const double eps = system_->epsilon();
    for (int r = 0; r < fast_dim(); ++r) {
      // Horner in eps
      Taylor acc = h[upto][r];
      for (int l = upto - 1; l >= 0; --l) {
        acc *= eps;
        acc += h[l][r];
      }
      out.push_back(reshape(acc, degree));
    }
    return out;
  }

 private:
  SystemPtr system_;
  int order_;
  int index_;
};

void check_request(const SystemPtr& system, int order) {
  if (!system) throw InvalidArgument("asymptotic expansion: null system");
  if (order < 0 || order > kMaxAsymptoticOrder) {
    std::ostringstream msg;
    msg << "asymptotic expansion: order " << order << " outside [0, " << kMaxAsymptoticOrder << "]";
    throw InvalidArgument(msg.str());
  }
  const std::vector<double> probe(system->slow_dim(), 0.0);
  if (!system->affine_split(make_variables(probe, 0)))
    throw Unsupported(system->name() + ": fast right-hand side is not in affine fast-time form");
}

}  // namespace

std::vector<IvfPtr> asymptotic_coefficients(const SystemPtr& system, int order) {
  check_request(system, order);
  std::vector<IvfPtr> out;
  for (int l = 0; l <= order; ++l)
    out.push_back(std::make_shared<AsymptoticLift>(system, order, l, "h_" + std::to_string(l)));
  return out;
}

IvfPtr asymptotic_lift(const SystemPtr& system, int order) {
  check_request(system, order);
  return std::make_shared<AsymptoticLift>(system, order, -1, "asym:" + std::to_string(order));
}

}  // namespace simcurv
