#pragma once

// Truncated multivariate Taylor polynomials.
//
// A Taylor value holds the coefficients c_alpha of
//     f(x0 + d) = sum_{|alpha| <= D} c_alpha d^alpha
// in a fixed number of variables, truncated at total degree D. Arithmetic and
// elementary functions propagate the truncation exactly, so evaluating a
// closed-form expression on Taylor arguments yields its partial derivatives
// up to order D at x0 (partial^alpha f = alpha! c_alpha).

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace simcurv {

namespace detail {
struct MonomialTable;
}

class Taylor {
 public:
  Taylor() = default;
  Taylor(int nvars, int degree, double value = 0.0);

  /// The coordinate function x_index expanded about `value`.
  static Taylor variable(int nvars, int degree, int index, double value);
  /// A constant with the same shape as `like`.
  static Taylor constant_like(const Taylor& like, double value);

  int nvars() const;
  int degree() const;
  bool empty() const { return c_.empty(); }
  double value() const { return c_.front(); }

  std::size_t size() const { return c_.size(); }
  std::span<const double> coefficients() const { return c_; }
  double coefficient(std::span<const int> exponents) const;
  void set_coefficient(std::span<const int> exponents, double v);
  /// partial^alpha f(x0) for the multi-index alpha.
  double derivative_value(std::span<const int> exponents) const;
  /// Exponent vector of the i-th stored monomial.
  std::span<const int> exponents(std::size_t i) const;

  /// d/dx_var of the polynomial. The top-degree coefficients of the result
  /// are zero, i.e. the result is exact only up to degree D-1.
  Taylor derivative(int var) const;
  /// Same polynomial with every coefficient of degree > d zeroed.
  Taylor truncated(int d) const;

  Taylor operator-() const;
  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(const Taylor& o);
  Taylor& operator/=(const Taylor& o);
  Taylor& operator+=(double s);
  Taylor& operator-=(double s);
  Taylor& operator*=(double s);
  Taylor& operator/=(double s);

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(const Taylor& a, const Taylor& b);
  friend Taylor operator/(const Taylor& a, const Taylor& b);
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator+(double s, Taylor a) { return a += s; }
  friend Taylor operator-(Taylor a, double s) { return a -= s; }
  friend Taylor operator-(double s, const Taylor& a) { return (-a) += s; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator/(Taylor a, double s) { return a /= s; }
  friend Taylor operator/(double s, const Taylor& a);

 private:
  void require_same_shape(const Taylor& o) const;

  std::shared_ptr<const detail::MonomialTable> table_;
  std::vector<double> c_;
};

/// sum_j coeffs[j] (u - u(x0))^j, i.e. a scalar function with Taylor
/// coefficients `coeffs` at u(x0) composed with u.
Taylor compose_scalar(const Taylor& u, std::span<const double> coeffs);

Taylor exp(const Taylor& u);
Taylor log(const Taylor& u);
Taylor sqrt(const Taylor& u);
Taylor pow(const Taylor& u, int n);
/// Real power. At u(x0) == 0 the result is defined only when every derivative
/// up to the truncation degree vanishes (r > D) or r is a non-negative integer.
Taylor pow(const Taylor& u, double r);

/// Composes outer expansions with inner Taylor arguments.
///
/// `outer[r]` is the expansion of the r-th output of some map R^k -> R^m about
/// the point (inner[0].value(), ..., inner[k-1].value()), given in k variables.
/// Returns the outputs as Taylor polynomials in the variables of `inner`.
std::vector<Taylor> compose(std::span<const Taylor> outer, std::span<const Taylor> inner);

/// Identity variables x_i expanded about `point`, all of the given degree.
std::vector<Taylor> make_variables(std::span<const double> point, int degree);

}  // namespace simcurv
