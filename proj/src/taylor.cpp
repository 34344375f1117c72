#include "simcurv/taylor.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include "simcurv/error.hpp"

namespace simcurv {
namespace detail {

struct MulTerm {
  int lhs;
  int rhs;
  int out;
};

struct DerivTerm {
  int target;  // -1 when the exponent is zero
  double factor;
};

struct MonomialTable {
  int nvars = 0;
  int degree = 0;
  std::vector<int> exps;      // size() * nvars, graded order
  std::vector<int> degrees;   // per monomial
  std::vector<int> lookup;    // dense (degree+1)^nvars -> index or -1
  std::vector<MulTerm> mul;
  std::vector<DerivTerm> deriv;  // size() * nvars

  std::size_t size() const { return degrees.size(); }

  int dense_key(std::span<const int> e) const {
    int key = 0;
    for (int v = nvars - 1; v >= 0; --v) key = key * (degree + 1) + e[v];
    return key;
  }

  int index_of(std::span<const int> e) const {
    int total = 0;
    for (int v = 0; v < nvars; ++v) {
      if (e[v] < 0) return -1;
      total += e[v];
    }
    if (total > degree) return -1;
    return lookup[dense_key(e)];
  }
};

namespace {

void enumerate(int nvars, int remaining, int var, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (var == nvars - 1) {
    cur[var] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[var] = e;
    enumerate(nvars, remaining - e, var + 1, cur, out);
  }
}

std::shared_ptr<const MonomialTable> build_table(int nvars, int degree) {
  auto t = std::make_shared<MonomialTable>();
  t->nvars = nvars;
  t->degree = degree;
  std::vector<std::vector<int>> monos;
  std::vector<int> cur(nvars, 0);
  for (int d = 0; d <= degree; ++d) enumerate(nvars, d, 0, cur, monos);

  int dense = 1;
  for (int v = 0; v < nvars; ++v) dense *= (degree + 1);
  t->lookup.assign(dense, -1);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    t->exps.insert(t->exps.end(), monos[i].begin(), monos[i].end());
    t->degrees.push_back(std::accumulate(monos[i].begin(), monos[i].end(), 0));
    t->lookup[t->dense_key(monos[i])] = static_cast<int>(i);
  }

  std::vector<int> sum(nvars);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    for (std::size_t j = 0; j < monos.size(); ++j) {
      if (t->degrees[i] + t->degrees[j] > degree) continue;
      for (int v = 0; v < nvars; ++v) sum[v] = monos[i][v] + monos[j][v];
      t->mul.push_back({static_cast<int>(i), static_cast<int>(j), t->index_of(sum)});
    }
  }

  t->deriv.resize(monos.size() * nvars);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    for (int v = 0; v < nvars; ++v) {
      DerivTerm& d = t->deriv[i * nvars + v];
      if (monos[i][v] == 0) {
        d = {-1, 0.0};
        continue;
      }
      auto lowered = monos[i];
      --lowered[v];
      d = {t->index_of(lowered), static_cast<double>(monos[i][v])};
    }
  }
  return t;
}

std::shared_ptr<const MonomialTable> table_for(int nvars, int degree) {
  thread_local std::pair<int, int> last_key{-1, -1};
  thread_local std::shared_ptr<const MonomialTable> last;
  if (last && last_key == std::pair{nvars, degree}) return last;

  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{nvars, degree}];
  if (!slot) slot = build_table(nvars, degree);
  last_key = {nvars, degree};
  last = slot;
  return slot;
}

}  // namespace
}  // namespace detail

Taylor::Taylor(int nvars, int degree, double value) {
  if (nvars < 1 || degree < 0) throw InvalidArgument("Taylor: need nvars >= 1 and degree >= 0");
  table_ = detail::table_for(nvars, degree);
  c_.assign(table_->size(), 0.0);
  c_[0] = value;
}

Taylor Taylor::variable(int nvars, int degree, int index, double value) {
  Taylor t(nvars, degree, value);
  if (index < 0 || index >= nvars) throw InvalidArgument("Taylor::variable: index out of range");
  if (degree >= 1) {
    // Graded order puts the degree-one monomials right after the constant,
    // x_0 first.
    t.c_[1 + index] = 1.0;
  }
  return t;
}

Taylor Taylor::constant_like(const Taylor& like, double value) {
  Taylor t;
  t.table_ = like.table_;
  t.c_.assign(like.c_.size(), 0.0);
  t.c_[0] = value;
  return t;
}

int Taylor::nvars() const { return table_ ? table_->nvars : 0; }
int Taylor::degree() const { return table_ ? table_->degree : -1; }

double Taylor::coefficient(std::span<const int> exponents) const {
  const int i = table_->index_of(exponents);
  return i < 0 ? 0.0 : c_[i];
}

void Taylor::set_coefficient(std::span<const int> exponents, double v) {
  const int i = table_->index_of(exponents);
  if (i < 0) throw InvalidArgument("Taylor::set_coefficient: exponent beyond truncation");
  c_[i] = v;
}

double Taylor::derivative_value(std::span<const int> exponents) const {
  double fact = 1.0;
  for (int e : exponents)
    for (int j = 2; j <= e; ++j) fact *= j;
  return fact * coefficient(exponents);
}

std::span<const int> Taylor::exponents(std::size_t i) const {
  return {table_->exps.data() + i * table_->nvars, static_cast<std::size_t>(table_->nvars)};
}

Taylor Taylor::derivative(int var) const {
  Taylor r = constant_like(*this, 0.0);
  const int n = table_->nvars;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const auto& d = table_->deriv[i * n + var];
    if (d.target >= 0) r.c_[d.target] += d.factor * c_[i];
  }
  return r;
}

Taylor Taylor::truncated(int d) const {
  Taylor r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (table_->degrees[i] > d) r.c_[i] = 0.0;
  return r;
}

void Taylor::require_same_shape(const Taylor& o) const {
  if (table_ != o.table_) throw InvalidArgument("Taylor: operands differ in variables or degree");
}

Taylor Taylor::operator-() const {
  Taylor r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

Taylor& Taylor::operator+=(const Taylor& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
  a.require_same_shape(b);
  Taylor r = Taylor::constant_like(a, 0.0);
  for (const auto& m : a.table_->mul) r.c_[m.out] += a.c_[m.lhs] * b.c_[m.rhs];
  return r;
}

Taylor& Taylor::operator*=(const Taylor& o) { return *this = *this * o; }

Taylor& Taylor::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Taylor& Taylor::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Taylor& Taylor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Taylor& Taylor::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}

namespace {

Taylor reciprocal(const Taylor& u) {
  const double u0 = u.value();
  if (u0 == 0.0) throw NumericalFailure("Taylor: division by a series with zero constant term");
  std::vector<double> coeffs(u.degree() + 1);
  double p = 1.0 / u0;
  for (int j = 0; j <= u.degree(); ++j) {
    coeffs[j] = p;
    p *= -1.0 / u0;
  }
  return compose_scalar(u, coeffs);
}

}  // namespace

Taylor operator/(const Taylor& a, const Taylor& b) { return a * reciprocal(b); }
Taylor operator/(double s, const Taylor& a) { return reciprocal(a) * s; }
Taylor& Taylor::operator/=(const Taylor& o) { return *this = *this / o; }

Taylor compose_scalar(const Taylor& u, std::span<const double> coeffs) {
  Taylor v = u;
  v -= u.value();  // zero constant term
  const int top = std::min<int>(u.degree(), static_cast<int>(coeffs.size()) - 1);
  Taylor r = Taylor::constant_like(u, coeffs[top]);
  for (int j = top - 1; j >= 0; --j) {
    r = r * v;
    r += coeffs[j];
  }
  return r;
}

Taylor exp(const Taylor& u) {
  std::vector<double> coeffs(u.degree() + 1);
  double p = std::exp(u.value());
  for (int j = 0; j <= u.degree(); ++j) {
    coeffs[j] = p;
    p /= (j + 1);
  }
  return compose_scalar(u, coeffs);
}

Taylor log(const Taylor& u) {
  const double u0 = u.value();
  if (!(u0 > 0.0)) throw NumericalFailure("Taylor: log of a non-positive value");
  std::vector<double> coeffs(u.degree() + 1);
  coeffs[0] = std::log(u0);
  double p = 1.0 / u0;
  for (int j = 1; j <= u.degree(); ++j) {
    coeffs[j] = ((j % 2 == 1) ? 1.0 : -1.0) * p / j;
    p /= u0;
  }
  return compose_scalar(u, coeffs);
}

Taylor sqrt(const Taylor& u) { return pow(u, 0.5); }

Taylor pow(const Taylor& u, int n) {
  if (n < 0) return reciprocal(pow(u, -n));
  Taylor result = Taylor::constant_like(u, 1.0);
  Taylor base = u;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Taylor pow(const Taylor& u, double r) {
  if (r == std::floor(r) && std::abs(r) < 1 << 20) return pow(u, static_cast<int>(r));
  const double u0 = u.value();
  if (u0 == 0.0) {
    // Every derivative of order <= D vanishes when r > D.
    if (r > u.degree()) return Taylor::constant_like(u, 0.0);
    throw NumericalFailure("Taylor: non-integer power is not smooth at zero to the requested order");
  }
  if (u0 < 0.0) throw NumericalFailure("Taylor: non-integer power of a negative value");
  std::vector<double> coeffs(u.degree() + 1);
  double binom = 1.0;
  for (int j = 0; j <= u.degree(); ++j) {
    coeffs[j] = binom * std::pow(u0, r - j);
    binom *= (r - j) / (j + 1);
  }
  return compose_scalar(u, coeffs);
}

std::vector<Taylor> compose(std::span<const Taylor> outer, std::span<const Taylor> inner) {
  if (outer.empty()) return {};
  const int k = outer.front().nvars();
  if (static_cast<int>(inner.size()) != k)
    throw InvalidArgument("compose: inner argument count does not match outer variables");
  const Taylor& like = inner.front();
  const int degree = like.degree();

  // powers[s][e] = (inner_s - inner_s(x0))^e
  std::vector<std::vector<Taylor>> powers(k);
  for (int s = 0; s < k; ++s) {
    Taylor v = inner[s];
    v -= v.value();
    powers[s].push_back(Taylor::constant_like(like, 1.0));
    for (int e = 1; e <= degree; ++e) powers[s].push_back(powers[s].back() * v);
  }

  std::vector<Taylor> result;
  result.reserve(outer.size());
  for (const Taylor& poly : outer) {
    Taylor acc = Taylor::constant_like(like, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const double c = poly.coefficients()[i];
      if (c == 0.0) continue;
      const auto e = poly.exponents(i);
      int total = 0;
      for (int s = 0; s < k; ++s) total += e[s];
      if (total > degree) continue;
      Taylor term = Taylor::constant_like(like, c);
      for (int s = 0; s < k; ++s)
        if (e[s] > 0) term = term * powers[s][e[s]];
      acc += term;
    }
    result.push_back(std::move(acc));
  }
  return result;
}

std::vector<Taylor> make_variables(std::span<const double> point, int degree) {
  const int n = static_cast<int>(point.size());
  std::vector<Taylor> vars;
  vars.reserve(n);
  for (int i = 0; i < n; ++i) vars.push_back(Taylor::variable(n, degree, i, point[i]));
  return vars;
}

}  // namespace simcurv
