#include <cmath>

#include "doctest.h"
#include "simcurv/error.hpp"
#include "simcurv/taylor.hpp"
#include "support.hpp"

using namespace simcurv;
using testing::Gen;

namespace {

Taylor random_jet(Gen& g, int nvars, int degree, double value) {
  Taylor t(nvars, degree, value);
  for (std::size_t i = 1; i < t.size(); ++i) t.set_coefficient(t.exponents(i), g.uniform(-1.0, 1.0));
  return t;
}

double max_coeff_diff(const Taylor& a, const Taylor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a.coefficients()[i] - b.coefficients()[i]));
  return d;
}

}  // namespace

TEST_CASE("variables and products give the expected monomials") {
  const auto v = make_variables(std::vector<double>{1.0, 2.0}, 3);
  const Taylor f = v[0] * v[0] * v[1];  // x^2 y about (1, 2)
  CHECK(f.value() == doctest::Approx(2.0));
  const int dx[2] = {1, 0}, dy[2] = {0, 1}, dxx[2] = {2, 0}, dxy[2] = {1, 1}, dxxy[2] = {2, 1};
  CHECK(f.derivative_value(dx) == doctest::Approx(4.0));
  CHECK(f.derivative_value(dy) == doctest::Approx(1.0));
  CHECK(f.derivative_value(dxx) == doctest::Approx(4.0));
  CHECK(f.derivative_value(dxy) == doctest::Approx(2.0));
  CHECK(f.derivative_value(dxxy) == doctest::Approx(2.0));
}

TEST_CASE("exp, log and sqrt match known series") {
  const Taylor x = Taylor::variable(1, 6, 0, 0.0);
  const Taylor e = exp(x);
  double fact = 1.0;
  for (int j = 0; j <= 6; ++j) {
    if (j > 0) fact *= j;
    const int ex[1] = {j};
    CHECK(e.coefficient(ex) == doctest::Approx(1.0 / fact));
  }
  const Taylor l = log(1.0 + x);  // x - x^2/2 + x^3/3 ...
  for (int j = 1; j <= 6; ++j) {
    const int ex[1] = {j};
    CHECK(l.coefficient(ex) == doctest::Approx((j % 2 ? 1.0 : -1.0) / j));
  }
  const Taylor s = sqrt(Taylor::variable(1, 3, 0, 4.0));
  const int d1[1] = {1}, d2[1] = {2};
  CHECK(s.value() == doctest::Approx(2.0));
  CHECK(s.derivative_value(d1) == doctest::Approx(0.25));
  CHECK(s.derivative_value(d2) == doctest::Approx(-1.0 / 32.0));
}

TEST_CASE("derivative lowers the degree and zeroes the top coefficients") {
  const auto v = make_variables(std::vector<double>{0.0, 0.0}, 3);
  const Taylor f = v[0] * v[0] * v[1] + v[1];
  const Taylor fx = f.derivative(0);  // 2 x y
  const int xy[2] = {1, 1}, y[2] = {0, 1};
  CHECK(fx.coefficient(xy) == doctest::Approx(2.0));
  CHECK(fx.coefficient(y) == doctest::Approx(0.0));
  const Taylor fy = f.derivative(1);  // x^2 + 1
  const int xx[2] = {2, 0};
  CHECK(fy.value() == doctest::Approx(1.0));
  CHECK(fy.coefficient(xx) == doctest::Approx(1.0));
}

TEST_CASE("property: algebraic identities hold on random jets") {
  Gen g(20240611);
  for (int trial = 0; trial < 50; ++trial) {
    const int nvars = g.integer(1, 3);
    const int degree = g.integer(0, 4);
    const Taylor u = random_jet(g, nvars, degree, g.uniform(0.5, 2.0));
    const Taylor v = random_jet(g, nvars, degree, g.uniform(0.5, 2.0));
    CHECK(max_coeff_diff(log(exp(u)), u) < 1e-12);
    CHECK(max_coeff_diff(sqrt(u) * sqrt(u), u) < 1e-12);
    CHECK(max_coeff_diff((u * v) / v, u) < 1e-11);
    CHECK(max_coeff_diff(pow(u, 3), u * u * u) < 1e-12);
    CHECK(max_coeff_diff(pow(u, 2.5) * pow(u, -2.5), Taylor::constant_like(u, 1.0)) < 1e-11);
    CHECK(max_coeff_diff(exp(u + v), exp(u) * exp(v)) < 1e-10);
  }
}

TEST_CASE("property: compose agrees with direct evaluation") {
  Gen g(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int degree = g.integer(1, 4);
    const auto inner = std::vector<Taylor>{random_jet(g, 2, degree, g.uniform(-1, 1)),
                                           random_jet(g, 2, degree, g.uniform(-1, 1))};
    // outer(a, b) = exp(a) * b expanded about the inner values
    const auto w = make_variables(std::vector<double>{inner[0].value(), inner[1].value()}, degree);
    const std::vector<Taylor> outer{exp(w[0]) * w[1]};
    const auto composed = compose(outer, inner);
    CHECK(max_coeff_diff(composed[0], exp(inner[0]) * inner[1]) < 1e-12);
  }
}

TEST_CASE("real powers at zero") {
  const Taylor x = Taylor::variable(1, 2, 0, 0.0);
  CHECK(pow(x, 2.5).value() == 0.0);  // 2.5 > degree: all retained coefficients vanish
  CHECK_THROWS_AS(pow(Taylor::variable(1, 3, 0, 0.0), 2.5), NumericalFailure);
  CHECK_THROWS_AS(pow(Taylor::variable(1, 2, 0, -1.0), 0.5), NumericalFailure);
  const int two[1] = {2};
  CHECK(pow(x, 2.0).coefficient(two) == doctest::Approx(1.0));
}

TEST_CASE("mismatched shapes and bad arguments are rejected") {
  const Taylor a(1, 2, 1.0), b(2, 2, 1.0), c(1, 3, 1.0);
  CHECK_THROWS_AS(a + b, InvalidArgument);
  CHECK_THROWS_AS(a * c, InvalidArgument);
  CHECK_THROWS_AS(Taylor(0, 2), InvalidArgument);
  CHECK_THROWS_AS(Taylor::variable(2, 2, 2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(1.0 / Taylor(1, 2, 0.0), NumericalFailure);
  CHECK_THROWS_AS(log(Taylor(1, 2, -1.0)), NumericalFailure);
}
