#include <cmath>

#include "doctest.h"
#include "simcurv/asymptotic.hpp"
#include "simcurv/error.hpp"
#include "simcurv/models.hpp"
#include "simcurv/registry.hpp"
#include "support.hpp"

using namespace simcurv;
using testing::Gen;

namespace {

std::vector<SystemPtr> all_models() {
  return {make_davis_skodje(3.5), make_kuehn_nonlinear(0.01), make_enzyme_mmh(0.5, 1.5, 0.01),
          make_ds_2_1(3.5), make_model_3_2(0.01)};
}

Vector random_state(Gen& g, const SlowFastSystem& s) {
  Vector v(s.dim());
  v.head(s.slow_dim()) = g.vector(s.slow_dim(), 0.1, 2.0);
  v.tail(s.fast_dim()) = g.vector(s.fast_dim(), -1.0, 1.0);
  return v;
}

double value_at(const IvfPtr& a, double u) { return (*a)(Vector::Constant(1, u))[0]; }

}  // namespace

TEST_CASE("rhs reproduces hand-substituted values") {
  Vector s(2);
  s << 1.0, 0.5;
  const Vector ds = make_davis_skodje(3.5)->rhs(s);
  CHECK(ds[0] == doctest::Approx(-1.0));
  CHECK(ds[1] == doctest::Approx(-0.25));

  CHECK(make_kuehn_nonlinear(0.01)->rhs(Vector::Zero(2)).norm() == 0.0);

  s << 1.0, 0.4;
  const Vector en = make_enzyme_mmh(0.5, 1.5, 0.01)->rhs(s);
  CHECK(en[0] == doctest::Approx(-0.002));
  CHECK(std::abs(en[1]) < 1e-15);
}

TEST_CASE("rhs rejects wrong dimensions and non-finite states") {
  const auto ds = make_davis_skodje(3.5);
  CHECK_THROWS_AS(ds->rhs(Vector::Zero(3)), InvalidArgument);
  Vector bad(2);
  bad << NAN, 0.0;
  CHECK_THROWS_AS(ds->rhs(bad), InvalidArgument);
  CHECK_THROWS_AS(ds->rhs_jacobian(Vector::Zero(1)), InvalidArgument);
}

TEST_CASE("Davis-Skodje slow row of the Jacobian is (-1, 0)") {
  Gen g(1);
  const auto ds = make_davis_skodje(3.5);
  for (int i = 0; i < 5; ++i) {
    const Matrix J = ds->rhs_jacobian(random_state(g, *ds));
    CHECK(J(0, 0) == -1.0);
    CHECK(J(0, 1) == 0.0);
  }
}

TEST_CASE("property: analytic Jacobians match central differences") {
  Gen g(42);
  for (const auto& sys : all_models()) {
    CAPTURE(sys->name());
    for (int trial = 0; trial < 20; ++trial) {
      const Vector s = random_state(g, *sys);
      const Matrix J = sys->rhs_jacobian(s);
      for (int j = 0; j < sys->dim(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(s[j]));
        Vector sp = s, sm = s;
        sp[j] += h;
        sm[j] -= h;
        const Vector col = (sys->rhs(sp) - sys->rhs(sm)) / (2.0 * h);
        for (int i = 0; i < sys->dim(); ++i) CHECK(testing::rel_close(J(i, j), col[i], 1e-6));
      }
    }
  }
}

TEST_CASE("property: closed-form flows satisfy the ODE") {
  Gen g(99);
  for (const auto& sys : all_models()) {
    if (!sys->has_flow_solution()) continue;
    CAPTURE(sys->name());
    for (int trial = 0; trial < 50; ++trial) {
      const Vector s0 = random_state(g, *sys);
      const Vector c = sys->flow_constants(s0);
      CHECK((sys->flow_solution(c, 0.0) - s0).lpNorm<Eigen::Infinity>() < 1e-13);
      const double t = g.uniform(0.0, 2.0);
      const double h = 1e-3;
      const Vector d = (-sys->flow_solution(c, t + 2 * h) + 8.0 * sys->flow_solution(c, t + h) -
                        8.0 * sys->flow_solution(c, t - h) + sys->flow_solution(c, t - 2 * h)) /
                       (12.0 * h);
      const Vector f = sys->rhs(sys->flow_solution(c, t));
      CHECK((d - f).lpNorm<Eigen::Infinity>() < 1e-10 * std::max(1.0, f.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("slow manifolds satisfy the invariance equation") {
  Gen g(5);
  for (const auto& sys : all_models()) {
    CAPTURE(sys->name());
    const IvfPtr h = sys->slow_manifold();
    REQUIRE(h);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = g.vector(sys->slow_dim(), 0.0, 2.0);
      CHECK(invariance_residual(*sys, *h, x).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("critical manifolds differ from the slow manifold where eps enters h_eps") {
  for (const auto& sys : {make_kuehn_nonlinear(0.01), make_enzyme_mmh(0.5, 1.5, 0.01), make_model_3_2(0.01)}) {
    CAPTURE(sys->name());
    const Vector x = Vector::Constant(sys->slow_dim(), 0.7);
    CHECK(invariance_residual(*sys, *sys->critical_manifold(), x).lpNorm<Eigen::Infinity>() > 1e-6);
  }
}

TEST_CASE("invariant family values") {
  const auto ds = make_davis_skodje(3.5);
  const double zero[1] = {0.0}, one[1] = {1.0};
  CHECK(value_at(ds->invariant_family(zero), 1.0) == doctest::Approx(0.5));
  CHECK(value_at(ds->invariant_family(one), 0.0) == 0.0);
  const auto ku = make_kuehn_nonlinear(0.01);
  CHECK(value_at(ku->invariant_family(zero), 0.5) == doctest::Approx(0.25 / 0.98));
  CHECK_THROWS_AS(make_enzyme_mmh(0.5, 1.5, 0.01)->invariant_family(zero), Unsupported);
}

TEST_CASE("property: zero family members equal the slow manifold") {
  Gen g(11);
  for (const auto& sys : all_models()) {
    if (sys->family_parameter_count() == 0) continue;
    CAPTURE(sys->name());
    const std::vector<double> zeros(sys->family_parameter_count(), 0.0);
    const auto fam = sys->invariant_family(zeros);
    const auto h = sys->slow_manifold();
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = g.vector(sys->slow_dim(), 0.0, 2.0);
      CHECK(((*fam)(x) - (*h)(x)).lpNorm<Eigen::Infinity>() < 1e-14);
    }
  }
}

TEST_CASE("property: family members are invariant for any constant") {
  Gen g(12);
  for (const auto& sys : all_models()) {
    if (sys->family_parameter_count() == 0) continue;
    CAPTURE(sys->name());
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(sys->family_parameter_count());
      for (auto& v : c) v = g.uniform(-2.0, 2.0);
      const auto fam = sys->invariant_family(c);
      const Vector x = g.vector(sys->slow_dim(), 0.1, 0.95);
      Vector state(sys->dim());
      state << x, (*fam)(x);
      const double scale = std::max(1.0, sys->rhs(state).lpNorm<Eigen::Infinity>());
      CHECK(invariance_residual(*sys, *fam, x).lpNorm<Eigen::Infinity>() <= 1e-9 * scale);
    }
  }
}

TEST_CASE("asymptotic coefficients of the enzyme model") {
  const auto en = make_enzyme_mmh(0.5, 1.5, 0.01);
  const auto h = asymptotic_coefficients(en, 4);
  REQUIRE(h.size() == 5);
  CHECK(value_at(h[0], 1.0) == doctest::Approx(0.4));
  for (const auto& hk : h) CHECK(std::abs(value_at(hk, 0.0)) < 1e-15);

  const auto en1 = make_enzyme_mmh(0.5, 1.0, 0.01);
  const auto h1 = asymptotic_coefficients(en1, 1)[1];
  for (double x : {0.2, 0.7, 2.0}) CHECK(value_at(h1, x) == doctest::Approx(0.5 * x / std::pow(x + 1, 4)));
}

TEST_CASE("asymptotic coefficients of the nonlinear model are 2^l x^2") {
  const auto ku = make_kuehn_nonlinear(0.1);
  const auto h = asymptotic_coefficients(ku, 5);
  for (int l = 0; l <= 5; ++l) CHECK(value_at(h[l], 0.8) == doctest::Approx(std::pow(2.0, l) * 0.64));
}

TEST_CASE("asymptotic residual decreases at order eps^(k+1)") {
  for (int k = 0; k <= 2; ++k) {
    std::vector<double> ratios;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto en = make_enzyme_mmh(0.5, 1.0, eps);
      const double r =
          invariance_residual(*en, *asymptotic_lift(en, k), Vector::Constant(1, 0.7)).cwiseAbs().maxCoeff();
      ratios.push_back(r / std::pow(eps, k + 1));
    }
    CAPTURE(k);
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    CHECK(lo > 0.0);
    CHECK(hi / lo < 3.0);
  }
}

TEST_CASE("asymptotic expansion rejects unsupported requests") {
  CHECK_THROWS_AS(asymptotic_lift(make_enzyme_mmh(0.5, 1.5, 0.01), 9), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_lift(make_enzyme_mmh(0.5, 1.5, 0.01), -1), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_lift(make_davis_skodje(3.5), 2), Unsupported);
}

TEST_CASE("parameter ranges are enforced") {
  CHECK_THROWS_AS(make_davis_skodje(1.0), InvalidArgument);
  CHECK_THROWS_AS(make_ds_2_1(2.0), InvalidArgument);
  CHECK_THROWS_AS(make_kuehn_nonlinear(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_kuehn_nonlinear(0.5), InvalidArgument);
  CHECK_THROWS_AS(make_enzyme_mmh(1.5, 1.5, 0.01), InvalidArgument);
  CHECK_THROWS_AS(make_enzyme_mmh(0.5, 1.5, -0.01), InvalidArgument);
  CHECK_THROWS_AS(make_model_3_2(0.5), InvalidArgument);
  CHECK_THROWS_AS(make_model_3_2(NAN), InvalidArgument);
}

TEST_CASE("registry builds models from JSON") {
  const auto& models = list_models();
  REQUIRE(models.size() == 5);
  CHECK(models[0].name == "davis_skodje");
  const auto s = system_from_json(nlohmann::json::parse(R"({"model": "davis_skodje", "params": {"gamma": 4}})"));
  CHECK(s->param("gamma") == 4.0);
  CHECK(make_system("enzyme_mmh")->param("kappa") == 1.5);
  CHECK(make_system("model_3_2")->slow_dim() == 3);
  CHECK_THROWS_AS(make_system("unknown"), InvalidArgument);
  CHECK_THROWS_AS(make_system("davis_skodje", nlohmann::json{{"eps", 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(make_system("davis_skodje", nlohmann::json{{"gamma", "big"}}), InvalidArgument);
  CHECK_THROWS_AS(system_from_json(nlohmann::json{{"params", {}}}), InvalidArgument);
  CHECK_THROWS_AS(s->param("eps"), InvalidArgument);
}
