#include <cmath>

#include "doctest.h"
#include "simcurv/error.hpp"
#include "simcurv/graph.hpp"
#include "simcurv/models.hpp"
#include "support.hpp"

using namespace simcurv;

namespace {

GraphEval at(const SystemPtr& s, const IvfPtr& a, double t, std::vector<double> x, int order,
             const GraphOptions& o = {}) {
  return eval_graph(s, a, t, x, order, o);
}

IvfPtr non_invariant_11() {
  return make_closed_ivf(1, 1, "1 - u/2", [](auto u, auto out) { out[0] = 1.0 - 0.5 * u[0]; });
}

// Largest relative deviation of b from a, scaled by max(1, |a|).
double rel_dev(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a.data()[i] - b.data()[i]) / std::max(1.0, std::abs(a.data()[i])));
  return d;
}

}  // namespace

TEST_CASE("Davis-Skodje slow manifold is a static graph") {
  const auto ds = make_davis_skodje(3.5);
  for (double t : {0.0, 0.7, 2.0})
    for (double x : {0.0, 0.5, 1.0, 2.0}) {
      const auto ge = at(ds, ds->slow_manifold(), t, {x}, 2);
      CHECK(ge.p[0] == doctest::Approx(x / (x + 1)));
      CHECK(std::abs(ge.d1(0, 0)) < 1e-14);
      CHECK(ge.source == GraphSource::closed_form);
    }
}

TEST_CASE("p at t = 0 equals the lift") {
  const std::vector<SystemPtr> models{make_davis_skodje(3.5), make_kuehn_nonlinear(0.01),
                                      make_enzyme_mmh(0.5, 1.5, 0.01), make_ds_2_1(3.5),
                                      make_model_3_2(0.01)};
  for (const auto& s : models) {
    CAPTURE(s->name());
    const auto a = s->critical_manifold();
    const Vector x = Vector::Constant(s->slow_dim(), 0.8);
    const Vector p = eval_p(s, a, 0.0, std::span<const double>(x.data(), x.size()));
    CHECK(((*a)(x) - p).lpNorm<Eigen::Infinity>() < 1e-14);
  }
}

TEST_CASE("differences over shooting agree with closed partials (Kuehn, h0)") {
  const auto ku = make_kuehn_nonlinear(0.01);
  GraphOptions num;
  num.mode = GraphMode::numeric;
  num.fd_base = FdBase::bvp;
  const auto closed = at(ku, ku->critical_manifold(), 0.0, {0.5}, 2);
  const auto fd = at(ku, ku->critical_manifold(), 0.0, {0.5}, 2, num);
  CHECK(fd.source == GraphSource::finite_difference);
  CHECK(testing::max_abs_diff(closed.d1, fd.d1) < 1e-5);
  CHECK(testing::max_abs_diff(closed.d2[0], fd.d2[0]) < 1e-5);
}

TEST_CASE("property: differences over closed p match exact partials on 5x5 grids") {
  struct Case {
    SystemPtr s;
    IvfPtr a;
  };
  const auto ds = make_davis_skodje(3.5);
  const auto ku = make_kuehn_nonlinear(0.01);
  const std::vector<Case> cases{{ds, non_invariant_11()}, {ds, ds->slow_manifold()},
                                {ku, ku->critical_manifold()}};
  GraphOptions num;
  num.mode = GraphMode::numeric;
  num.fd_base = FdBase::closed_p;
  for (const auto& c : cases) {
    CAPTURE(c.s->name());
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const double t = 0.5 * i, x = 0.1 + 0.45 * j;
        const auto ex = at(c.s, c.a, t, {x}, 3);
        const auto fd = at(c.s, c.a, t, {x}, 3, num);
        CAPTURE(t);
        CAPTURE(x);
        CHECK(rel_dev(ex.d1, fd.d1) < 1e-5);
        CHECK(rel_dev(ex.d2[0], fd.d2[0]) < 1e-5);
        for (int k = 0; k < 2; ++k) CHECK(rel_dev(ex.d3[0][k], fd.d3[0][k]) < 1e-4);
      }
  }
}

TEST_CASE("differences over closed p in higher dimension") {
  const auto m = make_model_3_2(0.01);
  GraphOptions num;
  num.mode = GraphMode::numeric;
  num.fd_base = FdBase::closed_p;
  const auto ex = at(m, m->critical_manifold(), 0.2, {0.3, 1.0, 0.5}, 3);
  const auto fd = at(m, m->critical_manifold(), 0.2, {0.3, 1.0, 0.5}, 3, num);
  CHECK(rel_dev(ex.d1, fd.d1) < 1e-5);
  for (int r = 0; r < 2; ++r) {
    CHECK(rel_dev(ex.d2[r], fd.d2[r]) < 1e-5);
    for (int k = 0; k < 4; ++k) CHECK(rel_dev(ex.d3[r][k], fd.d3[r][k]) < 1e-4);
  }
  CHECK(symmetry_defect(ex) == 0.0);
  CHECK(symmetry_defect(fd) == 0.0);
}

TEST_CASE("property: slow manifolds have vanishing time derivative") {
  const std::vector<SystemPtr> models{make_davis_skodje(3.5), make_kuehn_nonlinear(0.01),
                                      make_enzyme_mmh(0.5, 1.5, 0.01), make_ds_2_1(3.5),
                                      make_model_3_2(0.01)};
  testing::Gen g(23);
  for (const auto& s : models) {
    CAPTURE(s->name());
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = g.vector(s->slow_dim(), 0.0, 2.0);
      const auto ge = eval_graph(s, s->slow_manifold(), g.uniform(0.0, 2.0),
                                 std::span<const double>(x.data(), x.size()), 2);
      CHECK(ge.d1.col(0).norm() <= 1e-7);
    }
  }
}

TEST_CASE("immersion Jacobian structure") {
  const auto ds = make_davis_skodje(3.5);
  const auto ge = at(ds, ds->slow_manifold(), 1.0, {1.0}, 1);
  const Matrix J = immersion_jacobian(ge);
  REQUIRE(J.rows() == 3);
  CHECK(J.topRows(2) == Matrix::Identity(2, 2));
  CHECK(J(2, 0) == doctest::Approx(0.0));
  CHECK(J(2, 1) == doctest::Approx(0.25));

  GraphEval flat;
  flat.point = Vector::Zero(4);
  flat.p = Vector::Constant(2, 3.0);
  flat.d1 = Matrix::Zero(2, 4);
  Matrix expected = Matrix::Zero(6, 4);
  expected.topRows(4).setIdentity();
  CHECK(immersion_jacobian(flat) == expected);

  testing::Gen g(4);
  const auto m = make_model_3_2(0.01);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = g.vector(3, 0.0, 2.0);
    const auto e = eval_graph(m, m->critical_manifold(), g.uniform(0, 2), std::span<const double>(x.data(), 3), 1);
    CHECK(Eigen::FullPivLU<Matrix>(immersion_jacobian(e)).rank() == 4);
  }
}

TEST_CASE("unsupported and invalid graph requests") {
  const auto en = make_enzyme_mmh(0.5, 1.5, 0.01);
  GraphOptions closed;
  closed.mode = GraphMode::closed;
  CHECK_THROWS_AS(at(en, en->critical_manifold(), 0.5, {1.0}, 2, closed), Unsupported);
  CHECK_THROWS_AS(at(en, en->critical_manifold(), 0.5, {1.0}, 3), Unsupported);
  CHECK_THROWS_AS(at(en, en->critical_manifold(), 0.5, {1.0}, 4), InvalidArgument);
  CHECK_THROWS_AS(at(en, en->critical_manifold(), 0.5, {1.0, 2.0}, 2), InvalidArgument);
}

TEST_CASE("stencil failures name the stencil point") {
  const auto ds = make_davis_skodje(3.5);
  GraphOptions num;
  num.mode = GraphMode::numeric;
  num.fd_base = FdBase::closed_p;
  try {
    const auto pole = make_closed_ivf(1, 1, "1/u", [](auto u, auto out) { out[0] = 1.0 / u[0]; });
    at(ds, pole, 0.0, {0.0}, 1, num);
    FAIL("expected an error");
  } catch (const NumericalFailure& e) {
    CHECK(std::string(e.what()).find("stencil point") != std::string::npos);
  }
}
