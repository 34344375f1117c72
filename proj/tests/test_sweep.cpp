#include <cmath>

#include "doctest.h"
#include "simcurv/asymptotic.hpp"
#include "simcurv/error.hpp"
#include "simcurv/models.hpp"
#include "simcurv/sweep.hpp"
#include "support.hpp"

using namespace simcurv;

namespace {

bool same(const std::vector<NodeResult>& a, const std::vector<NodeResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].point != b[i].point || a[i].p != b[i].p || a[i].K != b[i].K || a[i].source != b[i].source)
      return false;
  return true;
}

IvfPtr pole_lift() {
  return make_closed_ivf(1, 1, "1/(u-1)", [](auto u, auto out) { out[0] = 1.0 / (u[0] - 1.0); });
}

}  // namespace

TEST_CASE("grid parsing and node order") {
  const auto g = GridSpec::parse("t=0:2:3,x1=0:1:2");
  CHECK(g.slow_dim() == 1);
  CHECK(g.node_count() == 6);
  CHECK(g.node(0) == Vector{{0.0, 0.0}});
  CHECK(g.node(1) == Vector{{0.0, 1.0}});
  CHECK(g.node(2) == Vector{{1.0, 0.0}});
  CHECK(g.node(5) == Vector{{2.0, 1.0}});
  CHECK(GridSpec::parse(g.to_string()).to_string() == g.to_string());
  CHECK(g.to_json()[1]["name"] == "x1");

  const auto one = GridSpec::parse("t=0.5:0.5:1,x1=1:1:1,x2=2:2:1");
  CHECK(one.node_count() == 1);
  CHECK(one.node(0) == Vector{{0.5, 1.0, 2.0}});

  const auto fine = GridSpec::parse("t=0:2:10,x1=0:3:20");
  CHECK(fine.node(fine.node_count() - 1) == Vector{{2.0, 3.0}});
}

TEST_CASE("grid parse errors") {
  for (const char* bad : {"", "t=0:1:2", "t=0:1,x1=0:1:2", "x1=0:1:2,t=0:1:2", "t=0:1:2,x2=0:1:2",
                          "t=0:1:0,x1=0:1:2", "t=0:a:2,x1=0:1:2", "t=0:1:2,x1=1:1:3",
                          "t=0:1:2;x1=0:1:2", "t=0:inf:2,x1=0:1:2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(GridSpec::parse(bad), InvalidArgument);
  }
}

TEST_CASE("property: parallel sweep equals the serial reference") {
  testing::Gen g(5);
  const auto ds = make_davis_skodje(3.5);
  const auto m = make_model_3_2(0.01);
  const auto en = make_enzyme_mmh(0.5, 1.5, 0.01);
  struct Case {
    SystemPtr s;
    IvfPtr a;
    GridSpec grid;
  };
  const std::vector<Case> cases{
      {ds, constant_ivf(1, {0.4}), GridSpec::uniform(1, 0, 2, 6, 0, 2, 7)},
      {m, m->critical_manifold(), GridSpec::uniform(3, 0, 1, 3, 0.1, 1, 3)},
      {en, asymptotic_lift(en, 1), GridSpec::uniform(1, 0, 1, 3, 0, 2, 4)}};
  for (const auto& c : cases) {
    CAPTURE(c.s->name());
    const auto ref = curvature_sweep_serial(c.s, c.a, c.grid, {});
    CHECK(ref.size() == c.grid.node_count());
    for (int jobs : {1, 2, 3, 8}) {
      SweepOptions o;
      o.jobs = jobs;
      CHECK(same(ref, curvature_sweep(c.s, c.a, c.grid, o)));
    }
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(ref[i].point == c.grid.node(i));
  }
}

TEST_CASE("a failing node aborts the sweep with its coordinates") {
  const auto ds = make_davis_skodje(3.5);
  const auto grid = GridSpec::parse("t=0:0:1,x1=0:2:3");
  for (int jobs : {1, 4}) {
    SweepOptions o;
    o.jobs = jobs;
    try {
      curvature_sweep(ds, pole_lift(), grid, o);
      FAIL("expected an error");
    } catch (const NumericalFailure& e) {
      CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
    CHECK_THROWS_AS(curvature_sweep_serial(ds, pole_lift(), grid, o), NumericalFailure);
  }
}

TEST_CASE("sweep input validation") {
  const auto ds = make_davis_skodje(3.5);
  CHECK_THROWS_AS(curvature_sweep(ds, ds->slow_manifold(), GridSpec::uniform(2, 0, 1, 2, 0, 1, 2), {}),
                  InvalidArgument);
  CHECK_THROWS_AS(curvature_sweep(nullptr, ds->slow_manifold(), GridSpec::uniform(1, 0, 1, 2, 0, 1, 2), {}),
                  InvalidArgument);
  CHECK(resolve_jobs(3) == 3);
  CHECK(resolve_jobs(0) >= 1);
}

TEST_CASE("summary statistics") {
  std::vector<NodeResult> nodes(2);
  nodes[0].K = Vector{{1.0, -3.0}};
  nodes[1].K = Vector{{-2.0, 0.0}};
  const auto s = summarize(nodes);
  CHECK(s.node_count == 2);
  CHECK(s.max_abs_K == 3.0);
  CHECK(s.mean_abs_K == doctest::Approx(1.5));
  CHECK(s.mean_abs_K2 == doctest::Approx(1.5));
}
