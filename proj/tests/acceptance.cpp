#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "simcurv/asymptotic.hpp"
#include "simcurv/bvp.hpp"
#include "simcurv/criteria.hpp"
#include "simcurv/geometry.hpp"
#include "simcurv/models.hpp"
#include "simcurv/sweep.hpp"

using namespace simcurv;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within(double v, double ref, double rel) { return std::abs(v - ref) <= rel * std::abs(ref); }

IvfPtr tilted_line() {
  return make_closed_ivf(1, 1, "1 - u/2", [](auto u, auto out) { out[0] = 1.0 - 0.5 * u[0]; });
}

double max_k(const SystemPtr& s, const IvfPtr& a, const GridSpec& g, CurvatureRoute r = CurvatureRoute::gauss_equation) {
  SweepOptions o;
  o.route = r;
  return summarize(curvature_sweep(s, a, g, o)).max_abs_K;
}

Outcome kuehn_point() {
  const auto ku = make_kuehn_nonlinear(0.01);
  const double x[1] = {0.5};
  const auto ge = eval_graph(ku, ku->critical_manifold(), 0.0, x, 2);
  const double k = gaussian_curvature_11(ge);
  return {within(k, -0.00255, 0.02), fmt("K2 = %.6g (ref -0.00255, 2%%)", k)};
}

Outcome triple() {
  const auto m = make_model_3_2(0.01);
  const double x[3] = {0.3, 1.0, 0.5};
  const Vector K = curvature_at(m, m->critical_manifold(), 0.0, x, CurvatureRoute::gauss_equation).K;
  const double ref[3] = {-0.04928, -0.02973, -0.01270};
  bool ok = true;
  std::string d = "K =";
  for (int i = 0; i < 3; ++i) {
    ok = ok && within(K[i], ref[i], 0.05);
    d += fmt(" %.5g", K[i]) + fmt(" (%+.1f%%)", 100.0 * (K[i] - ref[i]) / std::abs(ref[i]));
  }
  return {ok, d + " vs (-0.04928, -0.02973, -0.01270), 5%"};
}

Outcome necessary_closed() {
  const std::vector<SystemPtr> models{make_davis_skodje(3.5), make_kuehn_nonlinear(0.01),
                                      make_enzyme_mmh(0.5, 1.5, 0.01), make_ds_2_1(3.5),
                                      make_model_3_2(0.01)};
  double worst = 0.0;
  std::string d;
  for (const auto& s : models) {
    const double k = max_k(s, s->slow_manifold(), GridSpec::uniform(s->slow_dim(), 0, 2, 10, 0, 2, 10));
    worst = std::max(worst, k);
    d += s->name() + fmt(" %.2g  ", k);
  }
  return {worst <= 1e-7, "max|K|: " + d + "(<= 1e-7)"};
}

Outcome necessary_bvp() {
  const auto en = make_enzyme_mmh(0.5, 1.5, 0.01);
  const double k = max_k(en, asymptotic_lift(en, 5), GridSpec::uniform(1, 0, 2, 10, 0, 3, 20));
  return {k <= 1e-3, fmt("max|K2| = %.3g (<= 1e-3)", k)};
}

Outcome integral_decrease() {
  const auto en = make_enzyme_mmh(0.5, 1.0, 0.5);
  const auto grid = GridSpec::uniform(1, 0, 2, 10, 0, 3, 20);
  std::vector<double> I;
  std::string d = "I =";
  for (int k = 0; k <= 5; ++k) {
    I.push_back(curvature_integral(en, asymptotic_lift(en, k), grid));
    d += fmt(" %.4g", I.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < I.size(); ++i) ok = ok && I[i] < I[i - 1];
  return {ok, d + (ok ? " strictly decreasing" : " not strictly decreasing")};
}

Outcome minimizers() {
  const double gamma = 3.5, u = 2.0;
  const auto ds = make_davis_skodje(gamma);
  const auto m1 = minimize_criterion({CriterionKind::F1_squared_graph_curvature, u, 1, 0, ds});
  const auto m2 = minimize_criterion({CriterionKind::F2_jacobian_weighted_field, u, 1, 0, ds});
  const auto m3 = minimize_criterion({CriterionKind::F3_energy, u, 1, gamma / (u + 1), ds});
  double agree = 0.0;
  for (const auto* m : {&m1, &m2, &m3}) agree = std::max(agree, std::abs(*m->c_closed - m->c_numeric));
  const bool ok = m1.c_min >= 0.0028 && m1.c_min <= 0.0032 && m2.c_min >= 0.00051 && m2.c_min <= 0.00056 &&
                  std::abs(m3.c_min) <= 1e-10 && agree <= 1e-8;
  return {ok, fmt("c(F1) = %.6g", m1.c_min) + fmt(", c(F2) = %.6g", m2.c_min) +
                  fmt(", c(F3) = %.3g", m3.c_min) + fmt(", |closed - numeric| <= %.2g", agree)};
}

Outcome route_equivalence() {
  const auto ds = make_davis_skodje(3.5);
  const auto ku = make_kuehn_nonlinear(0.01);
  const std::vector<std::pair<SystemPtr, IvfPtr>> cases{
      {ds, ds->slow_manifold()}, {ds, tilted_line()}, {ds, constant_ivf(1, {0.3})},
      {ku, ku->critical_manifold()}, {ku, ku->slow_manifold()}, {ku, tilted_line()}};
  const auto grid = GridSpec::uniform(1, 0.0, 1.0, 5, 0.1, 1.0, 5);
  double worst = 0.0;
  for (const auto& [s, a] : cases) {
    SweepOptions o;
    o.route = CurvatureRoute::christoffel;
    const auto c = curvature_sweep(s, a, grid, o);
    o.route = CurvatureRoute::gauss_equation;
    const auto g = curvature_sweep(s, a, grid, o);
    o.route = CurvatureRoute::closed_11;
    const auto e = curvature_sweep(s, a, grid, o);
    for (std::size_t i = 0; i < c.size(); ++i)
      worst = std::max({worst, std::abs(c[i].K[0] - g[i].K[0]), std::abs(c[i].K[0] - e[i].K[0])});
  }
  return {worst <= 1e-6, fmt("max route difference %.2g (<= 1e-6)", worst)};
}

Outcome flat_family() {
  const auto ds = make_davis_skodje(3.5);
  double worst = 0.0;
  for (double c : {-1.0, 0.5, 2.0}) {
    const double cs[1] = {c};
    worst = std::max(worst, max_k(ds, ds->invariant_family(cs), GridSpec::uniform(1, 0, 2, 10, 0, 2, 10)));
  }
  return {worst <= 1e-7, fmt("max|K2| = %.2g over c in {-1, 0.5, 2} (<= 1e-7)", worst)};
}

Outcome bvp_oracle() {
  const auto ds = make_davis_skodje(3.5);
  const auto a = tilted_line();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = U(rng), x = U(rng);
    const auto sol = solve_bvp(BvpProblem{ds, t, Vector::Constant(1, x), a}, BvpConfig{});
    double p[1];
    const double xs[1] = {x};
    ds->p_closed(t, xs, *a, p);
    worst = std::max(worst, std::abs(sol.y_star[0] - p[0]));
  }
  return {worst <= 1e-8, fmt("max |y* - p| = %.2g (<= 1e-8)", worst)};
}

Outcome asymptotic_order() {
  std::string d;
  bool ok = true;
  for (int k = 0; k <= 2; ++k) {
    std::vector<double> ratios;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto en = make_enzyme_mmh(0.5, 1.0, eps);
      const double r =
          invariance_residual(*en, *asymptotic_lift(en, k), Vector::Constant(1, 0.7)).cwiseAbs().maxCoeff();
      ratios.push_back(r / std::pow(eps, k + 1));
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                          *std::min_element(ratios.begin(), ratios.end());
    ok = ok && spread < 3.0;
    d += fmt("k=%.0f ", k) + fmt("spread %.3g  ", spread);
  }
  return {ok, d + "(< 3)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--known-failure") known.insert(std::atoi(argv[++i]));

  const std::vector<Criterion> criteria{
      {1, "Kuehn point value", 1, kuehn_point},
      {2, "(3,2) curvature triple", 10, triple},
      {3, "necessary condition, closed form", 30, necessary_closed},
      {4, "necessary condition, shooting", 300, necessary_bvp},
      {5, "curvature integral decrease", 600, integral_decrease},
      {6, "criteria minimizers", 1, minimizers},
      {7, "route equivalence", 30, route_equivalence},
      {8, "invariance without slowness", 5, flat_family},
      {9, "shooting oracle", 10, bvp_oracle},
      {10, "asymptotic order", 10, asymptotic_order}};

  int failed = 0, unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; runtime over %.0f s", c.limit_s);
    }
    std::printf("%s %2d %s: %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), dt);
    std::fflush(stdout);
    if (!o.pass) {
      ++failed;
      if (!known.count(c.id)) ++unexpected;
    }
  }
  std::printf("%d/%zu criteria pass", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (failed > unexpected) std::printf(" (%d known failure%s)", failed - unexpected, failed - unexpected == 1 ? "" : "s");
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
