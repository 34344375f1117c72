#include "simcurv/geometry.hpp"

#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

double plane_denominator(const Matrix& g, int i) {
  const double d = g(0, 0) * g(i, i) - g(0, i) * g(0, i);
  if (!(d > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate time plane sigma_" << (i + 1) << " (denominator " << d << ")";
    throw NumericalFailure(msg.str());
  }
  return d;
}

// Christoffel symbols of the first kind, T[l](i, j).
std::vector<Matrix> first_kind(const std::vector<Matrix>& dg) {
  const int n = static_cast<int>(dg.size());
  std::vector<Matrix> T(n, Matrix(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return T;
}

std::vector<Matrix> raise(const Matrix& g_inv, const std::vector<Matrix>& T) {
  const int n = static_cast<int>(T.size());
  std::vector<Matrix> G(n, Matrix::Zero(n, n));
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) G[m] += g_inv(m, l) * T[l];
  return G;
}

}  // namespace

MetricTensor metric_tensor(const Matrix& J) {
  MetricTensor mt;
  mt.g = J.transpose() * J;
  const Eigen::LLT<Matrix> llt(mt.g);
  if (llt.info() != Eigen::Success || !mt.g.allFinite())
    throw NumericalFailure("induced metric is not positive definite");
  const Matrix L = llt.matrixL();
  mt.det_g = L.diagonal().prod();
  mt.det_g *= mt.det_g;
  mt.g_inv = llt.solve(Matrix::Identity(mt.g.rows(), mt.g.cols()));
  return mt;
}

MetricJet metric_jet(const GraphEval& ge) {
  const int n = static_cast<int>(ge.point.size());
  const int m = static_cast<int>(ge.p.size());
  if (ge.d2.empty()) throw InvalidArgument("metric_jet: second partials are required");
  MetricJet jet;
  jet.metric = metric_tensor(immersion_jacobian(ge));
  jet.dg.assign(n, Matrix::Zero(n, n));
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < m; ++r)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          jet.dg[c](a, b) += ge.d2[r](a, c) * ge.d1(r, b) + ge.d1(r, a) * ge.d2[r](b, c);
  if (!ge.d3.empty()) {
    jet.ddg.assign(n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        for (int r = 0; r < m; ++r) {
          const Matrix& h = ge.d2[r];
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              jet.ddg[c][d](a, b) += ge.d3[r][a](c, d) * ge.d1(r, b) + h(a, c) * h(b, d) +
                                     h(a, d) * h(b, c) + ge.d1(r, a) * ge.d3[r][b](c, d);
        }
  }
  return jet;
}

std::vector<Matrix> christoffel(const MetricJet& jet) {
  return raise(jet.metric.g_inv, first_kind(jet.dg));
}

std::vector<std::vector<Matrix>> christoffel_derivative(const MetricJet& jet) {
  if (jet.ddg.empty()) throw InvalidArgument("christoffel_derivative: second metric partials are required");
  const int n = static_cast<int>(jet.dg.size());
  const Matrix& gi = jet.metric.g_inv;
  const auto T = first_kind(jet.dg);
  std::vector<std::vector<Matrix>> out(n);
  for (int c = 0; c < n; ++c) {
    const Matrix dgi = -gi * jet.dg[c] * gi;
    std::vector<Matrix> dT(n, Matrix(n, n));
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dT[l](i, j) = 0.5 * (jet.ddg[c][i](j, l) + jet.ddg[c][j](i, l) - jet.ddg[c][l](i, j));
    out[c] = raise(gi, dT);
    const auto extra = raise(dgi, T);
    for (int m = 0; m < n; ++m) out[c][m] += extra[m];
  }
  return out;
}

Matrix riemann_slice(const MetricJet& jet) {
  const int n = static_cast<int>(jet.dg.size());
  const auto G = christoffel(jet);
  const auto dG = christoffel_derivative(jet);
  Matrix R(n, n - 1);
  for (int i = 1; i < n; ++i)
    for (int m = 0; m < n; ++m) {
      double v = dG[0][m](i, i) - dG[i][m](0, i);
      for (int l = 0; l < n; ++l) v += G[l](i, i) * G[m](0, l) - G[l](0, i) * G[m](i, l);
      R(m, i - 1) = v;
    }
  return R;
}

Vector time_sectional_curvatures(const MetricTensor& metric, const Matrix& riemann) {
  const Matrix& g = metric.g;
  const int n = static_cast<int>(g.rows());
  if (riemann.rows() != n || riemann.cols() != n - 1)
    throw InvalidArgument("time_sectional_curvatures: Riemann slice has the wrong shape");
  Vector K(n - 1);
  for (int i = 1; i < n; ++i) {
    double num = 0.0;
    for (int m = 0; m < n; ++m) num += riemann(m, i - 1) * g(m, 0);
    K[i - 1] = num / plane_denominator(g, i);
  }
  return K;
}

double gaussian_curvature_11(const GraphEval& ge) {
  if (ge.point.size() != 2 || ge.p.size() != 1)
    throw InvalidArgument("gaussian_curvature_11 needs a (1,1) graph");
  if (ge.d2.empty()) throw InvalidArgument("gaussian_curvature_11: second partials are required");
  const double pt = ge.d1(0, 0), px = ge.d1(0, 1);
  const Matrix& h = ge.d2[0];
  const double w = 1.0 + pt * pt + px * px;
  return (h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1)) / (w * w);
}

Vector gauss_equation_curvatures(const GraphEval& ge, const MetricTensor& metric) {
  if (ge.d2.empty()) throw InvalidArgument("gauss_equation_curvatures: second partials are required");
  const int n = static_cast<int>(ge.point.size());
  const int m = static_cast<int>(ge.p.size());
  const Matrix J = immersion_jacobian(ge);
  const Matrix N = Matrix::Identity(n + m, n + m) - J * metric.g_inv * J.transpose();
  auto II = [&](int a, int b) {
    Vector psi = Vector::Zero(n + m);
    for (int r = 0; r < m; ++r) psi[n + r] = ge.d2[r](a, b);
    return Vector(N * psi);
  };
  const Vector II00 = II(0, 0);
  Vector K(n - 1);
  for (int i = 1; i < n; ++i) {
    const Vector IIii = II(i, i);
    const Vector II0i = II(0, i);
    K[i - 1] = (II00.dot(IIii) - II0i.squaredNorm()) / plane_denominator(metric.g, i);
  }
  return K;
}

std::string_view route_name(CurvatureRoute route) {
  switch (route) {
    case CurvatureRoute::christoffel: return "christoffel";
    case CurvatureRoute::gauss_equation: return "gauss";
    case CurvatureRoute::closed_11: return "closed11";
  }
  return "gauss";
}

CurvatureRoute parse_route(std::string_view name) {
  if (name == "christoffel") return CurvatureRoute::christoffel;
  if (name == "gauss" || name == "gauss_equation") return CurvatureRoute::gauss_equation;
  if (name == "closed11" || name == "closed_11") return CurvatureRoute::closed_11;
  throw InvalidArgument("unknown curvature route '" + std::string(name) + "'");
}

int route_order(CurvatureRoute route) { return route == CurvatureRoute::christoffel ? 3 : 2; }

CurvatureReport curvature_from_graph(const GraphEval& ge, CurvatureRoute route) {
  CurvatureReport rep;
  rep.point = ge.point;
  rep.p = ge.p;
  rep.route = route;
  rep.source = ge.source;
  switch (route) {
    case CurvatureRoute::christoffel: {
      if (ge.d3.empty()) throw InvalidArgument("christoffel route needs third partials of p");
      const MetricJet jet = metric_jet(ge);
      rep.metric = jet.metric;
      rep.christoffel = christoffel(jet);
      rep.riemann = riemann_slice(jet);
      rep.K = time_sectional_curvatures(rep.metric, *rep.riemann);
      break;
    }
    case CurvatureRoute::gauss_equation:
      rep.metric = metric_tensor(immersion_jacobian(ge));
      rep.K = gauss_equation_curvatures(ge, rep.metric);
      break;
    case CurvatureRoute::closed_11:
      rep.metric = metric_tensor(immersion_jacobian(ge));
      rep.K = Vector::Constant(1, gaussian_curvature_11(ge));
      break;
  }
  if (!rep.K.allFinite()) throw NumericalFailure("time-sectional curvature is not finite");
  return rep;
}

CurvatureReport curvature_at(const SystemPtr& system, const IvfPtr& a, double t,
                             std::span<const double> x, CurvatureRoute route,
                             const GraphOptions& options) {
  if (route == CurvatureRoute::closed_11 && (system->slow_dim() != 1 || system->fast_dim() != 1))
    throw InvalidArgument(system->name() + ": closed11 route needs a (1,1) model");
  return curvature_from_graph(eval_graph(system, a, t, x, route_order(route), options), route);
}

}  // namespace simcurv
