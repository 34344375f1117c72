#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "simcurv/graph.hpp"

namespace simcurv {

struct MetricTensor {
  Matrix g;
  Matrix g_inv;
  double det_g = 0.0;
};

/// g = J^T J. Throws NumericalFailure when g is not positive definite.
MetricTensor metric_tensor(const Matrix& J);

/// Metric and its first and second partials, built from the partials of p:
///   g_ab = delta_ab + sum_r p^r_a p^r_b.
struct MetricJet {
  MetricTensor metric;
  std::vector<Matrix> dg;                // dg[c](a, b) = d_c g_ab
  std::vector<std::vector<Matrix>> ddg;  // ddg[c][d](a, b); empty without third partials of p
};

MetricJet metric_jet(const GraphEval& ge);

/// Gamma[m](i, j) = 1/2 g^{ml} (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<Matrix> christoffel(const MetricJet& jet);

/// d_c Gamma: result[c][m](i, j). Needs second partials of the metric.
std::vector<std::vector<Matrix>> christoffel_derivative(const MetricJet& jet);

/// R^m_{0ii} for i = 1..k (0 is the time direction), returned as a
/// (k+1) x k matrix whose column i-1 holds m = 0..k:
///   R^m_{0ii} = d_0 Gamma^m_ii - d_i Gamma^m_0i + Gamma^l_ii Gamma^m_0l - Gamma^l_0i Gamma^m_il.
/// With this convention the (1,1) case reduces to
/// (p_tt p_xx - p_xt^2) / (1 + p_t^2 + p_x^2)^2.
Matrix riemann_slice(const MetricJet& jet);

/// K(sigma_i) = sum_m R^m_{0ii} g_{m0} / (g_00 g_ii - g_0i^2), i = 1..k.
Vector time_sectional_curvatures(const MetricTensor& metric, const Matrix& riemann);

/// Gaussian curvature of a (1,1) graph from second partials.
double gaussian_curvature_11(const GraphEval& ge);

/// Time-sectional curvatures from the second fundamental form of the graph:
/// II_ab = N psi_ab with N the projector onto the normal space,
/// K(sigma_i) = (<II_00, II_ii> - |II_0i|^2) / (g_00 g_ii - g_0i^2).
Vector gauss_equation_curvatures(const GraphEval& ge, const MetricTensor& metric);

enum class CurvatureRoute { christoffel, gauss_equation, closed_11 };

std::string_view route_name(CurvatureRoute route);
/// Accepts "christoffel", "gauss" / "gauss_equation", "closed11" / "closed_11".
CurvatureRoute parse_route(std::string_view name);

struct CurvatureReport {
  Vector point;
  Vector p;
  MetricTensor metric;
  std::optional<std::vector<Matrix>> christoffel;  // christoffel route only
  std::optional<Matrix> riemann;                   // christoffel route only
  Vector K;                                        // K(sigma_2)..K(sigma_{k+1})
  CurvatureRoute route = CurvatureRoute::gauss_equation;
  GraphSource source = GraphSource::closed_form;
};

/// Derivative order of p each route needs.
int route_order(CurvatureRoute route);

/// Curvature report at (t, x). The christoffel route needs third partials and
/// is unavailable over the shooting solver; closed_11 requires k = m = 1.
CurvatureReport curvature_at(const SystemPtr& system, const IvfPtr& a, double t,
                             std::span<const double> x, CurvatureRoute route,
                             const GraphOptions& options = {});

/// Report from an existing graph evaluation.
CurvatureReport curvature_from_graph(const GraphEval& ge, CurvatureRoute route);

}  // namespace simcurv
