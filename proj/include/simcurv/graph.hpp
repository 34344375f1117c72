#pragma once

#include <span>
#include <vector>

#include "simcurv/bvp.hpp"
#include "simcurv/system.hpp"

namespace simcurv {

enum class GraphSource { closed_form, finite_difference };
enum class GraphMode { automatic, closed, numeric };
/// What finite differences are taken over in numeric mode.
enum class FdBase { bvp, closed_p };

/// p(t, x; a) and its partials at one point. Coordinates are z = (t, x_1..x_k),
/// index 0 is time.
struct GraphEval {
  Vector point;                          // k+1
  Vector p;                              // m
  Matrix d1;                             // m x (k+1)
  std::vector<Matrix> d2;                // per component, (k+1) x (k+1)
  std::vector<std::vector<Matrix>> d3;   // d3[r][i](j, l); empty unless order 3
  GraphSource source = GraphSource::closed_form;
  int order = 1;

  int slow_dim() const { return static_cast<int>(point.size()) - 1; }
  int fast_dim() const { return static_cast<int>(p.size()); }
};

struct GraphOptions {
  GraphMode mode = GraphMode::automatic;
  FdBase fd_base = FdBase::bvp;  // used by numeric mode (and automatic without closed p)
  BvpConfig bvp{};
  double symmetry_tol = 1e-6;
};

/// Central finite-difference steps, multiplied by max(1, |z_i|).
struct FdSteps {
  static constexpr double first = 1e-6;
  static constexpr double second = 1e-4;
  static constexpr double third = 1e-3;
  static constexpr double bvp = 1e-3;  // first and second partials over shooting
};

/// Evaluates p and its partials up to `order` (1..3).
///
/// closed: exact partials of the model's closed parameterization (Taylor jets).
/// numeric: central differences over solve_bvp or over the closed p.
/// automatic: closed when the model has a closed parameterization, else
/// differences over solve_bvp.
///
/// Third partials over solve_bvp are not supported. Shooting failures are
/// rethrown with the offending stencil point.
GraphEval eval_graph(const SystemPtr& system, const IvfPtr& a, double t, std::span<const double> x,
                     int order, const GraphOptions& options = {});

/// p alone: closed form when available, otherwise a boundary value solve.
Vector eval_p(const SystemPtr& system, const IvfPtr& a, double t, std::span<const double> x,
              const BvpConfig& bvp = {});

/// [I; d1], the (k+1+m) x (k+1) differential of the immersion (t, x) -> (t, x, p).
Matrix immersion_jacobian(const GraphEval& ge);

/// Largest |d2[r](i,j) - d2[r](j,i)| and the analogous defect of d3.
double symmetry_defect(const GraphEval& ge);

}  // namespace simcurv
