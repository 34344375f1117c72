#pragma once

#include <vector>

#include "simcurv/geometry.hpp"
#include "simcurv/grid.hpp"

namespace simcurv {

struct NodeResult {
  Vector point;  // (t, x)
  Vector p;
  Vector K;      // K(sigma_2)..K(sigma_{k+1})
  GraphSource source = GraphSource::closed_form;
};

struct SweepOptions {
  CurvatureRoute route = CurvatureRoute::gauss_equation;
  GraphOptions graph{};
  int jobs = 0;  // <= 0: all available threads
};

/// Curvature at every grid node, one node after another.
std::vector<NodeResult> curvature_sweep_serial(const SystemPtr& system, const IvfPtr& a,
                                               const GridSpec& grid, const SweepOptions& options);

/// Same result computed with OpenMP over the nodes. Output order and values do
/// not depend on the thread count. A failing node aborts the sweep; the error
/// reports the failing node with the smallest index and its coordinates.
std::vector<NodeResult> curvature_sweep(const SystemPtr& system, const IvfPtr& a,
                                        const GridSpec& grid, const SweepOptions& options);

struct SweepSummary {
  double max_abs_K = 0.0;
  double mean_abs_K = 0.0;   // over all nodes and all K components
  double mean_abs_K2 = 0.0;  // over all nodes, first component only
  std::size_t node_count = 0;
};

SweepSummary summarize(const std::vector<NodeResult>& nodes);

/// Node mean of |K(sigma_2)| over the grid.
double curvature_integral(const SystemPtr& system, const IvfPtr& a, const GridSpec& grid,
                          const SweepOptions& options = {});

/// Number of threads `jobs` resolves to.
int resolve_jobs(int jobs);

}  // namespace simcurv
