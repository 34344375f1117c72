#include "simcurv/sweep.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

enum class Failure { none, invalid, numerical, unsupported, other };

struct NodeError {
  Failure kind = Failure::none;
  std::string message;
};

void check_inputs(const SystemPtr& system, const IvfPtr& a, const GridSpec& grid) {
  if (!system || !a) throw InvalidArgument("sweep: system and lift are required");
  grid.validate();
  if (grid.slow_dim() != system->slow_dim())
    throw InvalidArgument(system->name() + ": grid has " + std::to_string(grid.slow_dim()) +
                          " x axes, model has " + std::to_string(system->slow_dim()));
}

NodeResult eval_node(const SystemPtr& system, const IvfPtr& a, const Vector& z,
                     const SweepOptions& opt) {
  const auto rep = curvature_at(system, a, z[0], std::span<const double>(z.data() + 1, z.size() - 1),
                                opt.route, opt.graph);
  return {z, rep.p, rep.K, rep.source};
}

NodeError capture(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return {Failure::invalid, e.what()};
  if (dynamic_cast<const Unsupported*>(&e)) return {Failure::unsupported, e.what()};
  if (dynamic_cast<const NumericalFailure*>(&e)) return {Failure::numerical, e.what()};
  return {Failure::other, e.what()};
}

[[noreturn]] void rethrow_at(const NodeError& err, const Vector& z) {
  std::ostringstream msg;
  msg << "node (";
  for (Eigen::Index i = 0; i < z.size(); ++i) msg << (i ? ", " : "") << z[i];
  msg << "): " << err.message;
  switch (err.kind) {
    case Failure::invalid: throw InvalidArgument(msg.str());
    case Failure::unsupported: throw Unsupported(msg.str());
    default: throw NumericalFailure(msg.str());
  }
}

}  // namespace

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

std::vector<NodeResult> curvature_sweep_serial(const SystemPtr& system, const IvfPtr& a,
                                               const GridSpec& grid, const SweepOptions& options) {
  check_inputs(system, a, grid);
  const std::size_t n = grid.node_count();
  std::vector<NodeResult> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector z = grid.node(i);
    try {
      out.push_back(eval_node(system, a, z, options));
    } catch (const std::exception& e) {
      rethrow_at(capture(e), z);
    }
  }
  return out;
}

std::vector<NodeResult> curvature_sweep(const SystemPtr& system, const IvfPtr& a,
                                        const GridSpec& grid, const SweepOptions& options) {
  check_inputs(system, a, grid);
  const auto n = static_cast<long>(grid.node_count());
  std::vector<NodeResult> out(static_cast<std::size_t>(n));
  std::vector<NodeError> errors(static_cast<std::size_t>(n));
  const int threads = resolve_jobs(options.jobs);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Vector z = grid.node(idx);
    try {
      out[idx] = eval_node(system, a, z, options);
    } catch (const std::exception& e) {
      errors[idx] = capture(e);
    }
  }

  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i].kind != Failure::none) rethrow_at(errors[i], grid.node(i));
  return out;
}

SweepSummary summarize(const std::vector<NodeResult>& nodes) {
  SweepSummary s;
  s.node_count = nodes.size();
  if (nodes.empty()) return s;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (const auto& nd : nodes) {
    for (Eigen::Index i = 0; i < nd.K.size(); ++i) {
      const double v = std::abs(nd.K[i]);
      s.max_abs_K = std::max(s.max_abs_K, v);
      sum += v;
      ++count;
    }
    sum2 += std::abs(nd.K[0]);
  }
  s.mean_abs_K = count ? sum / static_cast<double>(count) : 0.0;
  s.mean_abs_K2 = sum2 / static_cast<double>(nodes.size());
  return s;
}

double curvature_integral(const SystemPtr& system, const IvfPtr& a, const GridSpec& grid,
                          const SweepOptions& options) {
  return summarize(curvature_sweep(system, a, grid, options)).mean_abs_K2;
}

}  // namespace simcurv
