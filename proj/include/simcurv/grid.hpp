#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "simcurv/system.hpp"

namespace simcurv {

struct GridAxis {
  std::string name;
  double start = 0.0;
  double end = 0.0;
  int count = 1;

  double value(int i) const;
};

/// Rectangular equidistant grid over (t, x_1..x_k). Axis 0 is time.
struct GridSpec {
  std::vector<GridAxis> axes;

  /// Parses "t=0:2:10,x1=0:3:20" (name=start:end:count). Axes must be t, x1..xk
  /// in this order.
  static GridSpec parse(std::string_view text);
  /// Same axis bounds and counts for every slow coordinate.
  static GridSpec uniform(int k, double t0, double t1, int nt, double x0, double x1, int nx);

  int slow_dim() const { return static_cast<int>(axes.size()) - 1; }
  std::size_t node_count() const;
  /// Node i in row-major order (t slowest, x_k fastest).
  Vector node(std::size_t index) const;
  std::string to_string() const;
  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace simcurv
