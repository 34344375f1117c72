#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "simcurv/system.hpp"

namespace testing {

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  simcurv::Vector vector(int n, double lo, double hi) {
    simcurv::Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline double max_abs_diff(const simcurv::Matrix& a, const simcurv::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing
