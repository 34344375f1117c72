#pragma once

#include <vector>

#include "simcurv/system.hpp"

namespace simcurv {

inline constexpr int kMaxAsymptoticOrder = 8;

/// Coefficients h_0..h_order of the slow-manifold expansion
///     h_eps(x) = h_0(x) + eps h_1(x) + eps^2 h_2(x) + ...
/// obtained by matching powers of eps in the invariance equation. Requires a
/// right-hand side that is affine in y in the fast-time form (see AffineSplit):
/// then
///     G1 h_0 = -g0,
///     G1 h_l = sum_{i<l} Dh_i f_{l-1-i},  f_0 = f0 + F1 h_0,  f_j = F1 h_j.
/// Each h_l is returned as a lift whose expansions are exact polynomial
/// arithmetic, so Dh_l carries no differencing error.
std::vector<IvfPtr> asymptotic_coefficients(const SystemPtr& system, int order);

/// The truncation a_order(u) = sum_{l <= order} eps^l h_l(u).
IvfPtr asymptotic_lift(const SystemPtr& system, int order);

}  // namespace simcurv
