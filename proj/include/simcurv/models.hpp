#pragma once

#include <string>
#include <vector>

#include "simcurv/system.hpp"

namespace simcurv {

// (1,1) Davis-Skodje model, gamma = 1/eps > 1:
//   x' = -x,  y' = -gamma y + ((gamma-1) x + gamma x^2) / (1+x)^2.
SystemPtr make_davis_skodje(double gamma);

// (1,1) nonlinear model x' = -eps x, y' = x^2 - y, 0 < eps < 1/2.
SystemPtr make_kuehn_nonlinear(double eps);

// (1,1) Michaelis-Menten-Henri enzyme kinetics, kappa > lambda > 0, eps > 0:
//   x' = eps (-x + (x + kappa - lambda) y),  y' = x - (x + kappa) y.
SystemPtr make_enzyme_mmh(double lambda, double kappa, double eps);

// (2,1) extension of Davis-Skodje with a second slow variable, gamma > 2.
SystemPtr make_ds_2_1(double gamma);

// (3,2) model with polynomial fast equations, 0 < eps < 1/2.
SystemPtr make_model_3_2(double eps);

/// Truncation order used for the enzyme model's slow manifold lift, which has
/// no closed form.
inline constexpr int kEnzymeSlowManifoldOrder = 8;

}  // namespace simcurv
