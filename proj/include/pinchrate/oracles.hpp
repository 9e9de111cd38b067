#pragma once

// Quadrature-based rate oracles. These integrate the defining expectations
// directly and share nothing with the closed-form path beyond SystemConfig.

#include <cmath>
#include <numbers>

#include "pinchrate/closedform.hpp"
#include "pinchrate/model.hpp"
#include "pinchrate/montecarlo.hpp"
#include "pinchrate/quadrature.hpp"

namespace pinchrate::oracles {

using montecarlo::mc_ergodic_rate;
using montecarlo::mc_pde;
using montecarlo::McConfig;
using montecarlo::Sampling;
using quadrature::quad_1d;
using quadrature::quad_2d;
using quadrature::QuadResult;

/// R = 4/(delta D_y ln 2) int_0^{D_y/2} int_0^{delta/2} ln(1 + C/(eps^2 + y^2 + h^2)) d eps dy.
inline RateResult quad_ergodic_rate(const SystemConfig& cfg, double rel_tol = 1e-9) {
  const double c = cfg.snr_scale();
  const double h2 = cfg.h() * cfg.h();
  auto integrand = [&](double y, double eps) { return std::log1p(c / (eps * eps + y * y + h2)); };
  const quadrature::Rect rect{0.0, cfg.d_y() / 2, 0.0, cfg.delta() / 2};
  const auto r = quad_2d(integrand, rect, rel_tol);
  return {4.0 / (cfg.delta() * cfg.d_y() * std::numbers::ln2) * r.value, Method::quadrature, 0.0};
}

/// R_c = 2/(D_y ln 2) int_0^{D_y/2} ln(1 + C/(h^2 + y^2)) dy.
inline RateResult quad_continuous_rate(const SystemConfig& cfg, double rel_tol = 1e-10) {
  const double c = cfg.snr_scale();
  const double h2 = cfg.h() * cfg.h();
  auto integrand = [&](double y) { return std::log1p(c / (y * y + h2)); };
  const auto r = quad_1d(integrand, 0.0, cfg.d_y() / 2, rel_tol);
  return {2.0 / (cfg.d_y() * std::numbers::ln2) * r.value, Method::quadrature, 0.0};
}

inline PdeResult quad_pde(const SystemConfig& cfg, double rel_tol = 1e-9) {
  const double d = quad_ergodic_rate(cfg, rel_tol).rate;
  const double c = quad_continuous_rate(cfg, rel_tol / 10).rate;
  return {d / c, d, c, 0.0};
}

}  // namespace pinchrate::oracles
