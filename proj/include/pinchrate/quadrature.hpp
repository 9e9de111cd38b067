#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature, used as the
// independent numerical oracle for every integral the closed form replaces.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "pinchrate/errors.hpp"

namespace pinchrate::quadrature {

struct QuadResult {
  double value = 0;
  double abs_error_estimate = 0;
  long evaluations = 0;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_intervals = 4000;
};

namespace detail {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;  // integral of |f|, for the roundoff floor

  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gauss_kronrod_21(F& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(center);
  double kronrod = wk[0] * f0;
  double gauss = 0;  // the 10-point Gauss rule has no centre node
  double l1 = wk[0] * std::fabs(f0);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    const double lo = f(center - dx);
    const double hi = f(center + dx);
    kronrod += wk[i] * (lo + hi);
    l1 += wk[i] * (std::fabs(lo) + std::fabs(hi));
    if (i % 2 == 1) gauss += wg[i / 2] * (lo + hi);
  }
  return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half), l1 * std::fabs(half)};
}

}  // namespace detail

/// Integrate f over [a, b] to |error| <= max(rel_tol |I|, abs_tol).
///
/// Bisects the panel with the largest |K21 - G10| until the summed estimate
/// meets the tolerance. A panel whose estimate is already at the rounding
/// level of its own integral of |f| is not refined further. Throws
/// ConvergenceError (with the best estimate) once max_intervals is reached.
template <typename F>
  requires std::invocable<F&, double>
QuadResult quad_1d(F&& f, double a, double b, const QuadOptions& opt = {}) {
  if (!(std::isfinite(a) && std::isfinite(b)) || a > b) {
    throw DomainError("quad_1d: need finite a <= b");
  }
  if (a == b) return {0.0, 0.0, 1};

  constexpr double kRoundoff = 50 * std::numeric_limits<double>::epsilon();
  constexpr long kNodes = 21;

  std::priority_queue<detail::Panel> open;
  std::vector<detail::Panel> settled;
  double total = 0;
  double error = 0;
  long evaluations = 0;

  auto push = [&](const detail::Panel& p) {
    if (!std::isfinite(p.value)) {
      throw DomainError("quad_1d: integrand not finite on [" + std::to_string(p.a) + ", " +
                        std::to_string(p.b) + "]");
    }
    total += p.value;
    if (p.error <= kRoundoff * p.l1) {
      settled.push_back(p);
    } else {
      error += p.error;
      open.push(p);
    }
  };

  push(detail::gauss_kronrod_21(f, a, b));
  evaluations += kNodes;
  int intervals = 1;

  auto converged = [&] { return error <= std::max(opt.rel_tol * std::fabs(total), opt.abs_tol); };

  while (!open.empty() && !converged()) {
    if (intervals >= opt.max_intervals) {
      throw ConvergenceError("quad_1d: subdivision limit reached", total, error);
    }
    const detail::Panel worst = open.top();
    open.pop();
    total -= worst.value;
    error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    push(detail::gauss_kronrod_21(f, worst.a, mid));
    push(detail::gauss_kronrod_21(f, mid, worst.b));
    evaluations += 2 * kNodes;
    ++intervals;
  }

  // Re-sum from scratch; the running total has accumulated add/remove noise.
  double value = 0;
  double err = 0;
  for (const auto& p : settled) {
    value += p.value;
    err += p.error;
  }
  while (!open.empty()) {
    value += open.top().value;
    err += open.top().error;
    open.pop();
  }
  return {value, err, evaluations};
}

template <typename F>
  requires std::invocable<F&, double>
QuadResult quad_1d(F&& f, double a, double b, double rel_tol) {
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  return quad_1d(std::forward<F>(f), a, b, opt);
}

struct Rect {
  double u0, u1;  // outer variable
  double v0, v1;  // inner variable
};

/// Nested adaptive quadrature of f(u, v) over a rectangle. The inner
/// integrals run one order of magnitude tighter than rel_tol so the outer
/// estimate dominates the error budget.
template <typename F>
  requires std::invocable<F&, double, double>
QuadResult quad_2d(F&& f, const Rect& rect, double rel_tol = 1e-9) {
  long evaluations = 0;
  double inner_error = 0;
  QuadOptions inner_opt;
  inner_opt.rel_tol = rel_tol / 10;
  auto outer = [&](double u) {
    auto g = [&](double v) { return f(u, v); };
    const QuadResult r = quad_1d(g, rect.v0, rect.v1, inner_opt);
    evaluations += r.evaluations;
    inner_error = std::max(inner_error, r.abs_error_estimate);
    return r.value;
  };
  QuadOptions outer_opt;
  outer_opt.rel_tol = rel_tol;
  const QuadResult r = quad_1d(outer, rect.u0, rect.u1, outer_opt);
  return {r.value, r.abs_error_estimate + inner_error * (rect.u1 - rect.u0), evaluations};
}

}  // namespace pinchrate::quadrature
