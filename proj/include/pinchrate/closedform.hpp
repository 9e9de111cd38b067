#pragma once

// Closed-form ergodic rate of the two-state pinching-antenna system.
//
// With eps ~ U[-delta/2, delta/2] and y ~ U[-D_y/2, D_y/2],
//
//   R = 4 / (delta D_y ln 2) * (I_i(C + h^2) + I_j(C + h^2) - I_i(h^2) - I_j(h^2)),
//
//   I_i(x) = int_0^{D_y/2} (delta/2) ln(delta^2/4 + x + y^2) dy,
//   I_j(x) = int_0^{D_y/2} 2 sqrt(x + y^2) atan(delta / (2 sqrt(x + y^2))) dy,
//
// and I_j splits (integration by parts) into two boundary terms plus
//
//   J_1 = int_0^{D_y/2} delta y^2 / (2 (x + y^2 + delta^2/4)) dy,
//   J_2 = int_0^{D_y/2} delta x y ln(y + sqrt(x + y^2))
//                       / (2 sqrt(x + y^2) (x + y^2 + delta^2/4)) dy.
//
// Notation used below, all exact:
//   s = D_y / (2 sqrt x) = sinh A,   a = 2 sqrt(x) / delta,
//   p = (delta / (2 sqrt x)) (sqrt(1 + 4x/delta^2) - 1) = tan(atan(a) / 2).
// The direct form of J_2 is x [ (ln sqrt x + A) atan(a cosh A) - ln sqrt x atan(a)
// - (pi/2) A + four Ti_2 terms ]. Using Ti_2 oddness and inversion the four
// Ti_2 terms collapse to
//   H(A) = (pi/2) A + Ti_2(p e^-A) - Ti_2(p e^A) = int_0^A atan(1/(a cosh u)) du,
// and J_2 = x (ln sqrt x * Delta + K) with
//   Delta = atan(a cosh A) - atan(a),   K = H(A) - A atan(1/(a cosh A)) >= 0.
// Evaluated that way the large (pi/2) A and ln sqrt x pieces never get
// subtracted numerically. For A < 1/2, K = int_0^A u * a sinh u / (1 + a^2 cosh^2 u) du
// is itself O(A^3) and is summed from its Taylor series instead. For
// a > 2 it is summed from the expansion of atan in powers of sech(u) / a.

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "pinchrate/errors.hpp"
#include "pinchrate/model.hpp"
#include "pinchrate/specfun.hpp"

namespace pinchrate {

enum class Method : std::uint8_t { closed_form, monte_carlo, quadrature };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form:
      return "closed_form";
    case Method::monte_carlo:
      return "monte_carlo";
    case Method::quadrature:
      return "quadrature";
  }
  return "?";
}

/// Ergodic rate in bits/s/Hz. std_error is nonzero only for Monte Carlo.
struct RateResult {
  double rate = 0;
  Method method = Method::closed_form;
  double std_error = 0;
};

/// Pinching discretization efficiency R / R_c.
struct PdeResult {
  double efficiency = 0;
  double discrete_rate = 0;
  double continuous_rate = 0;
  double std_error = 0;  // of `efficiency`; Monte Carlo only
};

namespace closedform {

namespace detail {

template <std::floating_point T>
void require_positive(T x, T delta, T d_y) {
  auto ok = [](T v) { return std::isfinite(v) && v > 0; };
  if (!ok(x)) throw DomainError("closed form: x must be finite and > 0");
  if (!ok(delta)) throw DomainError("closed form: delta must be finite and > 0");
  if (!ok(d_y)) throw DomainError("closed form: D_y must be finite and > 0");
}

/// Shared exact building blocks of the I_j / J_2 evaluation.
template <std::floating_point T>
struct AsinhGeometry {
  T sqrt_x;
  T s;           // sinh A
  T asinh_s;     // A
  T cosh_a;      // cosh A = sqrt(1 + s^2)
  T cosh_m1;     // cosh A - 1
  T a;           // 2 sqrt(x) / delta

  AsinhGeometry(T x, T delta, T d_y) {
    sqrt_x = std::sqrt(x);
    s = d_y / (2 * sqrt_x);
    asinh_s = specfun::asinh_safe(s);
    cosh_a = std::sqrt(1 + s * s);
    cosh_m1 = s * s / (cosh_a + 1);
    a = 2 * sqrt_x / delta;
  }

  /// atan(a cosh A) - atan(a).
  T atan_gap() const { return std::atan(a * cosh_m1 / (1 + a * a * cosh_a)); }

  /// atan(1 / (a cosh A)) = atan(delta / (2 sqrt(x + D_y^2/4))).
  T edge_angle() const { return std::atan(1 / (a * cosh_a)); }
};

inline constexpr double kSeriesAsinhLimit = 0.5;
inline constexpr int kMaxTaylorTerms = 80;

// K(A) = int_0^A u w(u) du, w(u) = a sinh u / (1 + a^2 cosh^2 u), by Taylor
// series in v = u^2. Singularities of w sit at |u| >= pi/2, so for A < 1/2
// the ratio of successive terms is below 0.1.
template <std::floating_point T>
T k_series(T a, T big_a) {
  // w(u) = u * N(v) / D(v), scaled so that D(0) stays O(1) for any a.
  const bool large = a >= 1;
  const T num_scale = large ? 1 / a : a;
  const T den_scale = large ? T{1} : a * a;
  const T den0 = large ? 1 / (a * a) + 1 : 1 + a * a;

  std::array<T, kMaxTaylorTerms> num{};
  std::array<T, kMaxTaylorTerms> den{};
  std::array<T, kMaxTaylorTerms> c{};
  // sinh u / u = sum v^k / (2k+1)!,  cosh^2 u = 1 + sum_{k>=1} 2^(2k-1) v^k / (2k)!
  T inv_fact_odd = 1;   // 1/(2k+1)!
  T even_term = 1;      // 2^(2k-1) / (2k)!, built up from k = 1
  num[0] = num_scale;
  den[0] = den0;
  for (int k = 1; k < kMaxTaylorTerms; ++k) {
    inv_fact_odd /= static_cast<T>((2 * k) * (2 * k + 1));
    even_term = k == 1 ? T{1} : even_term * 4 / static_cast<T>((2 * k - 1) * (2 * k));
    num[k] = num_scale * inv_fact_odd;
    den[k] = den_scale * even_term;
  }

  const T v = big_a * big_a;
  T v_pow = big_a * v;  // A^(2k+3) at k = 0
  T sum = 0;
  for (int k = 0; k < kMaxTaylorTerms; ++k) {
    T acc = num[k];
    for (int j = 1; j <= k; ++j) acc -= den[j] * c[k - j];
    c[k] = acc / den[0];
    const T term = c[k] * v_pow / static_cast<T>(2 * k + 3);
    sum += term;
    if (std::fabs(term) <= std::numeric_limits<T>::epsilon() / 16 * std::fabs(sum)) break;
    v_pow *= v;
  }
  return sum;
}

// K(A) for a > 2 from atan(t) = sum (-1)^n t^(2n+1) / (2n+1), t = sech(u) / a:
//   K = sum (-1)^n a^-(2n+1) / (2n+1) (S_{2n+1}(A) - A sech^(2n+1) A),
// S_m(A) = int_0^A sech^m u du, S_1 = gd(A),
// S_{m+2} = sech^m A tanh A / (m+1) + m/(m+1) S_m.
// The Ti_2 form computes H as a difference of O(A) terms, losing about
// log10(a) digits, so it is kept for small a only.
template <std::floating_point T>
T k_sech_series(const AsinhGeometry<T>& g) {
  const T sech = 1 / g.cosh_a;
  const T tanh = g.s / g.cosh_a;
  const T inv_a2 = 1 / (g.a * g.a);
  T s_m = 2 * std::atan(g.s / (g.cosh_a + 1));
  T sech_m = sech;
  T a_pow = 1 / g.a;
  T sum = 0;
  for (int n = 0; n < kMaxTaylorTerms; ++n) {
    const int m = 2 * n + 1;
    const T term = a_pow / static_cast<T>(m) * (s_m - g.asinh_s * sech_m);
    sum += n % 2 == 0 ? term : -term;
    if (std::fabs(term) <= std::numeric_limits<T>::epsilon() / 16 * std::fabs(sum)) break;
    s_m = sech_m * tanh / static_cast<T>(m + 1) + static_cast<T>(m) / static_cast<T>(m + 1) * s_m;
    sech_m *= sech * sech;
    a_pow *= inv_a2;
  }
  return sum;
}

inline constexpr double kSechSeriesMinA = 2;

// H(A) through the Ti_2 closed form.
template <std::floating_point T>
T h_closed(const AsinhGeometry<T>& g, T x, T delta) {
  const T r = delta / (2 * g.sqrt_x);
  const T p = r * specfun::sqrt1p_minus1(4 * x / (delta * delta));
  const T e_a = g.s + g.cosh_a;  // e^A
  return std::numbers::pi_v<T> / 2 * g.asinh_s + specfun::ti2(p / e_a) - specfun::ti2(p * e_a);
}

template <std::floating_point T>
struct HkPair {
  T h;
  T k;
};

template <std::floating_point T>
HkPair<T> h_and_k(const AsinhGeometry<T>& g, T x, T delta) {
  const T edge = g.asinh_s * g.edge_angle();
  if (g.asinh_s < static_cast<T>(kSeriesAsinhLimit)) {
    const T k = k_series(g.a, g.asinh_s);
    return {edge + k, k};
  }
  if (g.a > static_cast<T>(kSechSeriesMinA)) {
    const T k = k_sech_series(g);
    return {edge + k, k};
  }
  const T h = h_closed(g, x, delta);
  return {h, h - edge};
}

}  // namespace detail

/// I_i(x) = (delta D_y / 4) ln(D_y^2/4 + delta^2/4 + x) - delta D_y / 2
///          + delta sqrt(delta^2/4 + x) atan(D_y / (2 sqrt(x + delta^2/4))),
/// with the last two terms merged through z - atan z.
template <std::floating_point T>
T integral_ii(T x, T delta, T d_y) {
  detail::require_positive(x, delta, d_y);
  const T q = x + delta * delta / 4;
  const T sq = std::sqrt(q);
  const T z = d_y / (2 * sq);
  return delta * d_y / 4 * std::log(q + d_y * d_y / 4) - delta * sq * specfun::z_minus_atan(z);
}

/// J_1 = delta D_y / 4 - (delta/2) sqrt(x + delta^2/4) atan(D_y / (2 sqrt(x + delta^2/4))).
template <std::floating_point T>
T integral_j1(T x, T delta, T d_y) {
  detail::require_positive(x, delta, d_y);
  const T sq = std::sqrt(x + delta * delta / 4);
  return delta / 2 * sq * specfun::z_minus_atan(d_y / (2 * sq));
}

template <std::floating_point T>
T integral_j2(T x, T delta, T d_y) {
  detail::require_positive(x, delta, d_y);
  const detail::AsinhGeometry<T> g(x, delta, d_y);
  const T log_sqrt_x = std::log(x) / 2;
  const auto hk = detail::h_and_k(g, x, delta);
  return x * (log_sqrt_x * g.atan_gap() + hk.k);
}

/// The two boundary terms of the by-parts split of I_j.
template <std::floating_point T>
T integral_ij_boundary(T x, T delta, T d_y) {
  detail::require_positive(x, delta, d_y);
  const T half = d_y / 2;
  const T s = std::sqrt(x + half * half);
  const T log_sqrt_x = std::log(x) / 2;
  return std::atan(delta / (2 * s)) * (half * s + x * std::log(half + s)) -
         x * log_sqrt_x * std::atan(delta / (2 * std::sqrt(x)));
}

/// I_j = boundary terms + J_1 + J_2.
template <std::floating_point T>
T integral_ij(T x, T delta, T d_y) {
  return integral_ij_boundary(x, delta, d_y) + integral_j1(x, delta, d_y) +
         integral_j2(x, delta, d_y);
}

/// I_i(x) + I_j(x): the antiderivative-in-x combination entering the rate.
template <std::floating_point T>
T rate_kernel(T x, T delta, T d_y) {
  return integral_ii(x, delta, d_y) + integral_ij(x, delta, d_y);
}

}  // namespace closedform

/// Closed-form ergodic rate of the discrete system.
inline RateResult ergodic_rate(const SystemConfig& cfg) {
  const double h2 = cfg.h() * cfg.h();
  const double delta = cfg.delta();
  const double d_y = cfg.d_y();
  const double upper = closedform::rate_kernel(cfg.snr_scale() + h2, delta, d_y);
  const double lower = closedform::rate_kernel(h2, delta, d_y);
  const double rate = 4.0 / (delta * d_y * std::numbers::ln2) * (upper - lower);
  return {rate, Method::closed_form, 0.0};
}

/// Ergodic rate with a PA formed exactly above the user (delta -> 0):
///   R_c = 2 / (D_y ln 2) int_0^{D_y/2} ln(1 + C/(h^2 + y^2)) dy
///       = 2 / (D_y ln 2) [y ln((h^2+C+y^2)/(h^2+y^2))
///                         + 2 s atan(y/s) - 2 h atan(y/h)]_{y = D_y/2},  s = sqrt(h^2 + C).
inline RateResult continuous_rate(const SystemConfig& cfg) {
  const double h = cfg.h();
  const double c = cfg.snr_scale();
  const double y = cfg.d_y() / 2;
  const double s = std::sqrt(h * h + c);
  const double s_minus_h = c / (s + h);
  // 2 [s atan(y/s) - h atan(y/h)] regrouped so nothing O(1) cancels as C -> 0.
  const double arc = 2.0 * (s_minus_h * std::atan(y / s) -
                            h * std::atan(y * s_minus_h / (s * h + y * y)));
  const double antiderivative = y * std::log1p(c / (h * h + y * y)) + arc;
  return {2.0 / (cfg.d_y() * std::numbers::ln2) * antiderivative, Method::closed_form, 0.0};
}

inline PdeResult pde(const SystemConfig& cfg) {
  const double discrete = ergodic_rate(cfg).rate;
  const double continuous = continuous_rate(cfg).rate;
  return {discrete / continuous, discrete, continuous, 0.0};
}

}  // namespace pinchrate
