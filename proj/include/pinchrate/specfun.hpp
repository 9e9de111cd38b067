#pragma once

// Real-argument special functions used by the ergodic-rate closed form:
// the inverse tangent integral Ti2, the real dilogarithm Li2 and a few
// cancellation-free elementary compositions. Everything is templated on the
// floating-point type so the test suite can re-run transcriptions in long
// double.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "pinchrate/errors.hpp"

namespace pinchrate::specfun {

/// Which evaluation path produced a value.
enum class Branch : std::uint8_t { series, inversion, reflection };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::series:
      return "series";
    case Branch::inversion:
      return "inversion";
    case Branch::reflection:
      return "reflection";
  }
  return "?";
}

template <std::floating_point T>
struct SpecialValue {
  T argument;
  T value;
  Branch branch;
};

namespace detail {

inline constexpr int kMaxSeriesTerms = 200;

template <std::floating_point T>
constexpr T series_cutoff() {
  return std::numeric_limits<T>::epsilon() / 16;
}

template <std::floating_point T>
void require_finite(T z, const char* fn) {
  if (!std::isfinite(z)) {
    throw DomainError(std::string(fn) + ": argument must be finite");
  }
}

// Ti2 on [0, 1/2] by its Maclaurin series; ratio <= 1/4.
template <std::floating_point T>
T ti2_maclaurin(T z) {
  const T z2 = z * z;
  T power = z;
  T sum = z;
  for (int n = 1; n < kMaxSeriesTerms; ++n) {
    power *= -z2;
    const T odd = static_cast<T>(2 * n + 1);
    const T term = power / (odd * odd);
    sum += term;
    if (std::fabs(term) <= series_cutoff<T>() * std::fabs(sum)) break;
  }
  return sum;
}

// Ti2 on (1/2, 1]. The plain alternating series decays only like 1/n^2 at
// z = 1, so sum it with the Cohen-Rodriguez Villegas-Zagier acceleration:
// a_k = z^(2k+1)/(2k+1)^2 is a moment sequence of a positive measure on
// [0, z^2], giving error ~ (3 + sqrt 8)^-n.
template <std::floating_point T>
T ti2_accelerated(T z) {
  const T rate = 3 + std::sqrt(T{8});
  const int n = static_cast<int>(std::ceil(std::log(T{4} / std::numeric_limits<T>::epsilon()) /
                                           std::log(rate))) + 1;
  T d = std::pow(rate, static_cast<T>(n));
  d = (d + 1 / d) / 2;
  T b = -1;
  T c = -d;
  T s = 0;
  const T z2 = z * z;
  T power = z;
  for (int k = 0; k < n; ++k) {
    const T odd = static_cast<T>(2 * k + 1);
    c = b - c;
    s += c * (power / (odd * odd));
    b = static_cast<T>(k + n) * static_cast<T>(k - n) * b /
        ((static_cast<T>(k) + T{0.5}) * static_cast<T>(k + 1));
    power *= z2;
  }
  return s / d;
}

template <std::floating_point T>
T ti2_unit(T z) {
  return z <= T{0.5} ? ti2_maclaurin(z) : ti2_accelerated(z);
}

// Li2 on [0, 1/2] by its defining series; ratio <= 1/2.
template <std::floating_point T>
T li2_series(T x) {
  T power = x;
  T sum = x;
  for (int n = 2; n <= kMaxSeriesTerms; ++n) {
    power *= x;
    const T nn = static_cast<T>(n);
    const T term = power / (nn * nn);
    sum += term;
    if (std::fabs(term) <= series_cutoff<T>() * std::fabs(sum)) break;
  }
  return sum;
}

// Li2 on [-1, 1], mapped onto [0, 1/2].
template <std::floating_point T>
SpecialValue<T> li2_unit(T x) {
  constexpr T pi2_6 = std::numbers::pi_v<T> * std::numbers::pi_v<T> / 6;
  if (x == 1) return {x, pi2_6, Branch::reflection};
  if (x < 0) {
    // Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, with x/(x-1) in (0, 1/2].
    const T l = std::log1p(-x);
    return {x, -li2_series(x / (x - 1)) - l * l / 2, Branch::reflection};
  }
  if (x <= T{0.5}) return {x, li2_series(x), Branch::series};
  // Euler reflection.
  return {x, pi2_6 - std::log(x) * std::log1p(-x) - li2_series(1 - x), Branch::reflection};
}

}  // namespace detail

/// Ti2(z) = integral_0^z atan(t)/t dt, with the branch that fired.
template <std::floating_point T>
SpecialValue<T> ti2_eval(T z) {
  detail::require_finite(z, "ti2");
  const T a = std::fabs(z);
  const T sign = std::signbit(z) ? T{-1} : T{1};
  if (a <= 1) return {z, sign * detail::ti2_unit(a), Branch::series};
  // Ti2(z) = Ti2(1/z) + (pi/2) ln z for z > 0.
  const T value = detail::ti2_unit(1 / a) + std::numbers::pi_v<T> / 2 * std::log(a);
  return {z, sign * value, Branch::inversion};
}

template <std::floating_point T>
T ti2(T z) {
  return ti2_eval(z).value;
}

/// Real dilogarithm on (-inf, 1].
template <std::floating_point T>
SpecialValue<T> li2_eval(T x) {
  detail::require_finite(x, "li2");
  if (x > 1) throw DomainError("li2: argument must be <= 1 (complex branch not supported)");
  if (x >= -1) return detail::li2_unit(x);
  // Li2(x) = -pi^2/6 - ln^2(-x)/2 - Li2(1/x) for x < -1.
  constexpr T pi2_6 = std::numbers::pi_v<T> * std::numbers::pi_v<T> / 6;
  const T l = std::log(-x);
  return {x, -pi2_6 - l * l / 2 - detail::li2_unit(1 / x).value, Branch::inversion};
}

template <std::floating_point T>
T li2(T x) {
  return li2_eval(x).value;
}

/// asinh without overflow in z*z for huge |z|.
template <std::floating_point T>
T asinh_safe(T z) {
  detail::require_finite(z, "asinh_safe");
  const T a = std::fabs(z);
  const T sign = std::signbit(z) ? T{-1} : T{1};
  // Past 1/sqrt(eps) the 1/(4 z^2) correction to ln(2|z|) is below rounding.
  if (a > 1 / std::sqrt(std::numeric_limits<T>::epsilon())) {
    return sign * (std::log(a) + std::numbers::ln2_v<T>);
  }
  return sign * std::log1p(a + a * a / (1 + std::sqrt(1 + a * a)));
}

/// sqrt(1 + t) - 1 with full relative accuracy as t -> 0.
template <std::floating_point T>
T sqrt1p_minus1(T t) {
  detail::require_finite(t, "sqrt1p_minus1");
  if (t < 0) throw DomainError("sqrt1p_minus1: argument must be >= 0");
  return t / (std::sqrt(1 + t) + 1);
}

/// z - atan(z), series below |z| = 1/2 where the subtraction cancels.
template <std::floating_point T>
T z_minus_atan(T z) {
  detail::require_finite(z, "z_minus_atan");
  if (std::fabs(z) >= T{0.5}) return z - std::atan(z);
  const T z2 = z * z;
  T power = z * z2;
  T sum = power / 3;
  for (int n = 2; n < detail::kMaxSeriesTerms; ++n) {
    power *= -z2;
    const T term = power / static_cast<T>(2 * n + 1);
    sum += term;
    if (std::fabs(term) <= detail::series_cutoff<T>() * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace pinchrate::specfun
