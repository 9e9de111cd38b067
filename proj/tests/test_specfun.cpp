#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pinchrate/specfun.hpp"
#include "support/integrands.hpp"

using namespace pinchrate;
using namespace pinchrate::specfun;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Catalan's constant from sum (-1)^n/(2n+1)^2 by repeated averaging of
// consecutive partial sums (iterated Euler transform), in long double.
long double catalan_by_averaging() {
  constexpr int kTerms = 60;
  std::vector<long double> partial(kTerms);
  long double s = 0;
  for (int n = 0; n < kTerms; ++n) {
    const long double odd = 2.0L * n + 1;
    s += (n % 2 == 0 ? 1.0L : -1.0L) / (odd * odd);
    partial[n] = s;
  }
  for (int level = 0; level < kTerms - 1; ++level) {
    for (int i = 0; i + 1 < kTerms - level; ++i) partial[i] = (partial[i] + partial[i + 1]) / 2;
  }
  return partial[0];
}

}  // namespace

TEST_CASE("ti2 special values", "[specfun]") {
  CHECK(ti2(0.0) == 0.0);

  const double catalan = static_cast<double>(catalan_by_averaging());
  CHECK_THAT(catalan, WithinAbs(0.9159655941772190, 1e-15));
  CHECK_THAT(ti2(1.0), WithinAbs(catalan, 1e-13));
  CHECK(ti2(-1.0) == -ti2(1.0));

  // int_0^3 atan(t)/t dt, 30-digit adaptive quadrature.
  CHECK_THAT(ti2(3.0), WithinAbs(2.0550701160805891255, 1e-13));
  CHECK_THAT(ti2(3.0), WithinAbs(testing::quad_ti2(3.0), 1e-12));
  CHECK_THAT(ti2(0.5), WithinAbs(0.48722235829452235711, 1e-15));
}

TEST_CASE("ti2 branch selection and domain", "[specfun]") {
  CHECK(ti2_eval(0.3).branch == Branch::series);
  CHECK(ti2_eval(-1.0).branch == Branch::series);
  CHECK(ti2_eval(1.0000001).branch == Branch::inversion);
  CHECK(ti2_eval(-40.0).branch == Branch::inversion);
  CHECK(ti2_eval(2.5).argument == 2.5);
  CHECK_THROWS_AS(ti2(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(ti2(std::nan("")), DomainError);
}

TEST_CASE("ti2 is odd and satisfies the inversion identity", "[specfun][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> any(-50.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const double z = any(rng);
    CHECK(ti2(-z) == -ti2(z));
  }
  std::uniform_real_distribution<double> log_z(std::log(1.001), std::log(1e4));
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double z = std::exp(log_z(rng));
    worst = std::max(worst, std::fabs(ti2(z) - ti2(1 / z) - std::numbers::pi / 2 * std::log(z)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("ti2 agrees with its defining integral", "[specfun][oracle]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double z = dist(rng);
    CHECK_THAT(ti2(z), WithinAbs(testing::quad_ti2(z), 1e-10));
  }
  // Near |z| = 1, where the plain series is slowest.
  for (double z : {0.55, 0.8, 0.95, 0.999, 1.001, 1.3, 1.9}) {
    CHECK_THAT(ti2(z), WithinAbs(testing::quad_ti2(z), 2e-14));
  }
}

TEST_CASE("ti2 keeps absolute accuracy out to 1e6", "[specfun][oracle]") {
  for (double z : {10.0, 1e3, 1e6}) {
    const double reference = testing::quad_ti2(1.0, 1e-15) +
                             testing::quad_or_throw([](double t) { return std::atan(t) / t; },
                                                    1.0, z, 1e-15);
    CHECK_THAT(ti2(z), WithinAbs(reference, 1e-13));
  }
}

TEST_CASE("ti2 is strictly increasing on [0, inf)", "[specfun][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 200.0);
  std::vector<double> grid(2000);
  for (auto& z : grid) z = dist(rng);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] - grid[i - 1] > 1e-9) CHECK(ti2(grid[i]) > ti2(grid[i - 1]));
  }
}

TEST_CASE("li2 special values and domain", "[specfun]") {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(li2(0.0) == 0.0);
  CHECK_THAT(li2(1.0), WithinAbs(pi2 / 6, 1e-15));
  CHECK_THAT(li2(-1.0), WithinAbs(-pi2 / 12, 1e-15));
  // mpmath polylog(2, .) at 35 digits.
  CHECK_THAT(li2(0.3), WithinAbs(0.32612951007547605633, 1e-14));
  CHECK_THAT(li2(0.9), WithinAbs(1.2997147230049587820, 1e-13));
  CHECK_THAT(li2(-3.0), WithinAbs(-1.9393754207667089531, 1e-13));
  CHECK(li2_eval(0.25).branch == Branch::series);
  CHECK(li2_eval(-20.0).branch == Branch::inversion);
  CHECK_THROWS_AS(li2(1.5), DomainError);
  CHECK_THROWS_AS(li2(-std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("li2 reflection and integral definition", "[specfun][property]") {
  constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(1e-6, 1 - 1e-6);
  for (int i = 0; i < 500; ++i) {
    const double x = unit(rng);
    const double residual = li2(x) + li2(1 - x) - pi2_6 + std::log(x) * std::log1p(-x);
    CHECK(std::fabs(residual) < 1e-12);
  }
  std::uniform_real_distribution<double> wide(-30.0, 0.99);
  for (int i = 0; i < 40; ++i) {
    const double x = wide(rng);
    // Li2(x) = -int_0^x ln(1 - t)/t dt
    auto g = [](double t) { return std::log1p(-t) / t; };
    const double ref = x >= 0 ? -testing::quad_or_throw(g, 0.0, x, 1e-14)
                              : testing::quad_or_throw(g, x, 0.0, 1e-14);
    CHECK_THAT(li2(x), WithinAbs(ref, 1e-12));
  }
}

TEST_CASE("asinh_safe", "[specfun]") {
  CHECK(asinh_safe(0.0) == 0.0);
  CHECK_THAT(asinh_safe(std::sinh(2.0)), WithinAbs(2.0, 1e-15));
  // ln(2e300) at 35 digits.
  CHECK_THAT(asinh_safe(1e300), WithinRel(691.46867507877365051, 1e-15));
  CHECK_THAT(asinh_safe(-1e300), WithinRel(-691.46867507877365051, 1e-15));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double z = std::sinh(dist(rng));
    CHECK_THAT(asinh_safe(z), WithinRel(static_cast<double>(std::asinh(static_cast<long double>(z))), 1e-15));
  }
  CHECK_THROWS_AS(asinh_safe(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("sqrt1p_minus1 and z_minus_atan", "[specfun]") {
  CHECK(sqrt1p_minus1(0.0) == 0.0);
  CHECK(sqrt1p_minus1(3.0) == 1.0);
  CHECK_THAT(sqrt1p_minus1(1e-16), WithinRel(4.99999999999999987500e-17, 1e-12));
  CHECK_THROWS_AS(sqrt1p_minus1(-1e-30), DomainError);

  CHECK(z_minus_atan(0.0) == 0.0);
  for (double z : {1e-8, 1e-3, 0.1, 0.3, 0.49, 0.5, 2.0, -0.2}) {
    const long double zl = z;
    const double ref = static_cast<double>(zl - std::atan(zl));
    // long double keeps ~3 extra digits; enough for the cancellation at z >= 0.1.
    if (std::fabs(z) >= 0.1) CHECK_THAT(z_minus_atan(z), WithinRel(ref, 1e-14));
  }
  CHECK_THAT(z_minus_atan(1e-3), WithinRel(1e-9 / 3 - 1e-15 / 5, 1e-12));
  CHECK_THAT(z_minus_atan(1e-8), WithinRel(1e-24 / 3, 1e-12));
}

TEST_CASE("kernels compile for long double", "[specfun]") {
  CHECK(std::fabs(ti2(1.0L) - 0.915965594177219015054603514932384L) < 1e-17L);
  CHECK(std::fabs(li2(1.0L) - std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6) <
        1e-18L);
}
