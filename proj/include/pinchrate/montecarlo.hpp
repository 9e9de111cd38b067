#pragma once

// Monte Carlo link simulator over the true user geometry.
//
// Samples are split into fixed-size batches; batch b draws from its own
// mt19937_64 stream seeded with (seed, b), and the per-batch compensated sums
// are combined in batch order. Results therefore depend only on
// (samples, seed, batch), never on the number of worker threads.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pinchrate/closedform.hpp"
#include "pinchrate/compensated_sum.hpp"
#include "pinchrate/errors.hpp"
#include "pinchrate/model.hpp"
#include "pinchrate/parallel.hpp"

namespace pinchrate::montecarlo {

struct McConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t batch = 1u << 16;
};

/// How the horizontal offset is drawn.
enum class Sampling {
  true_geometry,    // x_m ~ U[0, D_x], nearest PA selected explicitly
  offset_shortcut,  // eps ~ U[-delta/2, delta/2] directly
};

namespace detail {

inline void validate(const McConfig& mc) {
  if (mc.samples == 0) throw ConfigError("Monte Carlo: samples must be >= 1");
  if (mc.batch == 0) throw ConfigError("Monte Carlo: batch must be >= 1");
}

inline std::mt19937_64 batch_engine(std::uint64_t seed, std::uint64_t batch_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch_index),
                    static_cast<std::uint32_t>(batch_index >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct Moments {
  CompensatedSum<double> discrete;
  CompensatedSum<double> discrete_sq;
  CompensatedSum<double> continuous;
  CompensatedSum<double> continuous_sq;
  CompensatedSum<double> cross;
  std::uint64_t count = 0;

  Moments& operator+=(const Moments& o) {
    discrete += o.discrete;
    discrete_sq += o.discrete_sq;
    continuous += o.continuous;
    continuous_sq += o.continuous_sq;
    cross += o.cross;
    count += o.count;
    return *this;
  }
};

// Draws `mc.samples` users and accumulates log2(1 + snr) for the discrete
// system and, when `with_continuous`, for a PA placed directly above the user
// on the same draw.
inline Moments simulate(const SystemConfig& cfg, const McConfig& mc, unsigned workers,
                        Sampling sampling, bool with_continuous) {
  validate(mc);
  const std::uint64_t batches = (mc.samples + mc.batch - 1) / mc.batch;
  std::vector<Moments> parts(batches);
  const double c = cfg.snr_scale();
  const double h2 = cfg.h() * cfg.h();
  const double inv_ln2 = 1.0 / std::numbers::ln2;

  parallel_for(batches, workers, [&](std::size_t b) {
    auto eng = batch_engine(mc.seed, b);
    const std::uint64_t begin = b * mc.batch;
    const std::uint64_t end = std::min(mc.samples, begin + mc.batch);
    Moments m;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double u = uniform01(eng);
      const double y = cfg.d_y() * (uniform01(eng) - 0.5);
      double snr;
      if (sampling == Sampling::true_geometry) {
        const UserPosition user{cfg.d_x() * u, y};
        snr = snr_for_pa(cfg, user, select_pa(cfg, user));
      } else {
        const double eps = cfg.delta() * (u - 0.5);
        snr = c / (eps * eps + y * y + h2);
      }
      const double rd = std::log1p(snr) * inv_ln2;
      m.discrete += rd;
      m.discrete_sq += rd * rd;
      if (with_continuous) {
        const double rc = std::log1p(c / (y * y + h2)) * inv_ln2;
        m.continuous += rc;
        m.continuous_sq += rc * rc;
        m.cross += rd * rc;
      }
    }
    m.count = end - begin;
    parts[b] = m;
  });

  Moments total;
  for (const auto& p : parts) total += p;
  return total;
}

inline double sample_variance(double sum, double sum_sq, double n) {
  if (n < 2) return 0.0;
  return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
}

}  // namespace detail

/// Monte Carlo estimate of the discrete ergodic rate with its standard error.
inline RateResult mc_ergodic_rate(const SystemConfig& cfg, const McConfig& mc = {},
                                  unsigned workers = 0,
                                  Sampling sampling = Sampling::true_geometry) {
  const auto m = detail::simulate(cfg, mc, workers, sampling, false);
  const double n = static_cast<double>(m.count);
  const double s = m.discrete.value();
  const double var = detail::sample_variance(s, m.discrete_sq.value(), n);
  return {s / n, Method::monte_carlo, std::sqrt(var / n)};
}

/// Monte Carlo estimate of R / R_c with both rates drawn from one stream.
/// The ratio's standard error uses the delta method with the sample covariance.
inline PdeResult mc_pde(const SystemConfig& cfg, const McConfig& mc = {}, unsigned workers = 0) {
  const auto m = detail::simulate(cfg, mc, workers, Sampling::true_geometry, true);
  const double n = static_cast<double>(m.count);
  const double sd = m.discrete.value();
  const double sc = m.continuous.value();
  const double mean_d = sd / n;
  const double mean_c = sc / n;
  const double ratio = mean_d / mean_c;
  const double var_d = detail::sample_variance(sd, m.discrete_sq.value(), n);
  const double var_c = detail::sample_variance(sc, m.continuous_sq.value(), n);
  const double cov = n > 1 ? (m.cross.value() - sd * sc / n) / (n - 1) : 0.0;
  const double var_ratio =
      std::max(0.0, var_d - 2 * ratio * cov + ratio * ratio * var_c) / (mean_c * mean_c * n);
  return {ratio, mean_d, mean_c, std::sqrt(var_ratio)};
}

}  // namespace pinchrate::montecarlo
