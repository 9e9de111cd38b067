#pragma once

// Geometry, channel and SNR of a single-waveguide pinching-antenna system
// with M fixed pinching points at x_k = (2k - 1) delta / 2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pinchrate/errors.hpp"

namespace pinchrate {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact SI

/// dB -> linear power ratio.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }

/// Transmit power that realises transmit SNR gamma_t = P_t / sigma^2 (in dB).
/// This is the single place where gamma_t is interpreted.
inline double transmit_power_for_snr_db(double gamma_db, double sigma2_watts) {
  return sigma2_watts * db_to_linear(gamma_db);
}

/// Raw physical parameters, SI units throughout.
struct SystemParams {
  double d_x = 10.0;        // waveguide / room length along x [m]
  double d_y = 10.0;        // room width along y [m]
  double h = 3.0;           // waveguide height [m]
  int m_count = 1;          // number of pinching antennas
  double f_c = 28e9;        // carrier [Hz]
  double n_eff = 1.4;       // effective refractive index
  double p_t = 1e-3;        // transmit power [W]
  double sigma2 = 1e-12;    // noise power [W]
};

/// Validated, immutable system configuration with derived quantities.
class SystemConfig {
 public:
  explicit SystemConfig(const SystemParams& p) : p_(p) {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0)) {
        throw ConfigError(std::string(name) + " must be finite and > 0");
      }
    };
    positive(p.d_x, "d_x");
    positive(p.d_y, "d_y");
    positive(p.h, "h");
    positive(p.f_c, "f_c");
    positive(p.p_t, "p_t");
    positive(p.sigma2, "sigma2");
    if (p.m_count < 1) throw ConfigError("m_count must be >= 1");
    if (!(std::isfinite(p.n_eff) && p.n_eff > 1)) throw ConfigError("n_eff must be > 1");
    delta_ = p.d_x / p.m_count;
    lambda_ = kSpeedOfLight / p.f_c;
    eta_ = lambda_ * lambda_ / (16.0 * std::numbers::pi * std::numbers::pi);
    snr_scale_ = eta_ * p.p_t / p.sigma2;
    if (!(std::isfinite(snr_scale_) && snr_scale_ > 0)) {
      throw ConfigError("eta * p_t / sigma2 must be finite and > 0");
    }
  }

  const SystemParams& params() const noexcept { return p_; }
  double d_x() const noexcept { return p_.d_x; }
  double d_y() const noexcept { return p_.d_y; }
  double h() const noexcept { return p_.h; }
  int m_count() const noexcept { return p_.m_count; }

  /// Inter-spacing D_x / M.
  double delta() const noexcept { return delta_; }
  double wavelength() const noexcept { return lambda_; }
  double guided_wavelength() const noexcept { return lambda_ / p_.n_eff; }
  /// Free-space path gain at 1 m, lambda^2 / (16 pi^2).
  double eta() const noexcept { return eta_; }
  /// C = eta P_t / sigma^2.
  double snr_scale() const noexcept { return snr_scale_; }

  /// Same geometry with P_t chosen so that P_t / sigma^2 = gamma_db.
  SystemConfig with_transmit_snr_db(double gamma_db) const {
    SystemParams q = p_;
    q.p_t = transmit_power_for_snr_db(gamma_db, q.sigma2);
    return SystemConfig(q);
  }

  SystemConfig with_m_count(int m) const {
    SystemParams q = p_;
    q.m_count = m;
    return SystemConfig(q);
  }

 private:
  SystemParams p_;
  double delta_ = 0;
  double lambda_ = 0;
  double eta_ = 0;
  double snr_scale_ = 0;
};

/// Defaults used throughout the experiments: sigma^2 = -90 dBm, 28 GHz,
/// n_eff = 1.4, h = 3 m, D_y = 10 m.
inline SystemParams reference_params(double d_x, int m_count, double gamma_db) {
  SystemParams p;
  p.d_x = d_x;
  p.m_count = m_count;
  p.sigma2 = dbm_to_watts(-90.0);
  p.p_t = transmit_power_for_snr_db(gamma_db, p.sigma2);
  return p;
}

struct UserPosition {
  double x_m;  // [0, D_x]
  double y_m;  // [-D_y/2, D_y/2]
};

/// 1-based pinching antenna index.
struct PaIndex {
  int k;
  friend bool operator==(PaIndex, PaIndex) = default;
};

struct ChannelCoefficient {
  double magnitude;
  double phase;  // (-pi, pi]

  std::complex<double> value() const { return std::polar(magnitude, phase); }
};

inline void check_index(const SystemConfig& cfg, PaIndex k) {
  if (k.k < 1 || k.k > cfg.m_count()) {
    throw IndexError("PA index " + std::to_string(k.k) + " outside [1, " +
                     std::to_string(cfg.m_count()) + "]");
  }
}

inline double pa_position(const SystemConfig& cfg, PaIndex k) {
  check_index(cfg, k);
  return (2.0 * k.k - 1.0) * cfg.delta() / 2.0;
}

/// Squared PA-user distance: (x_m - x_k)^2 + y_m^2 + h^2.
inline double distance_squared(const SystemConfig& cfg, const UserPosition& user, PaIndex k) {
  const double dx = user.x_m - pa_position(cfg, k);
  return dx * dx + user.y_m * user.y_m + cfg.h() * cfg.h();
}

namespace detail {

// Reduce an angle to (-pi, pi].
inline double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(phi, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace detail

/// Composite free-space times waveguide-phase coefficient h1 h2.
inline ChannelCoefficient channel_coefficient(const SystemConfig& cfg, const UserPosition& user,
                                              PaIndex k) {
  const double d = std::sqrt(distance_squared(cfg, user, k));
  const double feed = pa_position(cfg, k);  // feed point sits at x = 0 on the waveguide
  const double phase = -2.0 * std::numbers::pi * d / cfg.wavelength() -
                       2.0 * std::numbers::pi * feed / cfg.guided_wavelength();
  return {std::sqrt(cfg.eta()) / d, detail::wrap_phase(phase)};
}

/// Received SNR when PA k is active: C / ((x_m - x_k)^2 + y_m^2 + h^2).
inline double snr_for_pa(const SystemConfig& cfg, const UserPosition& user, PaIndex k) {
  return cfg.snr_scale() / distance_squared(cfg, user, k);
}

/// Nearest PA along x; exact midpoints go to the lower index.
inline PaIndex select_pa(const SystemConfig& cfg, const UserPosition& user) {
  const int m = cfg.m_count();
  const double guess = std::ceil(user.x_m / cfg.delta());
  int k = static_cast<int>(std::clamp(guess, 1.0, static_cast<double>(m)));
  // x/delta rounding can land one cell off near a boundary; settle on the
  // true argmin among the neighbours.
  auto gap = [&](int j) { return std::fabs(user.x_m - (2.0 * j - 1.0) * cfg.delta() / 2.0); };
  if (k > 1 && gap(k - 1) <= gap(k)) --k;
  else if (k < m && gap(k + 1) < gap(k)) ++k;
  return PaIndex{k};
}

/// epsilon = x_m - x_p for the selected PA.
inline double effective_offset(const SystemConfig& cfg, const UserPosition& user) {
  return user.x_m - pa_position(cfg, select_pa(cfg, user));
}

}  // namespace pinchrate
