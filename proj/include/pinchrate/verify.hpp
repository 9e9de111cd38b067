#pragma once

// Triple agreement of closed form, 2D quadrature and Monte Carlo over the
// reference grid. Backs `pinchrate verify` and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <vector>

#include "pinchrate/closedform.hpp"
#include "pinchrate/model.hpp"
#include "pinchrate/oracles.hpp"
#include "pinchrate/parallel.hpp"

namespace pinchrate::verify {

struct Grid {
  std::vector<double> gamma_db{90, 95, 100, 105, 110};
  std::vector<double> dx{10, 30};
  std::vector<int> m{1, 2, 10};
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 2025;
  double quad_rel_tol = 1e-10;
  double rel_limit = 1e-8;   // closed form vs quadrature
  double sigma_limit = 3.0;  // closed form vs MC, in standard errors
};

inline Grid quick_grid() {
  Grid g;
  g.gamma_db = {90, 110};
  g.samples = 200'000;
  return g;
}

struct Record {
  double gamma_db;
  double d_x;
  int m;
  double closed;
  double quad;
  double mc;
  double mc_se;

  double quad_rel() const { return std::fabs(closed - quad) / std::fabs(quad); }
  double mc_sigmas() const { return std::fabs(closed - mc) / mc_se; }
};

inline std::vector<Record> triple_agreement(const Grid& g, unsigned workers = 0) {
  std::vector<Record> out;
  for (double d_x : g.dx) {
    for (int m : g.m) {
      for (double gamma : g.gamma_db) out.push_back({gamma, d_x, m, 0, 0, 0, 0});
    }
  }
  // Each point gets its own stream so the checks are independent.
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Record& r = out[i];
    const SystemConfig cfg(reference_params(r.d_x, r.m, r.gamma_db));
    r.closed = ergodic_rate(cfg).rate;
    r.quad = oracles::quad_ergodic_rate(cfg, g.quad_rel_tol).rate;
    const RateResult mc = oracles::mc_ergodic_rate(cfg, {g.samples, g.seed + i, 1u << 16}, 1);
    r.mc = mc.rate;
    r.mc_se = mc.std_error;
  });
  return out;
}

inline bool passes(const Grid& g, const Record& r) {
  return r.quad_rel() < g.rel_limit && r.mc_sigmas() < g.sigma_limit;
}

/// Prints one line per point and a summary; true when every point passes.
inline bool report(const Grid& g, const std::vector<Record>& records, std::ostream& os) {
  std::size_t failed = 0;
  char line[256];
  for (const auto& r : records) {
    const bool ok = passes(g, r);
    failed += ok ? 0 : 1;
    std::snprintf(line, sizeof line,
                  "%-4s dx=%-3g M=%-3d gamma=%-4g closed=%.12f quad_rel=%.2e mc_dev=%.2f sigma\n",
                  ok ? "ok" : "FAIL", r.d_x, r.m, r.gamma_db, r.closed, r.quad_rel(),
                  r.mc_sigmas());
    os << line;
  }
  os << records.size() - failed << "/" << records.size() << " points within tolerance (quad rel < "
     << g.rel_limit << ", |closed - mc| < " << g.sigma_limit << " se, " << g.samples
     << " samples)\n";
  return failed == 0;
}

}  // namespace pinchrate::verify
