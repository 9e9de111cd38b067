#pragma once

// Figure sweeps: configuration parsing, evaluation and plot-data emission.
//
// Config documents are flat `key = value` lines; `#` starts a comment.
//   figure     = fig2 | fig3 | custom
//   dx         = 10, 30            (list, m)
//   dy, h      = metres
//   fc_ghz, neff, sigma2_dbm
//   gamma_db   = start:step:stop   (or a single value; step defaults to 0.25)
//   m          = 1,2,10 | 1:20 | 1:2:20
//   seed, samples
//   methods    = closed,mc,quad

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "pinchrate/closedform.hpp"
#include "pinchrate/errors.hpp"
#include "pinchrate/model.hpp"
#include "pinchrate/oracles.hpp"
#include "pinchrate/parallel.hpp"

#ifndef PINCHRATE_VERSION
#define PINCHRATE_VERSION "unknown"
#endif

namespace pinchrate::cli {

inline constexpr const char* kToolVersion = PINCHRATE_VERSION;

enum class Figure { fig2, fig3, custom };

inline const char* to_string(Figure f) {
  switch (f) {
    case Figure::fig2:
      return "fig2";
    case Figure::fig3:
      return "fig3";
    case Figure::custom:
      return "custom";
  }
  return "?";
}

enum class Format { csv, dat };

struct GammaRange {
  double start = 90.0;
  double step = 0.25;
  double stop = 110.0;

  std::vector<double> grid() const {
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
  }
};

struct Methods {
  bool closed_form = true;
  bool monte_carlo = true;
  bool quadrature = false;

  bool any() const { return closed_form || monte_carlo || quadrature; }
};

struct SweepSpec {
  Figure figure = Figure::fig2;
  SystemParams base;  // d_x, m_count and p_t are set per grid point
  double sigma2_dbm = -90.0;
  GammaRange gamma_db;
  std::vector<int> m_values;
  std::vector<double> dx_values;
  Methods methods;
  montecarlo::McConfig mc;
};

struct SweepTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json metadata;
};

/// Keys present in a config document or on the command line. Unset keys
/// fall back to the figure defaults in resolve().
struct SpecOverrides {
  std::optional<Figure> figure;
  std::optional<std::vector<double>> dx;
  std::optional<double> dy, h, fc_ghz, neff, sigma2_dbm;
  std::optional<GammaRange> gamma_db;
  std::optional<std::vector<int>> m;
  std::optional<std::uint64_t> seed, samples;
  std::optional<Methods> methods;

  /// Fields set in `other` replace ours.
  void merge(const SpecOverrides& other) {
    auto take = [](auto& mine, const auto& theirs) {
      if (theirs) mine = theirs;
    };
    take(figure, other.figure);
    take(dx, other.dx);
    take(dy, other.dy);
    take(h, other.h);
    take(fc_ghz, other.fc_ghz);
    take(neff, other.neff);
    take(sigma2_dbm, other.sigma2_dbm);
    take(gamma_db, other.gamma_db);
    take(m, other.m);
    take(seed, other.seed);
    take(samples, other.samples);
    take(methods, other.methods);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

struct ValueError {
  std::string message;
};

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ValueError{"malformed number '" + std::string(text) + "' for " + std::string(key)};
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ValueError{std::string(key) + " must be finite"};
  }
  return value;
}

inline double parse_positive(std::string_view text, std::string_view key) {
  const double v = parse_number<double>(text, key);
  if (!(v > 0)) throw ValueError{std::string(key) + " must be > 0"};
  return v;
}

inline GammaRange parse_gamma(std::string_view text) {
  const auto parts = split(text, ':');
  GammaRange g;
  if (parts.size() == 1) {
    g.start = g.stop = parse_number<double>(parts[0], "gamma_db");
  } else if (parts.size() == 2) {
    g.start = parse_number<double>(parts[0], "gamma_db");
    g.stop = parse_number<double>(parts[1], "gamma_db");
  } else if (parts.size() == 3) {
    g.start = parse_number<double>(parts[0], "gamma_db");
    g.step = parse_number<double>(parts[1], "gamma_db");
    g.stop = parse_number<double>(parts[2], "gamma_db");
  } else {
    throw ValueError{"gamma_db must be start:step:stop"};
  }
  if (!(g.step > 0)) throw ValueError{"gamma_db step must be > 0"};
  if (g.stop < g.start) throw ValueError{"gamma_db range is empty (stop < start)"};
  return g;
}

inline std::vector<int> parse_m(std::string_view text) {
  std::vector<int> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2 && parts.size() != 3) throw ValueError{"m range must be a:b or a:step:b"};
    const int lo = parse_number<int>(parts.front(), "m");
    const int hi = parse_number<int>(parts.back(), "m");
    const int step = parts.size() == 3 ? parse_number<int>(parts[1], "m") : 1;
    if (step <= 0) throw ValueError{"m step must be > 0"};
    for (int m = lo; m <= hi; m += step) out.push_back(m);
  } else {
    for (auto part : split(text, ',')) out.push_back(parse_number<int>(part, "m"));
  }
  if (out.empty()) throw ValueError{"m range is empty"};
  for (int m : out) {
    if (m < 1) throw ValueError{"m values must be >= 1"};
  }
  return out;
}

inline std::vector<double> parse_dx(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_positive(part, "dx"));
  return out;
}

inline Methods parse_methods(std::string_view text) {
  Methods m{false, false, false};
  for (auto part : split(text, ',')) {
    if (part == "closed" || part == "closed_form") {
      m.closed_form = true;
    } else if (part == "mc" || part == "monte_carlo") {
      m.monte_carlo = true;
    } else if (part == "quad" || part == "quadrature") {
      m.quadrature = true;
    } else {
      throw ValueError{"unknown method '" + std::string(part) + "'"};
    }
  }
  return m;
}

inline Figure parse_figure(std::string_view text) {
  if (text == "fig2") return Figure::fig2;
  if (text == "fig3") return Figure::fig3;
  if (text == "custom") return Figure::custom;
  throw ValueError{"figure must be fig2, fig3 or custom"};
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_dx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

/// Applies one `key = value` pair. Throws ParseError tagged with `line`.
inline void apply_key(SpecOverrides& o, std::string_view key, std::string_view value, int line) {
  using namespace detail;
  try {
    if (value.empty()) throw ValueError{"missing value for " + std::string(key)};
    if (key == "figure") {
      o.figure = parse_figure(value);
    } else if (key == "dx") {
      o.dx = parse_dx(value);
    } else if (key == "dy") {
      o.dy = parse_positive(value, key);
    } else if (key == "h") {
      o.h = parse_positive(value, key);
    } else if (key == "fc_ghz") {
      o.fc_ghz = parse_positive(value, key);
    } else if (key == "neff") {
      const double v = parse_number<double>(value, key);
      if (!(v > 1)) throw ValueError{"neff must be > 1"};
      o.neff = v;
    } else if (key == "sigma2_dbm") {
      o.sigma2_dbm = parse_number<double>(value, key);
    } else if (key == "gamma_db") {
      o.gamma_db = parse_gamma(value);
    } else if (key == "m") {
      o.m = parse_m(value);
    } else if (key == "seed") {
      o.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "samples") {
      const auto n = parse_number<std::uint64_t>(value, key);
      if (n == 0) throw ValueError{"samples must be >= 1"};
      o.samples = n;
    } else if (key == "methods") {
      const Methods m = parse_methods(value);
      if (!m.any()) throw ValueError{"methods must name at least one method"};
      o.methods = m;
    } else {
      throw ValueError{"unknown key '" + std::string(key) + "'"};
    }
  } catch (const ValueError& e) {
    throw ParseError(e.message, line);
  }
}

inline SpecOverrides parse_overrides(std::string_view text) {
  SpecOverrides o;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key", line_no);
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ParseError("duplicate key '" + std::string(key) + "' (first on line " +
                           std::to_string(it->second) + ")",
                       line_no);
    }
    seen.emplace(std::string(key), line_no);
    apply_key(o, key, detail::trim(line.substr(eq + 1)), line_no);
  }
  return o;
}

/// Figure defaults for everything `o` leaves unset.
inline SweepSpec resolve(const SpecOverrides& o) {
  SweepSpec s;
  s.figure = o.figure.value_or(Figure::fig2);
  if (s.figure == Figure::fig3) {
    s.dx_values = {10.0, 30.0, 50.0};
    for (int m = 1; m <= 20; ++m) s.m_values.push_back(m);
    s.gamma_db = {90.0, 0.25, 90.0};
  } else {
    s.dx_values = {10.0, 30.0};
    s.m_values = {1, 2, 10};
  }
  if (o.dx) s.dx_values = *o.dx;
  if (o.m) s.m_values = *o.m;
  if (o.gamma_db) s.gamma_db = *o.gamma_db;
  if (o.methods) s.methods = *o.methods;
  if (o.seed) s.mc.seed = *o.seed;
  if (o.samples) s.mc.samples = *o.samples;

  s.base.d_y = o.dy.value_or(10.0);
  s.base.h = o.h.value_or(3.0);
  s.base.f_c = o.fc_ghz.value_or(28.0) * 1e9;
  s.base.n_eff = o.neff.value_or(1.4);
  s.sigma2_dbm = o.sigma2_dbm.value_or(-90.0);
  s.base.sigma2 = dbm_to_watts(s.sigma2_dbm);
  s.base.d_x = s.dx_values.front();
  s.base.m_count = s.m_values.front();
  s.base.p_t = transmit_power_for_snr_db(s.gamma_db.start, s.base.sigma2);

  if (s.figure == Figure::fig3 && s.gamma_db.grid().size() != 1) {
    throw ConfigError("gamma_db: fig3 is evaluated at a single gamma_db value");
  }
  // Surfaces any remaining invalid combination (for example sigma2 underflow).
  (void)SystemConfig(s.base);
  return s;
}

inline SweepSpec parse_config(std::string_view text) { return resolve(parse_overrides(text)); }

namespace detail {

inline nlohmann::ordered_json run_metadata(const SweepSpec& s) {
  nlohmann::ordered_json j;
  j["tool"] = "pinchrate";
  j["version"] = kToolVersion;
  j["figure"] = to_string(s.figure);
  j["seed"] = s.mc.seed;
  j["samples"] = s.mc.samples;
  j["batch"] = s.mc.batch;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  if (s.methods.closed_form) methods.push_back("closed_form");
  if (s.methods.monte_carlo) methods.push_back("monte_carlo");
  if (s.methods.quadrature) methods.push_back("quadrature");
  j["d_y_m"] = s.base.d_y;
  j["h_m"] = s.base.h;
  j["f_c_hz"] = s.base.f_c;
  j["n_eff"] = s.base.n_eff;
  j["sigma2_dbm"] = s.sigma2_dbm;
  j["sigma2_w"] = s.base.sigma2;
  j["gamma_db"] = {{"start", s.gamma_db.start}, {"step", s.gamma_db.step}, {"stop", s.gamma_db.stop}};
  j["m"] = s.m_values;
  j["dx_m"] = s.dx_values;
  return j;
}

inline std::string table_name(const SweepSpec& s, double d_x) {
  return std::string(to_string(s.figure)) + "_dx" + format_dx(d_x);
}

inline void require_finite_table(const SweepTable& t) {
  for (const auto& row : t.rows) {
    for (double v : row) {
      if (!std::isfinite(v)) throw std::runtime_error("non-finite value in table " + t.name);
    }
  }
}

// Evaluates `n` rows concurrently; row i is produced by fill(i, row).
template <typename Fill>
std::vector<std::vector<double>> evaluate_rows(std::size_t n, std::size_t width, unsigned workers,
                                               Fill fill) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(width));
  parallel_for(n, workers, [&](std::size_t i) { fill(i, rows[i]); });
  return rows;
}

}  // namespace detail

/// Quadrature tolerance used for the sweep columns.
inline constexpr double kSweepQuadTol = 1e-10;

/// Rate versus gamma_t: one table per D_x, columns gamma_db then per M
/// the requested methods (MC adds a standard-error column).
inline std::vector<SweepTable> run_fig2(const SweepSpec& spec, unsigned workers = 0) {
  if (!spec.methods.any()) throw ConfigError("methods: at least one method is required");
  const std::vector<double> gammas = spec.gamma_db.grid();
  std::vector<SweepTable> tables;
  for (double d_x : spec.dx_values) {
    SweepTable t;
    t.name = detail::table_name(spec, d_x);
    t.columns.push_back("gamma_db");
    for (int m : spec.m_values) {
      const std::string p = "rate_M" + std::to_string(m);
      if (spec.methods.closed_form) t.columns.push_back(p + "_closed");
      if (spec.methods.monte_carlo) {
        t.columns.push_back(p + "_mc");
        t.columns.push_back(p + "_mc_se");
      }
      if (spec.methods.quadrature) t.columns.push_back(p + "_quad");
    }
    t.rows = detail::evaluate_rows(gammas.size(), t.columns.size(), workers,
                                   [&](std::size_t i, std::vector<double>& row) {
      std::size_t c = 0;
      row[c++] = gammas[i];
      for (int m : spec.m_values) {
        SystemParams p = spec.base;
        p.d_x = d_x;
        p.m_count = m;
        p.p_t = transmit_power_for_snr_db(gammas[i], p.sigma2);
        const SystemConfig cfg(p);
        if (spec.methods.closed_form) row[c++] = ergodic_rate(cfg).rate;
        if (spec.methods.monte_carlo) {
          const RateResult r = oracles::mc_ergodic_rate(cfg, spec.mc, 1);
          row[c++] = r.rate;
          row[c++] = r.std_error;
        }
        if (spec.methods.quadrature) row[c++] = oracles::quad_ergodic_rate(cfg, kSweepQuadTol).rate;
      }
    });
    t.metadata = detail::run_metadata(spec);
    t.metadata["table"] = t.name;
    t.metadata["d_x_m"] = d_x;
    detail::require_finite_table(t);
    tables.push_back(std::move(t));
  }
  return tables;
}

/// PDE versus M at a single gamma_t: one table per D_x.
inline std::vector<SweepTable> run_fig3(const SweepSpec& spec, unsigned workers = 0) {
  if (!spec.methods.any()) throw ConfigError("methods: at least one method is required");
  const double gamma = spec.gamma_db.start;
  std::vector<SweepTable> tables;
  for (double d_x : spec.dx_values) {
    SweepTable t;
    t.name = detail::table_name(spec, d_x);
    t.columns.push_back("M");
    if (spec.methods.closed_form) t.columns.push_back("pde_closed");
    if (spec.methods.monte_carlo) {
      t.columns.push_back("pde_mc");
      t.columns.push_back("pde_mc_se");
    }
    if (spec.methods.quadrature) t.columns.push_back("pde_quad");
    t.rows = detail::evaluate_rows(spec.m_values.size(), t.columns.size(), workers,
                                   [&](std::size_t i, std::vector<double>& row) {
      SystemParams p = spec.base;
      p.d_x = d_x;
      p.m_count = spec.m_values[i];
      p.p_t = transmit_power_for_snr_db(gamma, p.sigma2);
      const SystemConfig cfg(p);
      std::size_t c = 0;
      row[c++] = p.m_count;
      if (spec.methods.closed_form) row[c++] = pde(cfg).efficiency;
      if (spec.methods.monte_carlo) {
        const PdeResult r = oracles::mc_pde(cfg, spec.mc, 1);
        row[c++] = r.efficiency;
        row[c++] = r.std_error;
      }
      if (spec.methods.quadrature) row[c++] = oracles::quad_pde(cfg, kSweepQuadTol).efficiency;
    });
    t.metadata = detail::run_metadata(spec);
    t.metadata["table"] = t.name;
    t.metadata["d_x_m"] = d_x;
    t.metadata["gamma_db_point"] = gamma;
    detail::require_finite_table(t);
    tables.push_back(std::move(t));
  }
  return tables;
}

inline std::vector<SweepTable> run(const SweepSpec& spec, unsigned workers = 0) {
  return spec.figure == Figure::fig3 ? run_fig3(spec, workers) : run_fig2(spec, workers);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

/// RFC 4180 CSV (CRLF records, header row) or gnuplot blocks.
inline void emit(const SweepTable& table, const std::filesystem::path& path, Format format) {
  auto out = detail::open_for_write(path);
  if (format == Format::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << detail::csv_field(table.columns[c]);
    }
    out << "\r\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << detail::format_number(row[c]);
      }
      out << "\r\n";
    }
  } else {
    // One block per series, separated by two blank lines (gnuplot `index`).
    const std::string& x_name = table.columns.empty() ? std::string() : table.columns.front();
    for (std::size_t c = 1; c < table.columns.size(); ++c) {
      if (c > 1) out << "\n\n";
      out << "# " << x_name << ' ' << table.columns[c] << '\n';
      for (const auto& row : table.rows) {
        out << detail::format_number(row[0]) << ' ' << detail::format_number(row[c]) << '\n';
      }
    }
  }
  detail::finish_write(out, path);
}

inline std::string file_extension(Format f) { return f == Format::csv ? ".csv" : ".dat"; }

/// Writes every table plus `<figure>.meta.json`; returns the paths written.
inline std::vector<std::filesystem::path> write_run(const SweepSpec& spec,
                                                    const std::vector<SweepTable>& tables,
                                                    const std::filesystem::path& dir,
                                                    Format format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  nlohmann::ordered_json meta = detail::run_metadata(spec);
  meta["format"] = format == Format::csv ? "csv" : "dat";
  auto& list = meta["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    const auto path = dir / (t.name + file_extension(format));
    emit(t, path, format);
    written.push_back(path);
    list.push_back({{"file", path.filename().string()},
                    {"d_x_m", t.metadata.value("d_x_m", 0.0)},
                    {"columns", t.columns},
                    {"rows", t.rows.size()}});
  }
  const auto meta_path = dir / (std::string(to_string(spec.figure)) + ".meta.json");
  auto out = detail::open_for_write(meta_path);
  out << meta.dump(2) << '\n';
  detail::finish_write(out, meta_path);
  written.push_back(meta_path);
  return written;
}

/// Reads a CSV written by emit(); inverse of the csv format.
inline SweepTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  SweepTable t;
  t.name = path.stem().string();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      for (auto f : detail::split(line, ',')) t.columns.emplace_back(f);
      continue;
    }
    std::vector<double> row;
    try {
      for (auto f : detail::split(line, ',')) row.push_back(detail::parse_number<double>(f, "cell"));
    } catch (const detail::ValueError& e) {
      throw ParseError(path.string() + ": " + e.message, line_no);
    }
    if (row.size() != t.columns.size()) {
      throw ParseError(path.string() + ": row width differs from header", line_no);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pinchrate::cli
