#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "pinchrate/sweep.hpp"

using namespace pinchrate;
using namespace pinchrate::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pinchrate_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int parse_error_line(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::size_t column(const SweepTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  FAIL("no column " << name << " in " << t.name);
  return 0;
}

}  // namespace

TEST_CASE("empty document gives the default fig2 sweep", "[sweep][config]") {
  for (const char* text : {"", "\n# nothing here\n   \n"}) {
    const SweepSpec s = parse_config(text);
    CHECK(s.figure == Figure::fig2);
    CHECK(s.dx_values == std::vector<double>{10, 30});
    CHECK(s.m_values == std::vector<int>{1, 2, 10});
    CHECK(s.gamma_db.start == 90);
    CHECK(s.gamma_db.step == 0.25);
    CHECK(s.gamma_db.stop == 110);
    CHECK(s.gamma_db.grid().size() == 81);
    CHECK(s.base.d_y == 10);
    CHECK(s.base.h == 3);
    CHECK(s.base.f_c == 28e9);
    CHECK(s.base.n_eff == 1.4);
    CHECK_THAT(s.base.sigma2, WithinRel(1e-12, 1e-15));
    CHECK(s.methods.closed_form);
    CHECK(s.methods.monte_carlo);
    CHECK(s.mc.samples == 1'000'000);
  }
}

TEST_CASE("fig3 defaults and explicit keys", "[sweep][config]") {
  const SweepSpec f3 = parse_config("figure = fig3");
  CHECK(f3.dx_values == std::vector<double>{10, 30, 50});
  CHECK(f3.m_values.size() == 20);
  CHECK(f3.m_values.back() == 20);
  CHECK(f3.gamma_db.grid() == std::vector<double>{90});

  const SweepSpec s = parse_config(
      "figure = fig2\n"
      "dx = 12.5, 40   # two rooms\n"
      "dy = 8\n"
      "h=2.5\n"
      "fc_ghz = 30\n"
      "neff = 1.5\n"
      "sigma2_dbm = -80\n"
      "gamma_db = 90:5:110\n"
      "m = 1:2:7\n"
      "seed = 77\n"
      "samples = 5000\n"
      "methods = closed, quad\n");
  CHECK(s.dx_values == std::vector<double>{12.5, 40});
  CHECK(s.base.d_y == 8);
  CHECK(s.base.h == 2.5);
  CHECK(s.base.f_c == 30e9);
  CHECK(s.base.n_eff == 1.5);
  CHECK_THAT(s.base.sigma2, WithinRel(1e-11, 1e-15));
  CHECK(s.gamma_db.grid() == std::vector<double>{90, 95, 100, 105, 110});
  CHECK(s.m_values == std::vector<int>{1, 3, 5, 7});
  CHECK(s.mc.seed == 77);
  CHECK(s.mc.samples == 5000);
  CHECK(s.methods.closed_form);
  CHECK_FALSE(s.methods.monte_carlo);
  CHECK(s.methods.quadrature);
  CHECK(parse_config("gamma_db = 95:100").gamma_db.grid().size() == 21);
}

TEST_CASE("config errors name the offending line", "[sweep][config]") {
  CHECK(parse_error_line("h = -1") == 1);
  CHECK(parse_error_line("dy = 10\n\nwidth = 3") == 3);
  CHECK(parse_error_line("dy = 1O") == 1);
  CHECK(parse_error_line("dy = 10\ngamma_db = 110:1:90") == 2);
  CHECK(parse_error_line("gamma_db = 90:0:110") == 1);
  CHECK(parse_error_line("m = 5:1") == 1);
  CHECK(parse_error_line("m = 0,1") == 1);
  CHECK(parse_error_line("methods = closed,fast") == 1);
  CHECK(parse_error_line("figure = fig9") == 1);
  CHECK(parse_error_line("samples = 0") == 1);
  CHECK(parse_error_line("neff = 1") == 1);
  CHECK(parse_error_line("dx = 10,\n") == 1);
  CHECK(parse_error_line("just words") == 1);
  CHECK(parse_error_line("h = 3\nh = 4") == 2);
  CHECK(parse_error_line("seed =") == 1);
  CHECK_THROWS_WITH(parse_config("\nh = -1"), ContainsSubstring("line 2") && ContainsSubstring("h"));
  CHECK_THROWS_AS(parse_config("figure = fig3\ngamma_db = 90:1:95"), ConfigError);
}

TEST_CASE("command-line overrides beat the file", "[sweep][config]") {
  SpecOverrides file = parse_overrides("h = 2\ndy = 8\nseed = 3");
  SpecOverrides flags;
  apply_key(flags, "h", "4", 0);
  file.merge(flags);
  const SweepSpec s = resolve(file);
  CHECK(s.base.h == 4);
  CHECK(s.base.d_y == 8);
  CHECK(s.mc.seed == 3);
}

TEST_CASE("fig2 sweep structure", "[sweep]") {
  SweepSpec s = parse_config("methods = closed");
  const auto tables = run_fig2(s);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].name == "fig2_dx10");
  CHECK(tables[1].name == "fig2_dx30");
  for (const auto& t : tables) {
    CHECK(t.columns == std::vector<std::string>{"gamma_db", "rate_M1_closed", "rate_M2_closed",
                                                "rate_M10_closed"});
    REQUIRE(t.rows.size() == 81);
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
      for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][c] > t.rows[i - 1][c]);
    }
  }
  const auto& wide = tables[1].rows.front();
  CHECK(wide[0] == 90);
  CHECK(wide[3] > wide[2]);
  CHECK(wide[2] > wide[1]);
  for (const auto& row : tables[0].rows) {
    for (std::size_t c = 1; c < row.size(); ++c) {
      CHECK(row[c] >= 5);
      CHECK(row[c] <= 13);
    }
  }
}

TEST_CASE("fig2 Monte Carlo and quadrature columns follow the closed form", "[sweep][oracle]") {
  const SweepSpec s = parse_config("gamma_db = 90:5:110\nmethods = closed,mc,quad\nseed = 9");
  for (const auto& t : run_fig2(s)) {
    for (int m : s.m_values) {
      const std::string p = "rate_M" + std::to_string(m);
      const auto cf = column(t, p + "_closed");
      const auto mc = column(t, p + "_mc");
      const auto se = column(t, p + "_mc_se");
      const auto quad = column(t, p + "_quad");
      for (const auto& row : t.rows) {
        INFO(t.name << " M=" << m << " gamma=" << row[0]);
        CHECK(std::fabs(row[cf] - row[mc]) < 3 * row[se]);
        CHECK(std::fabs(row[cf] - row[quad]) < 1e-8 * row[quad]);
      }
    }
  }
}

TEST_CASE("fig3 sweep structure", "[sweep]") {
  const auto tables = run_fig3(parse_config("figure = fig3\nmethods = closed"));
  REQUIRE(tables.size() == 3);
  const auto& narrow = tables[0];
  CHECK(narrow.columns == std::vector<std::string>{"M", "pde_closed"});
  CHECK(narrow.rows[1][0] == 2);
  CHECK(narrow.rows[1][1] > 0.95);
  for (const auto& t : tables) {
    REQUIRE(t.rows.size() == 20);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][1] >= t.rows[i - 1][1]);
  }
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(tables[0].rows[i][1] >= tables[1].rows[i][1]);
    CHECK(tables[1].rows[i][1] >= tables[2].rows[i][1]);
  }
}

TEST_CASE("fig3 closed form matches the golden files", "[sweep][golden]") {
  const auto tables = run_fig3(parse_config("figure = fig3\nmethods = closed"));
  for (const auto& t : tables) {
    const SweepTable golden = read_csv(fs::path(PINCHRATE_GOLDEN_DIR) / (t.name + ".csv"));
    REQUIRE(golden.columns == t.columns);
    REQUIRE(golden.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(golden.rows[i][0] == t.rows[i][0]);
      CHECK_THAT(t.rows[i][1], WithinRel(golden.rows[i][1], 1e-12));
    }
  }
}

TEST_CASE("sweeps are independent of worker count", "[sweep][determinism]") {
  const SweepSpec s = parse_config("figure = fig3\nm = 1:6\nsamples = 20000\nmethods = closed,mc");
  const auto one = run_fig3(s, 1);
  const auto four = run_fig3(s, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].rows == four[i].rows);

  const fs::path a = scratch_dir("det_a");
  const fs::path b = scratch_dir("det_b");
  const auto files_a = write_run(s, one, a, Format::csv);
  const auto files_b = write_run(s, four, b, Format::csv);
  REQUIRE(files_a.size() == files_b.size());
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    CHECK(files_a[i].filename() == files_b[i].filename());
    CHECK(slurp(files_a[i]) == slurp(files_b[i]));
  }
}

TEST_CASE("emit formats", "[sweep][emit]") {
  const fs::path dir = scratch_dir("emit");
  SweepTable empty{"empty", {"M", "pde_closed"}, {}, {}};
  emit(empty, dir / "empty.csv", Format::csv);
  CHECK(slurp(dir / "empty.csv") == "M,pde_closed\r\n");
  emit(empty, dir / "empty.dat", Format::dat);
  CHECK(slurp(dir / "empty.dat") == "# M pde_closed\n");

  SweepTable t{"t", {"x", "a", "b"}, {{0.1, 1.0 / 3, -2.5e-300}, {2, std::nextafter(1.0, 2.0), 7}},
               {}};
  emit(t, dir / "t.csv", Format::csv);
  const SweepTable back = read_csv(dir / "t.csv");
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);

  emit(t, dir / "t.dat", Format::dat);
  CHECK(slurp(dir / "t.dat") ==
        "# x a\n0.10000000000000001 0.33333333333333331\n2 1.0000000000000002\n\n\n"
        "# x b\n0.10000000000000001 -2.5e-300\n2 7\n");

  CHECK_THROWS_AS(emit(t, dir / "missing" / "t.csv", Format::csv), IoError);
  CHECK_THROWS_WITH(read_csv(dir / "nope.csv"), ContainsSubstring("nope.csv"));
}

TEST_CASE("metadata sidecar", "[sweep][emit]") {
  const SweepSpec s = parse_config("figure = fig3\nm = 1,2\ndx = 10\nmethods = closed\nseed = 5");
  const auto tables = run_fig3(s);
  const fs::path dir = scratch_dir("meta");
  const auto files = write_run(s, tables, dir, Format::dat);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "fig3_dx10.dat");
  CHECK(files[1].filename() == "fig3.meta.json");
  const auto meta = nlohmann::json::parse(slurp(files[1]));
  CHECK(meta["figure"] == "fig3");
  CHECK(meta["seed"] == 5);
  CHECK(meta["version"] == kToolVersion);
  CHECK(meta["sigma2_dbm"] == -90.0);
  CHECK(meta["tables"][0]["file"] == "fig3_dx10.dat");
  CHECK(meta["tables"][0]["rows"] == 2);
  CHECK_FALSE(meta.contains("workers"));
}
