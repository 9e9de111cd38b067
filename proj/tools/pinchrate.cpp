// pinchrate: figure sweeps and oracle verification from the command line.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "pinchrate/sweep.hpp"
#include "pinchrate/verify.hpp"

namespace {

using namespace pinchrate;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string config;
  std::string out = ".";
  std::string format = "csv";
  unsigned workers = 0;
  // Flags that mirror config keys, applied over the file.
  std::vector<std::pair<std::string, std::string>> keys;
};

int do_run(const RunArgs& args) {
  cli::SpecOverrides o;
  if (!args.config.empty()) o = cli::parse_overrides(read_file(args.config));
  cli::SpecOverrides flags;
  for (const auto& [key, value] : args.keys) {
    try {
      cli::apply_key(flags, key, value, 0);
    } catch (const ParseError& e) {
      throw ConfigError("--" + key + ": " + e.what());
    }
  }
  o.merge(flags);
  const cli::SweepSpec spec = cli::resolve(o);
  const auto format = args.format == "dat" ? cli::Format::dat : cli::Format::csv;
  const auto tables = cli::run(spec, args.workers);
  for (const auto& path : cli::write_run(spec, tables, args.out, format)) {
    std::cout << path.string() << '\n';
  }
  return 0;
}

int do_verify(bool quick, unsigned workers) {
  const verify::Grid grid = quick ? verify::quick_grid() : verify::Grid{};
  const auto records = verify::triple_agreement(grid, workers);
  return verify::report(grid, records, std::cout) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic rate and discretization efficiency of two-state pinching-antenna systems"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Sweep a figure and write plot data");
  run->set_help_flag("--help", "Print this help message and exit");
  run->add_option("--config", run_args.config, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--format", run_args.format, "csv or dat")
      ->check(CLI::IsMember({"csv", "dat"}))
      ->capture_default_str();
  run->add_option("--workers", run_args.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();

  // name on the command line -> config key
  const std::vector<std::pair<std::string, std::string>> mirrored = {
      {"figure", "figure"}, {"dx", "dx"},           {"dy", "dy"},
      {"h", "h"},           {"fc-ghz", "fc_ghz"},   {"neff", "neff"},
      {"sigma2-dbm", "sigma2_dbm"}, {"gamma-db", "gamma_db"}, {"m", "m"},
      {"seed", "seed"},     {"samples", "samples"}, {"methods", "methods"},
  };
  std::vector<std::string> values(mirrored.size());
  for (std::size_t i = 0; i < mirrored.size(); ++i) {
    run->add_option("--" + mirrored[i].first, values[i],
                    "Overrides config key '" + mirrored[i].second + "'");
  }

  bool quick = false;
  unsigned verify_workers = 0;
  auto* ver = app.add_subcommand("verify", "Closed form vs quadrature vs Monte Carlo");
  ver->add_flag("--quick", quick, "Smaller grid and 2e5 samples");
  ver->add_option("--workers", verify_workers, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      for (std::size_t i = 0; i < mirrored.size(); ++i) {
        if (run->count("--" + mirrored[i].first) > 0) {
          run_args.keys.emplace_back(mirrored[i].second, values[i]);
        }
      }
      return do_run(run_args);
    }
    return do_verify(quick, verify_workers);
  } catch (const ParseError& e) {
    std::cerr << "pinchrate: config error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "pinchrate: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pinchrate: " << e.what() << '\n';
    return 1;
  }
}
