// Command-line front end: experiment configs in, CSV/JSON artifacts out.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "toa/arrival.hpp"
#include "toa/bounds.hpp"
#include "toa/io.hpp"
#include "toa/moments.hpp"
#include "toa/position.hpp"

namespace fs = std::filesystem;
using toa::json;

namespace {

struct CommonOpts {
  std::string config;
  std::string out = ".";
  std::string route;  // overrides config when set
  double tol = 0.0;   // overrides config tolerances when set
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts.config, "experiment config JSON");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--tol", opts.tol, "override quadrature abs tolerance");
}

toa::ExperimentConfig load(const CommonOpts& opts) {
  toa::ExperimentConfig cfg = toa::load_config(opts.config);
  if (!opts.route.empty()) {
    if (opts.route != "kernel" && opts.route != "amplitude" &&
        opts.route != "phillips")
      throw toa::ConfigError("route must be kernel|amplitude|phillips");
    cfg.route = opts.route;
  }
  if (opts.tol > 0.0) cfg.abs_tol = opts.tol;
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  toa::atomic_write(path, j.dump(2) + "\n");
}

int cmd_density(const CommonOpts& opts) {
  const toa::ExperimentConfig cfg = load(opts);
  if (!cfg.has_x) throw toa::ConfigError("density needs 'x'");
  const toa::MomentumState state = toa::load_state(cfg.state);
  const toa::DetectorModel det = toa::load_detector(cfg.detector);
  toa::TimeGridSpec grid;
  grid.points = cfg.grid_points;

  toa::ArrivalDistribution dist;
  if (cfg.route == "kernel") {
    dist = toa::arrival_density(state, toa::localization_kernel(det, state.mass()),
                                cfg.x, grid);
  } else if (cfg.route == "amplitude") {
    if (det.kind != toa::DetectorKind::maximal)
      throw toa::ConfigError("amplitude route requires a maximal detector");
    dist = toa::arrival_density_amplitude(state, cfg.x, cfg.tau, cfg.delta, grid);
  } else {
    if (det.kind != toa::DetectorKind::maximal)
      throw toa::ConfigError("phillips route requires a maximal detector");
    dist = toa::arrival_density_phillips(state, cfg.x, cfg.tau, cfg.delta, grid);
  }

  const fs::path out(opts.out);
  toa::write_csv(out / "density.csv", "t", "density", dist.t, dist.density);
  json meta = toa::arrival_meta(dist, cfg.state, cfg.detector);
  meta["route"] = cfg.route;
  write_json(out / "density_meta.json", meta);
  return 0;
}

int cmd_moments(const CommonOpts& opts) {
  const toa::ExperimentConfig cfg = load(opts);
  if (!cfg.has_x) throw toa::ConfigError("moments needs 'x'");
  const toa::MomentumState state = toa::load_state(cfg.state);
  const toa::DetectorModel det = toa::load_detector(cfg.detector);
  const toa::LocalizationKernel kernel = toa::localization_kernel(det, state.mass());

  toa::QuadratureSpec qspec;
  qspec.abs_tol = cfg.abs_tol;
  qspec.rel_tol = cfg.rel_tol;
  const toa::ArrivalMoments m =
      toa::variance_decomposition(state, det, cfg.x, state.mass(), qspec);
  toa::TimeGridSpec grid;
  grid.points = cfg.grid_points;
  const toa::ArrivalDistribution dist =
      toa::arrival_density(state, kernel, cfg.x, grid);
  json rep = toa::moments_report(m, toa::mean_arrival(dist),
                                 toa::variance_arrival(dist));
  rep["x"] = cfg.x;
  rep["detector"] = cfg.detector;
  rep["state"] = cfg.state;
  write_json(fs::path(opts.out) / "moments.json", rep);
  return 0;
}

int cmd_position(const CommonOpts& opts) {
  const toa::ExperimentConfig cfg = load(opts);
  if (!cfg.has_t) throw toa::ConfigError("position needs 't'");
  const toa::MomentumState state = toa::load_state(cfg.state);
  const toa::DetectorModel det = toa::load_detector(cfg.detector);
  toa::PositionGridSpec grid;
  grid.points = cfg.grid_points;
  const toa::PositionDistribution dist = toa::position_density(
      state, toa::localization_kernel(det, state.mass()), cfg.t, grid);

  const fs::path out(opts.out);
  toa::write_csv(out / "position.csv", "x", "density", dist.x, dist.density);
  write_json(out / "position_meta.json",
             toa::position_meta(dist, cfg.state, cfg.detector));
  return 0;
}

json paper_constants_table() {
  json table = json::array();
  {
    const toa::VariationalResult v =
        toa::variational_constant(toa::Regime::nonrel, 0.0);
    json row = toa::variational_json(v);
    row["name"] = "variational_nonrel_constant";
    table.push_back(row);
  }
  {
    const toa::VariationalResult v =
        toa::variational_constant(toa::Regime::ultrarel, 1e4);
    json row = toa::variational_json(v);
    row["name"] = "variational_ultrarel_constant";
    table.push_back(row);
  }
  {
    const toa::LevyCoefficient c =
        toa::levy_bound_constants(100.0, 1.0, toa::Regime::ultrarel);
    json row = toa::levy_coefficient_json(c);
    row["name"] = "levy_ultrarel_coefficient";
    table.push_back(row);
  }
  {
    const toa::LevyCoefficient c =
        toa::levy_bound_constants(0.01, 1.0, toa::Regime::nonrel);
    json row = toa::levy_coefficient_json(c);
    row["name"] = "levy_nonrel_coefficient";
    table.push_back(row);
  }
  return table;
}

int cmd_bounds(const CommonOpts& opts, const std::string& suite, int n,
               long long seed, bool seed_set) {
  const fs::path out(opts.out);
  if (!suite.empty()) {
    if (suite != "paper-constants")
      throw toa::ConfigError("unknown suite '" + suite + "'");
    json rep;
    rep["suite"] = "paper-constants";
    rep["constants"] = paper_constants_table();
    write_json(out / "paper_constants.json", rep);
    std::cout << "wrote " << (out / "paper_constants.json").string() << "\n";
    return 0;
  }
  if (n > 0) {
    if (!seed_set)
      throw toa::ConfigError("randomized runs require an explicit --seed");
    const toa::SuiteOutcome o =
        toa::inequality_suite(n, static_cast<std::uint64_t>(seed), 1.0);
    write_json(out / "inequality_suite.json", toa::suite_outcome_json(o));
    std::cout << "satisfied " << o.satisfied << "/" << o.n << "\n";
    return 0;
  }
  // Single-state report driven by the config.
  const toa::ExperimentConfig cfg = load(opts);
  const toa::MomentumState state = toa::load_state(cfg.state);
  double lhs = 0.0;
  if (cfg.has_x) {
    const toa::ArrivalDistribution d =
        toa::arrival_density_amplitude(state, cfg.x, cfg.tau, cfg.delta);
    lhs = toa::variance_arrival(d);
  }
  toa::QuadratureSpec qspec;
  qspec.abs_tol = cfg.abs_tol;
  qspec.rel_tol = cfg.rel_tol;
  const toa::BoundReport rep = toa::fundamental_bound(state, lhs, qspec);
  json j = toa::bound_report_json(rep);
  if (!cfg.has_x) {
    // no detector position given, so no measured variance to compare
    j.erase("lhs");
    j.erase("satisfied");
    j.erase("slack");
  }
  auto num_or_inf = [](double v) {
    return std::isfinite(v) ? json(v) : json("inf");
  };
  const toa::KineticBound kb = toa::kinetic_bound(state);
  j["kinetic"] = {{"mean_ek", num_or_inf(kb.mean_ek)},
                  {"product", num_or_inf(kb.product)},
                  {"passes_quarter", kb.passes_quarter},
                  {"regime_ok", kb.regime_ok}};
  const toa::UltrarelReport ur = toa::ultrarel_bounds(state, state.mass());
  j["h6_chain"] = {{"h6_term", ur.h6_term},
                   {"product", num_or_inf(ur.product)},
                   {"threshold", ur.threshold},
                   {"satisfied", ur.satisfied},
                   {"rhs_ratio", ur.rhs_ratio}};
  j["state"] = cfg.state;
  if (cfg.has_x) j["x"] = cfg.x;
  write_json(out / "bounds.json", j);
  return 0;
}

int cmd_suite(const CommonOpts& opts, int n, long long seed, bool seed_set) {
  if (!seed_set) throw toa::ConfigError("suite requires an explicit --seed");
  const fs::path out(opts.out);
  json rep;
  rep["constants"] = paper_constants_table();
  const toa::SuiteOutcome o =
      toa::inequality_suite(n, static_cast<std::uint64_t>(seed), 1.0);
  rep["inequality_suite"] = toa::suite_outcome_json(o);
  write_json(out / "suite_report.json", rep);

  std::string table = "name,value,published\n";
  for (const auto& row : rep["constants"]) {
    const double value = row.contains("constant")
                             ? row["constant"].get<double>()
                             : row["coefficient"].get<double>();
    table += row["name"].get<std::string>() + "," + toa::fmt17(value) + "," +
             toa::fmt17(row["published_value"].get<double>()) + "\n";
  }
  toa::atomic_write(out / "paper_constants.csv", table);
  std::cout << "inequality suite: " << o.satisfied << "/" << o.n
            << " satisfied\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-of-arrival densities, localization kernels, and "
               "time-energy bound reports for relativistic spinless particles"};
  app.require_subcommand(1);

  CommonOpts density_opts, moments_opts, position_opts, bounds_opts, suite_opts;
  std::string bounds_suite;
  int bounds_n = 0, suite_n = 100;
  long long bounds_seed = 0, suite_seed = 0;
  bool bounds_seed_set = false, suite_seed_set = false;

  auto* density = app.add_subcommand("density", "time-of-arrival density CSV");
  add_common(density, density_opts);
  density->add_option("--route", density_opts.route, "kernel|amplitude|phillips");

  auto* moments = app.add_subcommand("moments", "arrival moments JSON report");
  add_common(moments, moments_opts);

  auto* position = app.add_subcommand("position", "fixed-time position density");
  add_common(position, position_opts);

  auto* bounds = app.add_subcommand("bounds", "uncertainty bound reports");
  add_common(bounds, bounds_opts, false);
  bounds->add_option("--suite", bounds_suite, "named suite (paper-constants)");
  bounds->add_option("--n", bounds_n, "randomized inequality runs");
  bounds->add_option("--seed", bounds_seed, "seed for randomized runs")
      ->each([&](const std::string&) { bounds_seed_set = true; });

  auto* suite = app.add_subcommand("suite", "constants table + inequality suite");
  suite->add_option("--out", suite_opts.out, "output directory");
  suite->add_option("--n", suite_n, "inequality suite size");
  suite->add_option("--seed", suite_seed, "seed (required)")
      ->each([&](const std::string&) { suite_seed_set = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (density->parsed()) return cmd_density(density_opts);
    if (moments->parsed()) return cmd_moments(moments_opts);
    if (position->parsed()) return cmd_position(position_opts);
    if (bounds->parsed())
      return cmd_bounds(bounds_opts, bounds_suite, bounds_n, bounds_seed,
                        bounds_seed_set);
    if (suite->parsed())
      return cmd_suite(suite_opts, suite_n, suite_seed, suite_seed_set);
  } catch (const toa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const toa::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
