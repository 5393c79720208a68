#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "toa/arrival.hpp"
#include "toa/bounds.hpp"
#include "toa/detector.hpp"
#include "toa/moments.hpp"
#include "toa/position.hpp"
#include "toa/state.hpp"

namespace toa {

using json = nlohmann::ordered_json;

/// Decimal rendering with 17 significant digits (round-trip exact).
std::string fmt17(double v);

MomentumState load_state(const json& j);
DetectorModel load_detector(const json& j);

json state_json(const MomentumState& s);
json detector_json(const DetectorModel& d);

/// Writes content to a temporary file in the target directory and renames it
/// into place, so failed runs never leave partial artifacts.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Two-column CSV (17 significant digits, '\n' line endings).
void write_csv(const std::filesystem::path& path, const std::string& col_a,
               const std::string& col_b, const std::vector<double>& a,
               const std::vector<double>& b);

json arrival_meta(const ArrivalDistribution& d, const json& state,
                  const json& detector);
json position_meta(const PositionDistribution& d, const json& state,
                   const json& detector);
json moments_report(const ArrivalMoments& m, double quadrature_mean,
                    double quadrature_variance);
json bound_report_json(const BoundReport& r);
json levy_coefficient_json(const LevyCoefficient& c);
json variational_json(const VariationalResult& v);
json suite_outcome_json(const SuiteOutcome& o);

/// Experiment definition driving one CLI command.
struct ExperimentConfig {
  json state;
  json detector;
  double x = 0.0;        // detector position (density, moments)
  double t = 0.0;        // slice time (position)
  bool has_x = false;
  bool has_t = false;
  std::string route = "kernel";  // kernel | amplitude | phillips
  int grid_points = 2048;
  double tau = 1e-2;
  double delta = 1e-2;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
};

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace toa
