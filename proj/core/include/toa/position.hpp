#pragma once

#include <string>
#include <vector>

#include "toa/detector.hpp"
#include "toa/state.hpp"

namespace toa {

struct PositionGridSpec {
  int points = 2048;
  double halfwidth_factor = 10.0;
};

/// Fixed-time position density built from the same localization kernel as
/// the arrival density, with the velocity-weighted state transformation.
struct PositionDistribution {
  double time_t = 0.0;
  std::vector<double> x;
  std::vector<double> density;  // renormalized: trapezoid integral = 1
  double norm = 0.0;
  double min_density = 0.0;
  bool negative_dip = false;
  std::string state_ref;
  std::string detector_ref;
};

std::vector<double> make_position_grid(const MomentumState& s, double t,
                                       const PositionGridSpec& spec = {});

PositionDistribution position_density(const MomentumState& s,
                                      const LocalizationKernel& kernel,
                                      double t,
                                      const PositionGridSpec& spec = {},
                                      const std::vector<double>& x_grid = {});

/// Pointwise evaluation for unit kernels (used by the boost exhibit).
double position_density_at(const MomentumState& s,
                           const LocalizationKernel& kernel, double t,
                           double x);

/// Newton-Wigner reference: squared modulus of the single integral of the
/// velocity-weighted amplitude, normalized on the grid.
PositionDistribution newton_wigner_density(const MomentumState& s, double t,
                                           const PositionGridSpec& spec = {},
                                           const std::vector<double>& x_grid = {});

/// State transported by a Lorentz boost of the given rapidity.
MomentumState boosted_state(const MomentumState& s, double rapidity);

/// Structural comparison of the arrival-time and position probability maps.
struct DualityReport {
  double max_reweight_ratio_dev = 0.0;  // vs sqrt(v(p) v(p')), pointwise
  bool kernel_values_identical = false;  // bit-identical samples of L
  double rapidity = 0.0;
  double boost_l1 = 0.0;  // gap between boosted and scalar-transported density
};

DualityReport duality_check(const MomentumState& s, const DetectorModel& det,
                            double x_fixed, double t_fixed);

}  // namespace toa
