#pragma once

#include <string>
#include <vector>

#include "toa/detector.hpp"
#include "toa/state.hpp"

namespace toa {

/// Policy for the uniform time grid of an arrival distribution. The window
/// is centered on the stationary-phase arrival time and sized from the
/// spatial and dispersive spreads of the (reweighted) state; the point count
/// grows if needed so the grid resolves the fastest energy beat present.
struct TimeGridSpec {
  int points = 2048;
  double halfwidth_factor = 10.0;
};

/// Sampled time-of-arrival density at a fixed detector position.
struct ArrivalDistribution {
  double detector_x = 0.0;
  std::vector<double> t;
  std::vector<double> density;  // renormalized: trapezoid integral = 1
  double norm = 0.0;            // trapezoid integral before renormalization
  double min_density = 0.0;     // pre-normalization minimum
  bool negative_dip = false;    // min below -1e-6 * peak
  std::string state_ref;
  std::string detector_ref;

  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

/// Time grid for a state/detector pair at detector position x.
std::vector<double> make_time_grid(const MomentumState& s, double x,
                                   const TimeGridSpec& spec = {});

/// General kernel route: the double momentum integral of the reweighted
/// state against the localization kernel. An explicit grid pins comparisons
/// between routes; when empty the policy grid is used.
ArrivalDistribution arrival_density(const MomentumState& s,
                                    const LocalizationKernel& kernel, double x,
                                    const TimeGridSpec& spec = {},
                                    const std::vector<double>& t_grid = {});

/// Maximal-localization fast path: the density factorizes into the squared
/// modulus of a single momentum integral per time point. tau and delta tag
/// the detector; the maximal-localization density does not depend on them.
ArrivalDistribution arrival_density_amplitude(
    const MomentumState& s, double x, double tau, double delta,
    const TimeGridSpec& spec = {}, const std::vector<double>& t_grid = {});

/// Cross-check route through the pointer-kernel convolution of the
/// 1/sqrt(2 eps) wave function. The exponential pointer spectrum integrates
/// in closed form against the momentum representation, leaving one weighted
/// amplitude integral per time point; valid for small tau, delta.
ArrivalDistribution arrival_density_phillips(
    const MomentumState& s, double x, double tau, double delta,
    const TimeGridSpec& spec = {}, const std::vector<double>& t_grid = {});

/// Non-relativistic reference density with weight sqrt(p/m) and quadratic
/// dispersion p^2/2m.
ArrivalDistribution kijowski_density(const MomentumState& s, double x,
                                     const TimeGridSpec& spec = {},
                                     const std::vector<double>& t_grid = {});

/// Normalized current -Im[Phi* dPhi/dx] of the 1/sqrt(2 eps) wave function,
/// sampled on the given time grid; approximates the arrival density for
/// almost monochromatic states.
std::vector<double> phillips_current(const MomentumState& s, double x,
                                     const std::vector<double>& t_grid);

/// L1 distance of two normalized distributions on the same grid.
double l1_distance(const ArrivalDistribution& a, const ArrivalDistribution& b);

/// Positive-momentum projection: zeroes density-matrix elements with
/// p p' < 0 and renormalizes the trace. Throws ZeroMass when nothing
/// remains.
DensityMatrixGrid restrict_positive(const DensityMatrixGrid& rho);

/// Full-line time integral of the unnormalized unit-kernel arrival density
/// of rho, split into the contributions of the two stationary branches
/// p' = p and p' = -p. The grid must be symmetric about zero.
struct ThetaTotals {
  double diagonal = 0.0;
  double antidiagonal = 0.0;
};
ThetaTotals time_integrated_totals(const DensityMatrixGrid& rho, double x);

}  // namespace toa
