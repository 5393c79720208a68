#pragma once

#include <complex>
#include <vector>

#include "toa/arrival.hpp"
#include "toa/detector.hpp"
#include "toa/state.hpp"
#include "toa/wigner.hpp"

namespace toa {

/// <t> of a normalized arrival distribution.
double mean_arrival(const ArrivalDistribution& dist);

/// Var(t) of a normalized arrival distribution.
double variance_arrival(const ArrivalDistribution& dist);

struct ClassicalStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Phase-space mean and variance of the classical arrival observable
/// T_c = (x - xbar) / v(pbar) under a Wigner distribution.
ClassicalStats classical_toa_stats(const WignerState& w, double x);

/// Closed-form decomposition of the arrival-time variance into the classical
/// spread, the mass term (m^4/4) <1/(eps^2 p^4)>, and the detector term
/// <sigma^2(p) / v^2>. All expectations are taken in the absorption-
/// reweighted state actually measured by the detector.
struct ArrivalMoments {
  double mean = 0.0;
  double variance = 0.0;  // sum of the three terms below
  double var_tc = 0.0;
  double term_mass = 0.0;
  double term_detector = 0.0;
};

ArrivalMoments variance_decomposition(const MomentumState& s,
                                      const DetectorModel& det, double x,
                                      double mass,
                                      const QuadratureSpec& spec = {});

/// Z(mu, x) = integral dt P(t, x) exp(i mu t) for each requested mu.
std::vector<std::complex<double>> moment_generating(
    const MomentumState& s, const LocalizationKernel& kernel, double x,
    const std::vector<double>& mu_list);

/// Mean and variance recovered from ln Z by central differences with step
/// 1e-4 over the time scale of the distribution.
struct MgfEstimates {
  double mean = 0.0;
  double variance = 0.0;
  double mu_step = 0.0;
};

MgfEstimates mgf_mean_variance(const ArrivalDistribution& dist);

}  // namespace toa
