#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "toa/errors.hpp"

namespace toa {

enum class DetectorKind { maximal, fully_decoherent, coherent, covariant, ideal };

std::string to_string(DetectorKind k);

/// Absorption coefficient alpha(p) with log-derivatives.
///
/// exp_family parameterizes
///   ln alpha = ln(coeff) - p_log ln p - e_log ln eps_p
///              - p_lin p - e_lin eps_p - p_quad p^2,
/// which covers constants, power laws and exponential attenuation in one
/// closed form with analytic first and second log-derivatives. Tabulated
/// coefficients are spline-interpolated in log space; their derivatives use
/// central differences with step 1e-4 * p.
struct Absorption {
  enum class Form { constant, exp_family, table };
  Form form = Form::constant;

  double value = 1.0;  // constant

  double coeff = 1.0, p_log = 0.0, e_log = 0.0;  // exp_family
  double p_lin = 0.0, e_lin = 0.0, p_quad = 0.0;

  std::vector<double> table_p, table_alpha;  // table

  double log_alpha(double p, double mass) const;
  double dlog_alpha(double p, double mass) const;
  double d2log_alpha(double p, double mass) const;
  void validate() const;
};

/// Lorentz-invariant pointer spectrum Sigma(z), z = E^2 - K^2.
struct CovariantSigma {
  enum class Form { exponential, power };
  Form form = Form::exponential;
  double rate = 1.0;      // exponential: Sigma = exp(-rate z)
  double exponent = 1.0;  // power: Sigma = z^-exponent

  double log_sigma(double z) const;
  double dlog_sigma(double z) const;
  void validate() const;
};

/// Dimensionless record-spread profile f(s) of an ideal detector, with its
/// characteristic function fhat(w) = integral f(s) exp(i w s) ds.
struct IdealProfile {
  enum class Form { gaussian };
  Form form = Form::gaussian;
  double width = 1.0;  // standard deviation of f

  double density(double s) const;
  double char_fn(double w) const;
  double variance() const { return width * width; }
  void validate() const;
};

/// Tagged detector family with its parameters.
struct DetectorModel {
  DetectorKind kind = DetectorKind::maximal;
  double tau = 0.0;    // decoherence time (maximal)
  double delta = 0.0;  // localization length (maximal)
  Absorption alpha;    // fully_decoherent / coherent
  CovariantSigma sigma;  // covariant
  IdealProfile profile;  // ideal

  void validate() const;
  std::string label() const;
};

/// Evaluable matrix elements L(p, p') of the localization operator.
///
/// The kernel is symmetric, real, and satisfies L(p, p) = 1 exactly. All
/// family closed forms are evaluated in log space so extreme absorption
/// ranges cannot overflow. log_alpha_reweight is the per-momentum log weight
/// applied to states before forming detection probabilities; it is null for
/// families that carry no absorption reweighting.
class LocalizationKernel {
 public:
  LocalizationKernel() = default;
  LocalizationKernel(DetectorModel det, double mass);

  double operator()(double p, double pp) const;
  DetectorKind kind() const { return det_.kind; }
  bool unit() const { return det_.kind == DetectorKind::maximal; }
  double mass() const { return mass_; }
  const DetectorModel& detector() const { return det_; }

  /// ln of the absorption reweight, or null when no reweighting applies.
  std::function<double(double)> log_alpha_reweight() const;

 private:
  DetectorModel det_;
  double mass_ = 1.0;
};

LocalizationKernel localization_kernel(const DetectorModel& det, double mass);

/// Closed-form detection width sigma^2(p) (second moment of the record
/// spread), per family. Derived from the on-shell curvature of the pointer
/// spectrum; each form is cross-checked in the tests against a numerical
/// second derivative of the kernel anti-diagonal.
double detection_width(const DetectorModel& det, double p, double mass);

/// -d^2/dxi^2 of L(p + xi/2, p - xi/2) at xi = 0, by Richardson-extrapolated
/// central differences. Independent of detection_width's closed forms.
double detection_width_numeric(const DetectorModel& det, double p, double mass);

struct SpreadGridSpec {
  int n = 2048;            // Fourier grid size
  double decay_cut = 1e-13;  // |u~| threshold used to pick the xi window
};

/// Record-spread density u_p(x): the Fourier transform of the kernel
/// anti-diagonal, sampled on a uniform grid. Non-positive kernels produce a
/// signed density and are flagged.
struct RecordSpread {
  double momentum = 0.0;
  double dx = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  double total = 0.0;          // sum u dx
  double mean = 0.0;           // sum x u dx
  double second_moment = 0.0;  // sum x^2 u dx
  double min_u = 0.0;
  double xi_max = 0.0;
  bool regular = false;  // min u >= -1e-9 * max u
};

RecordSpread record_spread(const DetectorModel& det, double p, double mass,
                           const SpreadGridSpec& grid = {});

/// Gram-matrix positivity probe of the kernel on an n-point grid.
struct RegularityReport {
  bool regular = false;  // lambda_min >= -1e-9 * lambda_max
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double max_offdiag = 0.0;  // max |L(p, p')|, p != p'
  bool cs_bound_ok = false;  // max_offdiag <= 1 + 1e-12
  int grid_n = 0;
};

RegularityReport regularity_check(const DetectorModel& det, double p_lo,
                                  double p_hi, double mass, int n = 64);

/// Closed forms of the maximal-localization detector: the pointer kernel
/// S(t, x) and the absorption coefficient alpha(p).
struct MaximalForms {
  double tau = 0.0;
  double delta = 0.0;
  std::complex<double> S(double t, double x) const;
  double alpha(double p, double mass) const;
};

MaximalForms maximal_detector_forms(double tau, double delta);

}  // namespace toa
