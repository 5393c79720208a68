#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "toa/errors.hpp"
#include "toa/quadrature.hpp"

namespace toa {

enum class StateFamily { gaussian, inverse_gaussian_kinetic, levy_energy, custom };

std::string to_string(StateFamily f);

/// Pure momentum-space state of a relativistic spinless particle in natural
/// units (hbar = c = 1). The amplitude is normalized on its support window:
/// integral of |psi(p)|^2 dp = 1. Support is strictly positive; the upper
/// edge may be +infinity for heavy-tailed families.
class MomentumState {
 public:
  using Amplitude = std::function<std::complex<double>(double)>;

  MomentumState() = default;
  MomentumState(Amplitude amp, double p_lo, double p_hi, double mass,
                StateFamily family, std::map<std::string, double> params,
                double phase_gradient = 0.0, double tail_scale = 1.0);

  std::complex<double> amplitude(double p) const { return amp_(p); }
  double density(double p) const { return std::norm(amp_(p)); }

  double p_min() const { return p_lo_; }
  double p_max() const { return p_hi_; }  // may be +inf
  bool bounded() const;
  double mass() const { return mass_; }
  StateFamily family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }

  double energy(double p) const;    // sqrt(p^2 + m^2)
  double velocity(double p) const;  // p / energy

  /// d(arg psi)/dp, constant for the built-in families (-x0 for the
  /// Gaussian family, 0 for the zero-phase families).
  double phase_gradient() const { return phase_gradient_; }

  /// Length scale of the improper tail map for unbounded supports.
  double tail_scale() const { return tail_scale_; }

  /// Mean and spread of |psi|^2 in momentum (bounded supports only).
  double mean_momentum() const;
  double momentum_spread() const;

  /// Center and spread of the position-space envelope, valid for states
  /// whose phase is linear in p (all built-in families).
  double position_center() const { return -phase_gradient_; }
  double position_spread() const;

 private:
  Amplitude amp_;
  double p_lo_ = 0.0, p_hi_ = 0.0;
  double mass_ = 1.0;
  StateFamily family_ = StateFamily::custom;
  std::map<std::string, double> params_;
  double phase_gradient_ = 0.0;
  double tail_scale_ = 1.0;
  mutable double mean_p_ = -1.0, sigma_p_ = -1.0, sigma_x_ = -1.0;  // lazy
};

/// Gaussian wave packet psi(p) ~ exp(-(p-p0)^2/(4 sigma_p^2) - i p x0),
/// truncated where the tail mass drops below 1e-12 and renormalized.
/// Throws SupportNotPositive when p0 - 5 sigma_p <= 0.
MomentumState make_gaussian_state(double p0, double sigma_p, double x0,
                                  double mass);

/// Zero-phase state whose kinetic-energy variable xi = eps_p/m - 1 follows
/// an inverse Gaussian density with mean xi0 and variance sigma_xi^2.
MomentumState make_inverse_gaussian_state(double xi0, double sigma_xi,
                                          double mass);

/// Zero-phase state whose energy E = eps_p >= m follows the one-sided
/// stable density ~ (E-m)^{-3/2} exp(-c_E / (2(E-m))) with scale c_E.
/// The energy variance of this family diverges.
MomentumState make_levy_energy_state(double c_E, double mass);

/// Wraps an arbitrary amplitude; it is renormalized on [p_lo, p_hi].
MomentumState make_custom_state(MomentumState::Amplitude amp, double p_lo,
                                double p_hi, double mass,
                                double phase_gradient = 0.0);

/// State with density proportional to exp(log_weight(p)) * |psi(p)|^2.
/// The reweighting is applied in log space and renormalized, so extreme
/// weight ranges stay finite.
MomentumState reweighted_state(const MomentumState& s,
                               const std::function<double(double)>& log_weight);

/// <f(p)> = integral f(p) |psi(p)|^2 dp over the support.
double momentum_expectation(const MomentumState& s,
                            const std::function<double(double)>& f,
                            const QuadratureSpec& spec = {});

/// Sampled momentum-space density matrix on a quadrature grid. Nodes may
/// include negative momenta for states prepared on the full line.
struct DensityMatrixGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<std::complex<double>> rho;  // row-major, Hermitian

  std::size_t size() const { return nodes.size(); }
  std::complex<double>& at(std::size_t i, std::size_t j) {
    return rho[i * nodes.size() + j];
  }
  const std::complex<double>& at(std::size_t i, std::size_t j) const {
    return rho[i * nodes.size() + j];
  }
  double trace() const;
  double hermiticity_defect() const;  // max |rho_ij - conj(rho_ji)|
};

/// Pure-state density matrix on Gauss-Legendre nodes of the state support.
DensityMatrixGrid density_matrix_from_state(const MomentumState& s, int n);

/// Pure-state density matrix of an arbitrary amplitude on [a, b] (which may
/// include negative momenta); the amplitude is normalized on the grid.
DensityMatrixGrid density_matrix_from_amplitude(
    const MomentumState::Amplitude& amp, double a, double b, int n);

}  // namespace toa
