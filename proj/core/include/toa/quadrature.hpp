#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "toa/errors.hpp"

namespace toa {

/// Tolerances and budget for the adaptive quadrature engine.
///
/// The estimate is accepted once the accumulated error indicator drops below
/// max(abs_tol, rel_tol * |result|). Subdivision stops with NonConvergence
/// when more than max_subdivisions panels would be needed.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 4000;
  int nodes_per_panel = 15;  // Gauss-Legendre order of the fine panel rule

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw DomainError("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 1)
      throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    if (nodes_per_panel < 2)
      throw DomainError("QuadratureSpec: nodes_per_panel must be >= 2");
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending in node.
/// Computed by Newton iteration on the Legendre recurrence; results are
/// deterministic and accurate to machine precision.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendre& get(int n);  // cached per order

  /// Nodes/weights mapped to [a, b].
  void mapped(double a, double b, std::vector<double>& x,
              std::vector<double>& w) const;
};

/// Adaptive integral of a real function over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

/// Adaptive integral of a complex function over [a, b].
std::complex<double> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadratureSpec& spec = {});

/// Integral over [a, +inf) via the rational map p = a + scale*s/(1-s).
/// The map sends s in [0,1) to the half line; the s-integral is handled by
/// the open panel rule, so integrable endpoint singularities are tolerated.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               double a, const QuadratureSpec& spec = {},
                               double scale = 1.0);

/// Pre-splits [a, b] into panels no wider than pi / max_abs_freq before
/// adaptive refinement, so that no panel spans more than half an oscillation
/// of exp(i * freq * x) phases present in f.
double integrate_oscillatory(const std::function<double(double)>& f, double a,
                             double b, double max_abs_freq,
                             const QuadratureSpec& spec = {});

std::complex<double> integrate_oscillatory_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double max_abs_freq, const QuadratureSpec& spec = {});

/// Axis-aligned rectangle [ax, bx] x [ay, by].
struct Rectangle {
  double ax, bx, ay, by;
};

/// Iterated adaptive integral of f(x, y) over a rectangle.
std::complex<double> integrate2d(
    const std::function<std::complex<double>(double, double)>& f,
    const Rectangle& domain, const QuadratureSpec& spec = {});

}  // namespace toa
