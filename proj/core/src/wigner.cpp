#include "toa/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace toa {

double WignerState::total() const {
  double t = 0.0;
  for (std::size_t ip = 0; ip < p_nodes.size(); ++ip)
    for (std::size_t ix = 0; ix < x_nodes.size(); ++ix)
      t += p_weights[ip] * x_weights[ix] * at(ip, ix);
  return t;
}

double WignerState::momentum_marginal(std::size_t ip) const {
  double t = 0.0;
  for (std::size_t ix = 0; ix < x_nodes.size(); ++ix)
    t += x_weights[ix] * at(ip, ix);
  return t;
}

WignerState wigner_function(const MomentumState& s, const WignerGridSpec& grid) {
  if (!s.bounded())
    throw DomainError("wigner_function: unbounded support");
  WignerState w;
  w.mass = s.mass();
  GaussLegendre::get(grid.n_p).mapped(s.p_min(), s.p_max(), w.p_nodes,
                                      w.p_weights);
  const double x0 = s.position_center();
  const double sx = std::max(s.position_spread(), 1e-12);
  GaussLegendre::get(grid.n_x).mapped(x0 - grid.x_halfwidth_sigmas * sx,
                                      x0 + grid.x_halfwidth_sigmas * sx,
                                      w.x_nodes, w.x_weights);

  QuadratureSpec qspec;
  qspec.abs_tol = 1e-12;
  qspec.rel_tol = 1e-9;
  w.values.resize(w.p_nodes.size() * w.x_nodes.size());
  for (std::size_t ip = 0; ip < w.p_nodes.size(); ++ip) {
    const double p = w.p_nodes[ip];
    const double xi_max = 2.0 * std::min(p - s.p_min(), s.p_max() - p);
    for (std::size_t ix = 0; ix < w.x_nodes.size(); ++ix) {
      const double x = w.x_nodes[ix];
      double val = 0.0;
      if (xi_max > 0.0) {
        // The integrand is even in xi, so fold onto [0, xi_max].
        auto f = [&](double xi) {
          const std::complex<double> prod =
              s.amplitude(p + 0.5 * xi) * std::conj(s.amplitude(p - 0.5 * xi));
          return (prod * std::polar(1.0, xi * x)).real();
        };
        const double freq = std::abs(x + s.phase_gradient());
        val = integrate_oscillatory(std::function<double(double)>(f), 0.0,
                                    xi_max, freq, qspec) /
              M_PI;
      }
      w.values[ip * w.x_nodes.size() + ix] = val;
    }
  }

  // Marginal consistency gates.
  double l1 = 0.0, l1_ref = 0.0;
  for (std::size_t ip = 0; ip < w.p_nodes.size(); ++ip) {
    const double ref = s.density(w.p_nodes[ip]);
    l1 += w.p_weights[ip] * std::abs(w.momentum_marginal(ip) - ref);
    l1_ref += w.p_weights[ip] * ref;
  }
  if (l1 > grid.marginal_tol * l1_ref)
    throw GridTooCoarse("wigner_function: momentum marginal mismatch");
  if (std::abs(w.total() - 1.0) > grid.marginal_tol)
    throw GridTooCoarse("wigner_function: total mass deviates from 1");
  return w;
}

}  // namespace toa
