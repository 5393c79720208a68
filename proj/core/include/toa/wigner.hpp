#pragma once

#include <vector>

#include "toa/state.hpp"

namespace toa {

struct WignerGridSpec {
  int n_p = 96;
  int n_x = 96;
  double x_halfwidth_sigmas = 8.0;
  double marginal_tol = 1e-4;  // L1 gates for the consistency checks
};

/// Phase-space quasi-probability W(xbar, pbar) sampled on a Gauss-Legendre
/// product grid. Values are stored row-major as values[ip * n_x + ix].
struct WignerState {
  std::vector<double> p_nodes, p_weights;
  std::vector<double> x_nodes, x_weights;
  std::vector<double> values;
  double mass = 1.0;

  double at(std::size_t ip, std::size_t ix) const {
    return values[ip * x_nodes.size() + ix];
  }
  double total() const;
  /// integral over xbar at fixed p-node
  double momentum_marginal(std::size_t ip) const;
};

/// W(xbar, pbar) = (1/2pi) integral dxi psi(pbar + xi/2) conj(psi(pbar - xi/2))
/// exp(i xi xbar). Throws GridTooCoarse when the momentum marginal fails to
/// reproduce |psi|^2 at the spec tolerance.
WignerState wigner_function(const MomentumState& s,
                            const WignerGridSpec& grid = {});

}  // namespace toa
