#pragma once

#include <functional>

#include "toa/errors.hpp"

namespace toa {

/// Result of a one-dimensional minimization.
struct MinimizeResult {
  double argmin = 0.0;
  double min_value = 0.0;
  int iterations = 0;
  bool converged = false;  // true implies final bracket width < abs_tol
};

/// Tolerances for scalar minimization and root bracketing.
struct OptimizeSpec {
  double abs_tol = 1e-10;  // on the argument
  int max_iterations = 200;
};

/// Brent minimization (golden section with parabolic steps) of a function
/// assumed unimodal on (lo, hi).
MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               double lo, double hi,
                               const OptimizeSpec& spec = {});

/// Brent root bracketing on (lo, hi); requires f(lo) * f(hi) < 0.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const OptimizeSpec& spec = {});

}  // namespace toa
