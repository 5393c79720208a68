#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "toa/position.hpp"

using namespace toa;

namespace {

DetectorModel maximal_det() {
  DetectorModel d;
  d.kind = DetectorKind::maximal;
  d.tau = 1e-2;
  d.delta = 1e-2;
  return d;
}

DetectorModel fd_gaussian_spread(double g) {
  DetectorModel d;
  d.kind = DetectorKind::fully_decoherent;
  d.alpha.form = Absorption::Form::exp_family;
  d.alpha.coeff = 1e-3;
  d.alpha.p_log = 1.0;
  d.alpha.p_quad = -g;
  return d;
}

double l1_on_grid(const std::vector<double>& x, const std::vector<double>& a,
                  const std::vector<double>& b) {
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    l1 += 0.5 * (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1])) *
          (x[i + 1] - x[i]);
  return l1;
}

double peak_x(const PositionDistribution& d) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < d.density.size(); ++i)
    if (d.density[i] > d.density[k]) k = i;
  return d.x[k];
}

}  // namespace

TEST_CASE("maximal kernel gives the velocity-weighted single-integral form") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const LocalizationKernel kern(maximal_det(), 1.0);
  const PositionDistribution a = position_density(s, kern, 10.0);
  const PositionDistribution b = newton_wigner_density(s, 10.0, {}, a.x);
  CHECK(std::abs(a.norm - 1.0) < 1e-6);
  CHECK(l1_on_grid(a.x, a.density, b.density) < 1e-6);
}

TEST_CASE("normalization for a non-unit kernel") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const LocalizationKernel kern(fd_gaussian_spread(4.0), 1.0);
  const PositionDistribution d = position_density(s, kern, 5.0);
  CHECK(std::abs(d.norm - 1.0) < 1e-6);
  CHECK(d.min_density > -1e-9);
}

TEST_CASE("time evolution moves the peak at the group velocity") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const LocalizationKernel kern(maximal_det(), 1.0);
  const PositionDistribution d0 = position_density(s, kern, 0.0);
  const PositionDistribution d1 = position_density(s, kern, 40.0);
  const double v0 = s.velocity(1.0);
  CHECK(peak_x(d1) - peak_x(d0) == doctest::Approx(40.0 * v0).epsilon(2e-3));
}

TEST_CASE("spatial translation covariance") {
  const double a = 4.0;
  const MomentumState s0 = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const MomentumState sa = make_gaussian_state(1.0, 0.05, a, 1.0);
  const LocalizationKernel kern(maximal_det(), 1.0);
  const PositionDistribution d0 = position_density(s0, kern, 0.0);
  std::vector<double> shifted = d0.x;
  for (double& x : shifted) x += a;
  const PositionDistribution da = position_density(sa, kern, 0.0, {}, shifted);
  CHECK(l1_on_grid(d0.x, d0.density, da.density) < 1e-8);
}

TEST_CASE("boosted states stay normalized") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const MomentumState sb = boosted_state(s, 0.5);
  CHECK(momentum_expectation(sb, [](double) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sb.p_min() > s.p_min());
}

TEST_CASE("duality of the arrival and position maps") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const DualityReport rep = duality_check(s, maximal_det(), 50.0, 0.0);
  CHECK(rep.max_reweight_ratio_dev < 1e-12);
  CHECK(rep.kernel_values_identical);
  CHECK(rep.rapidity == 0.5);
  // the position density is not a spacetime scalar
  CHECK(rep.boost_l1 > 0.01);
}
