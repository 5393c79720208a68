#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "toa/arrival.hpp"
#include "toa/quadrature.hpp"

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

DetectorModel coherent_gaussian(double g) {
  DetectorModel d;
  d.kind = DetectorKind::coherent;
  d.alpha.form = Absorption::Form::exp_family;
  d.alpha.coeff = 5e-2;
  d.alpha.p_log = 1.0;
  d.alpha.p_quad = -g;
  return d;
}

DetectorModel ideal_gaussian() {
  DetectorModel d;
  d.kind = DetectorKind::ideal;
  d.profile.width = 1.0;
  return d;
}

double peak_time(const ArrivalDistribution& d) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < d.density.size(); ++i)
    if (d.density[i] > d.density[k]) k = i;
  return d.t[k];
}

double density_at(const ArrivalDistribution& d, double t) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < d.t.size(); ++i)
    if (std::abs(d.t[i] - t) < std::abs(d.t[k] - t)) k = i;
  return d.density[k];
}

}  // namespace

TEST_CASE("normalization and peak location for the maximal detector") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const LocalizationKernel kern(maximal_det(), 1.0);
  const ArrivalDistribution d = arrival_density(s, kern, 50.0);
  CHECK(std::abs(d.norm - 1.0) < 1e-6);
  CHECK_FALSE(d.negative_dip);
  // stationary phase: t* = x / v(p0) = x eps0 / p0
  CHECK(peak_time(d) == doctest::Approx(50.0 * std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("normalization holds for every regular detector family") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  for (const DetectorModel& det :
       {maximal_det(), fd_gaussian_spread(4.0), coherent_gaussian(3.0),
        ideal_gaussian()}) {
    const LocalizationKernel kern(det, 1.0);
    const ArrivalDistribution d = arrival_density(s, kern, 50.0);
    CHECK(std::abs(d.norm - 1.0) < 1e-6);
    CHECK(d.min_density > -1e-9);
  }
}

TEST_CASE("early times carry no probability for forward packets") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const ArrivalDistribution d = arrival_density_amplitude(s, 50.0, 0.0, 0.0);
  double peak = 0.0;
  for (double v : d.density) peak = std::max(peak, v);
  CHECK(density_at(d, -50.0 * std::sqrt(2.0)) < 1e-8 * peak);
}

TEST_CASE("kernel and amplitude routes agree for the maximal detector") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const std::vector<double> grid = make_time_grid(s, 50.0);
  const ArrivalDistribution a =
      arrival_density(s, LocalizationKernel(maximal_det(), 1.0), 50.0, {}, grid);
  const ArrivalDistribution b =
      arrival_density_amplitude(s, 50.0, 1e-2, 1e-2, {}, grid);
  CHECK(l1_distance(a, b) < 1e-6);
}

TEST_CASE("packet shift maps to a detector shift") {
  const double a = 3.0, x = 50.0;
  const MomentumState s0 = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const MomentumState sa = make_gaussian_state(1.0, 0.05, -a, 1.0);
  const std::vector<double> grid = make_time_grid(s0, x + a);
  const ArrivalDistribution left =
      arrival_density_amplitude(sa, x, 0.0, 0.0, {}, grid);
  const ArrivalDistribution far =
      arrival_density_amplitude(s0, x + a, 0.0, 0.0, {}, grid);
  CHECK(l1_distance(left, far) < 1e-9);
}

TEST_CASE("spacetime translation covariance of the phase") {
  const double a = 2.0, b = 5.0, x = 50.0;
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  // psi -> exp(-i p a + i eps b) psi
  const MomentumState st = make_custom_state(
      [&s](double p) {
        return s.amplitude(p) *
               std::polar(1.0, -p * 2.0 + std::hypot(p, 1.0) * 5.0);
      },
      s.p_min(), s.p_max(), 1.0, s.phase_gradient() - a);
  std::vector<double> base = make_time_grid(s, x - a);
  const ArrivalDistribution ref =
      arrival_density_amplitude(s, x - a, 0.0, 0.0, {}, base);
  std::vector<double> shifted = base;
  for (double& t : shifted) t += b;
  const ArrivalDistribution moved =
      arrival_density_amplitude(st, x, 0.0, 0.0, {}, shifted);
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < base.size(); ++i)
    l1 += 0.5 *
          (std::abs(moved.density[i] - ref.density[i]) +
           std::abs(moved.density[i + 1] - ref.density[i + 1])) *
          (base[i + 1] - base[i]);
  CHECK(l1 < 1e-8);
}

TEST_CASE("non-relativistic limit approaches the sqrt(p/m) reference") {
  const MomentumState s = make_gaussian_state(0.015, 0.0015, 0.0, 1.0);
  const double x = 3000.0;
  const std::vector<double> grid = make_time_grid(s, x);
  const ArrivalDistribution rel =
      arrival_density_amplitude(s, x, 0.0, 0.0, {}, grid);
  const ArrivalDistribution kij = kijowski_density(s, x, {}, grid);
  CHECK(l1_distance(rel, kij) < 1e-3);
}

TEST_CASE("pointer-kernel route matches the amplitude route for narrow packets") {
  const MomentumState s = make_gaussian_state(1.0, 5e-4, 0.0, 1.0);
  const double x = 50.0;
  const std::vector<double> grid = make_time_grid(s, x);
  const ArrivalDistribution amp =
      arrival_density_amplitude(s, x, 0.0, 0.0, {}, grid);
  // tau, delta small against the time and length scales of the packet
  const ArrivalDistribution ph =
      arrival_density_phillips(s, x, 1e-3, 1e-3, {}, grid);
  CHECK(l1_distance(amp, ph) < 1e-3);
  for (double v : ph.density) CHECK(v >= 0.0);
}

TEST_CASE("current approximation for almost monochromatic packets") {
  const MomentumState s = make_gaussian_state(1.0, 1e-3, 0.0, 1.0);
  const double x = 50.0;
  const std::vector<double> grid = make_time_grid(s, x);
  const ArrivalDistribution ph =
      arrival_density_phillips(s, x, 1e-3, 1e-3, {}, grid);
  const std::vector<double> cur = phillips_current(s, x, grid);
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    l1 += 0.5 *
          (std::abs(ph.density[i] - cur[i]) +
           std::abs(ph.density[i + 1] - cur[i + 1])) *
          (grid[i + 1] - grid[i]);
  CHECK(l1 < 1e-2);
}

TEST_CASE("tensor quadrature agrees with the adaptive double integral") {
  // One density value recomputed through the generic 2-d engine.
  DetectorModel det;
  det.kind = DetectorKind::ideal;
  det.profile.width = 1.0;
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const LocalizationKernel kern(det, 1.0);
  const double x = 20.0;
  const ArrivalDistribution d = arrival_density(s, kern, x);
  std::size_t k = 0;
  for (std::size_t i = 1; i < d.density.size(); ++i)
    if (d.density[i] > d.density[k]) k = i;
  const double t = d.t[k];

  auto integrand = [&](double p, double pp) {
    const std::complex<double> phase = std::polar(
        1.0, (p - pp) * x - (s.energy(p) - s.energy(pp)) * t);
    return s.amplitude(p) * std::conj(s.amplitude(pp)) *
           std::sqrt(s.velocity(p) * s.velocity(pp)) * kern(p, pp) * phase /
           (2.0 * M_PI);
  };
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.max_subdivisions = 40000;
  const std::complex<double> direct = integrate2d(
      integrand, {s.p_min(), s.p_max(), s.p_min(), s.p_max()}, spec);
  CHECK(std::abs(direct.imag()) < 1e-10);
  CHECK(direct.real() / d.norm == doctest::Approx(d.density[k]).epsilon(1e-8));
}

TEST_CASE("restrict_positive is the identity on positive supports") {
  const MomentumState s = make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const DensityMatrixGrid rho = density_matrix_from_state(s, 48);
  const DensityMatrixGrid out = restrict_positive(rho);
  double max_dev = 0.0;
  for (std::size_t i = 0; i < rho.rho.size(); ++i)
    max_dev = std::max(max_dev, std::abs(rho.rho[i] - out.rho[i]));
  CHECK(max_dev < 1e-12);
}

TEST_CASE("restrict_positive drops cross terms of an even superposition") {
  const double p0 = 1.0, sig = 0.05;
  auto amp = [&](double p) {
    const double za = (p - p0) / (2.0 * sig), zb = (p + p0) / (2.0 * sig);
    return std::complex<double>(std::exp(-za * za) + std::exp(-zb * zb), 0.0);
  };
  const DensityMatrixGrid rho = density_matrix_from_amplitude(amp, -1.4, 1.4, 64);
  const DensityMatrixGrid out = restrict_positive(rho);
  CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (out.nodes[i] * out.nodes[j] < 0.0)
        CHECK(std::abs(out.at(i, j)) == 0.0);
      else if (std::abs(rho.at(i, j)) > 0.0)
        CHECK(std::abs(out.at(i, j)) > 0.0);
    }
  // nothing left when only negative momenta carry weight
  auto neg = [&](double p) {
    const double z = (p + p0) / (2.0 * sig);
    return std::complex<double>(std::exp(-z * z), 0.0);
  };
  DensityMatrixGrid rho_neg = density_matrix_from_amplitude(neg, -1.4, -0.6, 64);
  for (auto& v : rho_neg.rho) v = 0.0;  // zero diagonal -> zero mass
  CHECK_THROWS_AS(restrict_positive(rho_neg), ZeroMass);
}

TEST_CASE("cross-branch contribution to the total probability") {
  const double p0 = 1.0, sig = 0.05;
  auto amp = [&](double p) {
    const double za = (p - p0) / (2.0 * sig), zb = (p + p0) / (2.0 * sig);
    return std::complex<double>(std::exp(-za * za) + std::exp(-zb * zb), 0.0);
  };
  // grid route at moderate x against an independent oscillatory quadrature
  const DensityMatrixGrid rho = density_matrix_from_amplitude(amp, -1.4, 1.4, 512);
  const double x_mid = 50.0;
  const ThetaTotals tot = time_integrated_totals(rho, x_mid);
  CHECK(tot.diagonal == doctest::Approx(1.0).epsilon(1e-10));

  double norm = integrate([&](double p) { return std::norm(amp(p)); }, -1.4, 1.4);
  auto cross_re = [&](double p) {
    return std::norm(amp(p)) / norm * std::cos(2.0 * p * x_mid);
  };
  const double want =
      integrate_oscillatory(cross_re, -1.4, 1.4, 2.0 * x_mid, {});
  CHECK(tot.antidiagonal == doctest::Approx(want).epsilon(1e-6));

  // macroscopically distant detector: the cross term is negligible
  const double x_far = 1e3 / sig;
  const double far = integrate_oscillatory(
      [&](double p) { return std::norm(amp(p)) / norm * std::cos(2.0 * p * x_far); },
      -1.4, 1.4, 2.0 * x_far, {});
  CHECK(std::abs(far) < 1e-6);
}
