#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toa/detector.hpp"

using namespace toa;

namespace {

DetectorModel maximal_det() {
  DetectorModel d;
  d.kind = DetectorKind::maximal;
  d.tau = 1e-2;
  d.delta = 1e-2;
  return d;
}

DetectorModel fd_const() {
  DetectorModel d;
  d.kind = DetectorKind::fully_decoherent;
  d.alpha.form = Absorption::Form::constant;
  d.alpha.value = 1.0;
  return d;
}

// alpha ~ exp(+g p^2)/p: Gaussian record spread of constant width g/2.
DetectorModel fd_gaussian_spread(double g) {
  DetectorModel d;
  d.kind = DetectorKind::fully_decoherent;
  d.alpha.form = Absorption::Form::exp_family;
  d.alpha.coeff = 1e-3;
  d.alpha.p_log = 1.0;
  d.alpha.p_quad = -g;
  return d;
}

DetectorModel coherent_const() {
  DetectorModel d;
  d.kind = DetectorKind::coherent;
  d.alpha.form = Absorption::Form::constant;
  d.alpha.value = 1.0;
  return d;
}

// alpha ~ exp(+g p^2)/p: pointer spectrum gaussian in energy, record spread
// of width g v^2 / 2 plus a point mass exp(-g p^2) at the origin.
DetectorModel coherent_gaussian(double g) {
  DetectorModel d;
  d.kind = DetectorKind::coherent;
  d.alpha.form = Absorption::Form::exp_family;
  d.alpha.coeff = 5e-2;
  d.alpha.p_log = 1.0;
  d.alpha.p_quad = -g;
  return d;
}

DetectorModel covariant_exp(double rate) {
  DetectorModel d;
  d.kind = DetectorKind::covariant;
  d.sigma.form = CovariantSigma::Form::exponential;
  d.sigma.rate = rate;
  return d;
}

DetectorModel ideal_gaussian(double width = 1.0) {
  DetectorModel d;
  d.kind = DetectorKind::ideal;
  d.profile.width = width;
  return d;
}

void check_width_routes(const DetectorModel& det, double p, double mass,
                        double scale_floor) {
  const double closed = detection_width(det, p, mass);
  const double numeric = detection_width_numeric(det, p, mass);
  const double scale = std::max({std::abs(closed), std::abs(numeric), scale_floor});
  CHECK(std::abs(closed - numeric) <= 1e-4 * scale);
}

}  // namespace

TEST_CASE("kernel diagonal is exactly one and kernels are symmetric") {
  const double m = 1.0;
  for (const DetectorModel& det :
       {maximal_det(), fd_const(), fd_gaussian_spread(5.0), coherent_const(),
        covariant_exp(8.0), ideal_gaussian()}) {
    LocalizationKernel kern(det, m);
    for (double p : {0.3, 1.0, 4.5}) CHECK(kern(p, p) == 1.0);
    for (double p : {0.5, 1.1})
      for (double pp : {0.7, 2.3})
        CHECK(kern(p, pp) == doctest::Approx(kern(pp, p)).epsilon(1e-15));
  }
}

TEST_CASE("maximal kernel is identically one") {
  LocalizationKernel kern(maximal_det(), 1.0);
  CHECK(kern(0.2, 7.0) == 1.0);
  CHECK(kern(3.0, 3.0) == 1.0);
}

TEST_CASE("fully decoherent with alpha = 1: L(1,4) = 5/4 and not positive") {
  LocalizationKernel kern(fd_const(), 1.0);
  CHECK(kern(1.0, 4.0) == doctest::Approx(1.25).epsilon(1e-14));
  const RegularityReport rep = regularity_check(fd_const(), 0.2, 2.0, 1.0, 64);
  CHECK_FALSE(rep.regular);
  CHECK_FALSE(rep.cs_bound_ok);
  CHECK(rep.max_offdiag > 1.0);
}

TEST_CASE("exponential pointer spectra collapse to the maximal kernel") {
  // fully decoherent with alpha = C exp(-delta p)/(2p)
  DetectorModel fd;
  fd.kind = DetectorKind::fully_decoherent;
  fd.alpha.form = Absorption::Form::exp_family;
  fd.alpha.coeff = 0.5;
  fd.alpha.p_log = 1.0;
  fd.alpha.p_lin = 0.7;
  // coherent with alpha = C exp(-tau eps)/(2p)
  DetectorModel coh;
  coh.kind = DetectorKind::coherent;
  coh.alpha.form = Absorption::Form::exp_family;
  coh.alpha.coeff = 0.5;
  coh.alpha.p_log = 1.0;
  coh.alpha.e_lin = 0.9;
  for (const DetectorModel& det : {fd, coh}) {
    LocalizationKernel kern(det, 1.0);
    CHECK(kern(0.6, 2.4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(detection_width(det, 1.3, 1.0)) < 1e-12);
  }
}

TEST_CASE("detection widths: closed forms match the numerical curvature") {
  const double m = 1.0;
  for (double p : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    check_width_routes(maximal_det(), p, m, 1e-6 / (p * p));
    check_width_routes(fd_const(), p, m, 0.0);
    check_width_routes(fd_gaussian_spread(5.0), p, m, 0.0);
    check_width_routes(coherent_const(), p, m, 0.0);
    check_width_routes(covariant_exp(8.0), p, m, 0.0);
    check_width_routes(ideal_gaussian(), p, m, 0.0);
  }
  // a coherent detector with structured absorption
  DetectorModel coh;
  coh.kind = DetectorKind::coherent;
  coh.alpha.form = Absorption::Form::exp_family;
  coh.alpha.coeff = 0.1;
  coh.alpha.p_log = 0.5;
  coh.alpha.e_lin = 0.3;
  for (double p : {0.5, 1.0, 3.0}) check_width_routes(coh, p, m, 0.0);
}

TEST_CASE("per-family width values") {
  const double m = 1.0;
  // maximal: zero at every momentum
  for (double p : {0.2, 1.0, 5.0})
    CHECK(detection_width(maximal_det(), p, m) == 0.0);
  // fully decoherent alpha = 1: -1/(4p^2)
  CHECK(detection_width(fd_const(), 2.0, m) ==
        doctest::Approx(-1.0 / 16.0).epsilon(1e-14));
  // gaussian-spread family: constant width g/2
  CHECK(detection_width(fd_gaussian_spread(5.0), 0.7, m) ==
        doctest::Approx(2.5).epsilon(1e-13));
  // coherent alpha = 1: -(eps^2 + m^2)/(4 eps^2 p^2)
  const double p = 1.0, eps2 = p * p + m * m;
  CHECK(detection_width(coherent_const(), p, m) ==
        doctest::Approx(-(eps2 + m * m) / (4.0 * eps2 * p * p)).epsilon(1e-13));
  // covariant: rate m^2 / (2 eps^2), positive for decaying spectra
  CHECK(detection_width(covariant_exp(8.0), 1.0, m) ==
        doctest::Approx(8.0 / (2.0 * 2.0)).epsilon(1e-13));
  // covariant width vanishes at large momentum
  CHECK(std::abs(detection_width(covariant_exp(8.0), 1e4, m)) < 1e-7);
  // ideal: variance of f over p^2
  CHECK(detection_width(ideal_gaussian(2.0), 4.0, m) ==
        doctest::Approx(4.0 / 16.0).epsilon(1e-13));
}

TEST_CASE("record spread: maximal detector concentrates on one cell") {
  const RecordSpread rs = record_spread(maximal_det(), 1.0, 1.0);
  CHECK(rs.total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(rs.mean) < 1e-9);
  const std::size_t mid = rs.u.size() / 2;
  CHECK(rs.u[mid] * rs.dx == doctest::Approx(1.0).epsilon(1e-9));
  double off_mass = 0.0;
  for (std::size_t j = 0; j < rs.u.size(); ++j)
    if (j != mid) off_mass += std::abs(rs.u[j]) * rs.dx;
  CHECK(off_mass < 1e-9);
  CHECK(rs.regular);
}

TEST_CASE("record spread of the ideal detector is p f(px)") {
  const DetectorModel det = ideal_gaussian();
  for (double p : {0.5, 2.0}) {
    const RecordSpread rs = record_spread(det, p, 1.0);
    CHECK(rs.total == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(rs.mean) < 1e-8);
    CHECK(rs.regular);
    // pointwise match against p f(p x)
    double max_dev = 0.0;
    for (std::size_t j = 0; j < rs.x.size(); ++j) {
      const double want = p * det.profile.density(p * rs.x[j]);
      max_dev = std::max(max_dev, std::abs(rs.u[j] - want));
    }
    CHECK(max_dev < 1e-8 * p);
    // width scales as 1/p
    CHECK(rs.second_moment == doctest::Approx(1.0 / (p * p)).epsilon(1e-6));
  }
}

TEST_CASE("record spread second moment agrees with detection_width") {
  const double m = 1.0;
  // Momenta chosen so the spectra decay inside the |xi| < 2p window where
  // that cap applies.
  const std::pair<DetectorModel, double> cases[] = {
      {fd_gaussian_spread(7.0), 2.0},
      {coherent_gaussian(10.0), 2.0},
      {covariant_exp(8.0), 1.0},
      {ideal_gaussian(), 1.0},
  };
  for (const auto& [det, p] : cases) {
    const RecordSpread rs = record_spread(det, p, m);
    CHECK(rs.total == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(rs.mean) < 1e-6);
    const double closed = detection_width(det, p, m);
    CHECK(rs.second_moment == doctest::Approx(closed).epsilon(1e-4));
    if (det.kind == DetectorKind::covariant) {
      // genuinely dips a little negative; the width identity still holds
      CHECK_FALSE(rs.regular);
      CHECK(rs.min_u > -2e-3);
    } else {
      CHECK(rs.regular);
    }
  }
}

TEST_CASE("coherent energy-gaussian width") {
  for (double p : {0.5, 1.0, 2.0}) {
    const double v2 = p * p / (p * p + 1.0);
    CHECK(detection_width(coherent_gaussian(5.0), p, 1.0) ==
          doctest::Approx(5.0 * v2 / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("non-positive kernels produce signed spreads") {
  const RecordSpread rs = record_spread(fd_const(), 1.0, 1.0);
  CHECK_FALSE(rs.regular);
  CHECK(rs.min_u < 0.0);
}

TEST_CASE("regularity of the regular families") {
  const double m = 1.0;
  for (const DetectorModel& det :
       {maximal_det(), fd_gaussian_spread(5.0), coherent_gaussian(5.0),
        ideal_gaussian()}) {
    const RegularityReport rep = regularity_check(det, 0.5, 1.5, m, 64);
    CHECK(rep.regular);
    CHECK(rep.cs_bound_ok);
  }
}

TEST_CASE("covariant exponential spectrum: |L| <= 1, nearly positive") {
  // ln S~ convex on shell keeps the Cauchy-Schwarz bound; the Gram matrix
  // nevertheless dips marginally negative, below the regularity threshold.
  const RegularityReport cov =
      regularity_check(covariant_exp(8.0), 0.2, 3.0, 1.0, 64);
  CHECK(cov.cs_bound_ok);
  CHECK(cov.max_offdiag <= 1.0);
  CHECK_FALSE(cov.regular);
  CHECK(cov.lambda_min > -1e-5 * cov.lambda_max);
}

TEST_CASE("coherent and fully decoherent kernels agree near the diagonal") {
  // At alpha = 1 the two kernels differ only at second order in
  // r = (p - p')/(p + p'), uniformly in the mass.
  LocalizationKernel coh(coherent_const(), 1.0);
  LocalizationKernel fd(fd_const(), 1.0);
  for (double p : {0.02, 0.1, 1.0}) {
    double prev_ratio = 0.0;
    for (double r : {0.04, 0.02, 0.01}) {
      const double pp = p * (1.0 + r) / (1.0 - r);
      const double diff = std::abs(coh(p, pp) - fd(p, pp));
      const double ratio = diff / (r * r);
      if (prev_ratio > 0.0)
        CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.2));
      prev_ratio = ratio;
      CHECK(diff < 4.0 * r * r);
    }
  }
}

TEST_CASE("maximal detector closed forms") {
  const MaximalForms forms = maximal_detector_forms(0.3, 0.7);
  CHECK(std::abs(forms.S(0.0, 0.0) - 1.0) < 1e-15);
  for (double p : {0.1, 1.0, 10.0}) {
    const double eps = std::hypot(p, 1.0);
    const double lhs =
        forms.alpha(p, 1.0) * 2.0 * p * std::exp(0.3 * eps + 0.7 * p);
    CHECK(lhs == doctest::Approx(0.3 * 0.7).epsilon(1e-12));
  }
  CHECK(std::abs(forms.S(1e6, 0.0)) < 1e-5);
  CHECK(std::abs(forms.S(-1e6, 2.0)) < 1e-5);
}

TEST_CASE("tabulated absorption reproduces its closed-form counterpart") {
  // Sample alpha = C exp(+g p^2)/p on a grid; the spline-backed table must
  // give the same kernel and nearly the same width as the analytic form.
  const DetectorModel ref = fd_gaussian_spread(5.0);
  DetectorModel tab;
  tab.kind = DetectorKind::fully_decoherent;
  tab.alpha.form = Absorption::Form::table;
  for (int i = 0; i <= 400; ++i) {
    const double p = 0.3 + (2.5 - 0.3) * i / 400.0;
    tab.alpha.table_p.push_back(p);
    tab.alpha.table_alpha.push_back(1e-3 * std::exp(5.0 * p * p) / p);
  }
  LocalizationKernel kref(ref, 1.0), ktab(tab, 1.0);
  for (double p : {0.8, 1.2})
    for (double pp : {0.9, 1.6})
      CHECK(ktab(p, pp) == doctest::Approx(kref(p, pp)).epsilon(1e-8));
  CHECK(detection_width(tab, 1.0, 1.0) ==
        doctest::Approx(detection_width(ref, 1.0, 1.0)).epsilon(1e-5));
}

TEST_CASE("ideal kernel depends only on the momentum asymmetry") {
  LocalizationKernel kern(ideal_gaussian(), 1.0);
  for (double p : {0.4, 1.0})
    for (double pp : {0.9, 2.7}) {
      CHECK(kern(p, pp) == doctest::Approx(kern(3.0 * p, 3.0 * pp)).epsilon(1e-14));
      CHECK(kern(p, pp) <= 1.0);
    }
}

TEST_CASE("kernel rejects nonpositive momenta") {
  LocalizationKernel kern(fd_const(), 1.0);
  CHECK_THROWS_AS(kern(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(kern(0.0, 2.0), DomainError);
}
