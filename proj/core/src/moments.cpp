#include "toa/moments.hpp"

#include <cmath>

namespace toa {

namespace {

double trap_weighted(const ArrivalDistribution& d,
                     const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < d.t.size(); ++i)
    s += 0.5 *
         (f(d.t[i]) * d.density[i] + f(d.t[i + 1]) * d.density[i + 1]) *
         (d.t[i + 1] - d.t[i]);
  return s;
}

std::complex<double> mgf_at(const ArrivalDistribution& d, double mu) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i + 1 < d.t.size(); ++i) {
    const std::complex<double> a =
        d.density[i] * std::polar(1.0, mu * d.t[i]);
    const std::complex<double> b =
        d.density[i + 1] * std::polar(1.0, mu * d.t[i + 1]);
    s += 0.5 * (a + b) * (d.t[i + 1] - d.t[i]);
  }
  return s;
}

}  // namespace

double mean_arrival(const ArrivalDistribution& dist) {
  return trap_weighted(dist, [](double t) { return t; });
}

double variance_arrival(const ArrivalDistribution& dist) {
  const double m1 = mean_arrival(dist);
  const double m2 = trap_weighted(dist, [](double t) { return t * t; });
  return m2 - m1 * m1;
}

ClassicalStats classical_toa_stats(const WignerState& w, double x) {
  if (w.p_nodes.front() <= 0.0)
    throw DomainError("classical_toa_stats: momentum support touches zero");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t ip = 0; ip < w.p_nodes.size(); ++ip) {
    const double p = w.p_nodes[ip];
    const double v = p / std::hypot(p, w.mass);
    for (std::size_t ix = 0; ix < w.x_nodes.size(); ++ix) {
      const double tc = (x - w.x_nodes[ix]) / v;
      const double wgt = w.p_weights[ip] * w.x_weights[ix] * w.at(ip, ix);
      m1 += wgt * tc;
      m2 += wgt * tc * tc;
    }
  }
  return {m1, m2 - m1 * m1};
}

ArrivalMoments variance_decomposition(const MomentumState& s,
                                      const DetectorModel& det, double x,
                                      double mass,
                                      const QuadratureSpec& spec) {
  if (std::abs(mass - s.mass()) > 1e-12 * mass)
    throw DomainError("variance_decomposition: mass differs from the state's");
  LocalizationKernel kernel(det, mass);
  auto log_alpha = kernel.log_alpha_reweight();
  const MomentumState st = log_alpha ? reweighted_state(s, log_alpha) : s;

  const WignerState w = wigner_function(st);
  const ClassicalStats cs = classical_toa_stats(w, x);

  const double m4 = mass * mass * mass * mass;
  const double term_mass = momentum_expectation(
      st,
      [&](double p) {
        const double eps2 = p * p + mass * mass;
        return 0.25 * m4 / (eps2 * p * p * p * p);
      },
      spec);
  const double term_det = momentum_expectation(
      st,
      [&](double p) {
        const double eps2 = p * p + mass * mass;
        const double v2 = p * p / eps2;
        return detection_width(det, p, mass) / v2;
      },
      spec);

  ArrivalMoments out;
  out.mean = cs.mean;
  out.var_tc = cs.variance;
  out.term_mass = term_mass;
  out.term_detector = term_det;
  out.variance = cs.variance + term_mass + term_det;
  return out;
}

std::vector<std::complex<double>> moment_generating(
    const MomentumState& s, const LocalizationKernel& kernel, double x,
    const std::vector<double>& mu_list) {
  const ArrivalDistribution d = arrival_density(s, kernel, x);
  std::vector<std::complex<double>> out;
  out.reserve(mu_list.size());
  for (double mu : mu_list) out.push_back(mgf_at(d, mu));
  return out;
}

MgfEstimates mgf_mean_variance(const ArrivalDistribution& dist) {
  const double scale =
      std::max(std::abs(mean_arrival(dist)), std::sqrt(variance_arrival(dist)));
  MgfEstimates est;
  est.mu_step = 1e-4 / std::max(scale, 1e-300);
  const double h = est.mu_step;
  const std::complex<double> zp = std::log(mgf_at(dist, h));
  const std::complex<double> zm = std::log(mgf_at(dist, -h));
  est.mean = ((zp - zm) / (2.0 * h)).imag();
  est.variance = -((zp + zm) / (h * h)).real();  // ln Z(0) = 0
  return est;
}

}  // namespace toa
