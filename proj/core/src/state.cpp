#include "toa/state.hpp"

#include <cmath>
#include <limits>

#include "toa/optimize.hpp"

namespace toa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Improper integrals run in two pieces: the bulk up to several tail scales
// is resolved in the physical variable, only the monotone remainder goes
// through the rational tail map.
double improper_integral(const std::function<double(double)>& f, double p_lo,
                         double tail_scale, const QuadratureSpec& spec) {
  // Octave panels up to several tail scales keep narrow structure near the
  // lower edge visible to the panel rule; only the monotone remainder goes
  // through the rational tail map.
  const double split = p_lo + 8.0 * tail_scale;
  std::vector<double> edges{p_lo};
  while (edges.back() < split) edges.push_back(std::min(2.0 * edges.back(), split));
  QuadratureSpec part = spec;
  part.abs_tol = spec.abs_tol / edges.size();
  double bulk = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    bulk += integrate(f, edges[k], edges[k + 1], part);
  QuadratureSpec tail_spec = spec;
  // A p^-3/2 tail maps to a sqrt endpoint singularity whose bisection
  // error bottoms out near 3e-9 in double precision; ask no more of it.
  tail_spec.abs_tol = std::max(spec.abs_tol, 3e-9);
  tail_spec.rel_tol = std::max(spec.rel_tol, 3e-8);
  tail_spec.max_subdivisions = std::max(spec.max_subdivisions, 20000);
  return bulk + integrate_semi_infinite(f, split, tail_spec, tail_scale);
}

double norm_on_support(const std::function<double(double)>& density,
                       double p_lo, double p_hi, double tail_scale) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-11;
  if (std::isinf(p_hi)) return improper_integral(density, p_lo, tail_scale, spec);
  return integrate(density, p_lo, p_hi, spec);
}

}  // namespace

std::string to_string(StateFamily f) {
  switch (f) {
    case StateFamily::gaussian: return "gaussian";
    case StateFamily::inverse_gaussian_kinetic: return "inverse_gaussian_kinetic";
    case StateFamily::levy_energy: return "levy_energy";
    case StateFamily::custom: return "custom";
  }
  return "custom";
}

MomentumState::MomentumState(Amplitude amp, double p_lo, double p_hi,
                             double mass, StateFamily family,
                             std::map<std::string, double> params,
                             double phase_gradient, double tail_scale)
    : amp_(std::move(amp)),
      p_lo_(p_lo),
      p_hi_(p_hi),
      mass_(mass),
      family_(family),
      params_(std::move(params)),
      phase_gradient_(phase_gradient),
      tail_scale_(tail_scale) {
  if (!(mass_ > 0.0)) throw DomainError("MomentumState: mass must be positive");
  if (!(p_lo_ > 0.0) && family_ != StateFamily::custom)
    throw SupportNotPositive("MomentumState: support must be strictly positive");
  if (!(p_lo_ < p_hi_)) throw DomainError("MomentumState: empty support");
}

bool MomentumState::bounded() const { return std::isfinite(p_hi_); }

double MomentumState::energy(double p) const { return std::hypot(p, mass_); }

double MomentumState::velocity(double p) const { return p / energy(p); }

double MomentumState::mean_momentum() const {
  if (mean_p_ < 0.0) {
    mean_p_ = momentum_expectation(*this, [](double p) { return p; });
  }
  return mean_p_;
}

double MomentumState::momentum_spread() const {
  if (sigma_p_ < 0.0) {
    if (!bounded())
      throw DomainError("momentum_spread: unbounded support");
    const double m1 = mean_momentum();
    const double m2 = momentum_expectation(*this, [](double p) { return p * p; });
    sigma_p_ = std::sqrt(std::max(0.0, m2 - m1 * m1));
  }
  return sigma_p_;
}

double MomentumState::position_spread() const {
  if (sigma_x_ < 0.0) {
    if (!bounded())
      throw DomainError("position_spread: unbounded support");
    // For psi = R(p) exp(i phi0 p) the spatial variance is integral R'(p)^2 dp.
    const double h = 1e-6 * (p_hi_ - p_lo_);
    auto dR2 = [&](double p) {
      const double a = std::abs(amp_(std::min(p + h, p_hi_)));
      const double b = std::abs(amp_(std::max(p - h, p_lo_)));
      const double d = (a - b) / (2.0 * h);
      return d * d;
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-9;
    spec.rel_tol = 1e-6;
    sigma_x_ = std::sqrt(std::max(0.0, integrate(dR2, p_lo_, p_hi_, spec)));
  }
  return sigma_x_;
}

MomentumState make_gaussian_state(double p0, double sigma_p, double x0,
                                  double mass) {
  if (!(sigma_p > 0.0)) throw DomainError("make_gaussian_state: sigma_p > 0");
  if (!(p0 - 5.0 * sigma_p > 0.0))
    throw SupportNotPositive(
        "make_gaussian_state: p0 - 5 sigma_p must be positive");
  // +-7.1 sigma leaves tail mass below 1e-12; clip to keep support positive.
  const double p_lo = std::max(p0 - 7.1 * sigma_p, 1e-3 * sigma_p);
  const double p_hi = p0 + 7.1 * sigma_p;
  auto envelope = [p0, sigma_p](double p) {
    const double z = (p - p0) / (2.0 * sigma_p);
    return std::exp(-z * z);
  };
  const double norm = norm_on_support(
      [&](double p) { const double r = envelope(p); return r * r; }, p_lo, p_hi,
      1.0);
  const double scale = 1.0 / std::sqrt(norm);
  auto amp = [envelope, scale, x0](double p) {
    return std::polar(scale * envelope(p), -p * x0);
  };
  return MomentumState(amp, p_lo, p_hi, mass, StateFamily::gaussian,
                       {{"p0", p0}, {"sigma_p", sigma_p}, {"x0", x0}}, -x0);
}

MomentumState make_inverse_gaussian_state(double xi0, double sigma_xi,
                                          double mass) {
  if (!(xi0 > 0.0) || !(sigma_xi > 0.0))
    throw DomainError("make_inverse_gaussian_state: xi0, sigma_xi > 0");
  const double lambda = xi0 * xi0 * xi0 / (sigma_xi * sigma_xi);
  auto exponent = [=](double xi) {
    const double d = xi - xi0;
    return lambda * d * d / (2.0 * xi0 * xi0 * xi);
  };
  // Truncate where the exponent rises 45 above its minimum (density ratio
  // below 3e-20), searching outward from the mean.
  double xi_lo = xi0, xi_hi = xi0;
  while (exponent(xi_lo) < 45.0 && xi_lo > 1e-300) xi_lo *= 0.5;
  while (exponent(xi_hi) < 45.0) xi_hi *= 2.0;
  xi_lo = find_root([&](double xi) { return exponent(xi) - 45.0; }, xi_lo, xi0);
  xi_hi = find_root([&](double xi) { return exponent(xi) - 45.0; }, xi0, xi_hi);

  auto p_of_xi = [mass](double xi) {
    return mass * std::sqrt((1.0 + xi) * (1.0 + xi) - 1.0);
  };
  const double p_lo = p_of_xi(xi_lo), p_hi = p_of_xi(xi_hi);

  auto density_p = [=](double p) {
    const double eps = std::hypot(p, mass);
    const double xi = eps / mass - 1.0;
    const double v = p / eps;
    const double body =
        std::sqrt(lambda / (2.0 * M_PI * xi * xi * xi)) * std::exp(-exponent(xi));
    return body * v / mass;  // Jacobian d(xi)/dp
  };
  const double norm = norm_on_support(density_p, p_lo, p_hi, 1.0);
  auto amp = [=](double p) {
    return std::complex<double>(std::sqrt(density_p(p) / norm), 0.0);
  };
  return MomentumState(amp, p_lo, p_hi, mass,
                       StateFamily::inverse_gaussian_kinetic,
                       {{"xi0", xi0}, {"sigma_xi", sigma_xi}}, 0.0);
}

MomentumState make_levy_energy_state(double c_E, double mass) {
  if (!(c_E > 0.0)) throw DomainError("make_levy_energy_state: c_E > 0");
  // Lower cutoff at y = c/90 keeps both the omitted mass and the omitted
  // part of every inverse moment up to y^-6 below 1e-10 relative.
  const double y_lo = c_E / 90.0;
  const double p_lo = std::sqrt((mass + y_lo) * (mass + y_lo) - mass * mass);
  auto density_p = [=](double p) {
    const double eps = std::hypot(p, mass);
    const double y = eps - mass;
    const double v = p / eps;
    const double body = std::sqrt(c_E / (2.0 * M_PI)) *
                        std::exp(-c_E / (2.0 * y)) / (y * std::sqrt(y));
    return body * v;  // Jacobian dE/dp
  };
  const double tail_scale = mass + 10.0 * c_E;
  const double norm = norm_on_support(density_p, p_lo, kInf, tail_scale);
  auto amp = [=](double p) {
    return std::complex<double>(std::sqrt(density_p(p) / norm), 0.0);
  };
  return MomentumState(amp, p_lo, kInf, mass, StateFamily::levy_energy,
                       {{"c_E", c_E}}, 0.0, tail_scale);
}

MomentumState make_custom_state(MomentumState::Amplitude amp, double p_lo,
                                double p_hi, double mass,
                                double phase_gradient) {
  auto density = [amp](double p) { return std::norm(amp(p)); };
  const double norm = norm_on_support(density, p_lo, p_hi, 1.0);
  const double scale = 1.0 / std::sqrt(norm);
  auto scaled = [amp, scale](double p) { return scale * amp(p); };
  return MomentumState(scaled, p_lo, p_hi, mass, StateFamily::custom, {},
                       phase_gradient);
}

MomentumState reweighted_state(
    const MomentumState& s, const std::function<double(double)>& log_weight) {
  if (!s.bounded())
    throw DomainError("reweighted_state: unbounded support");
  // Shift the log weight by its maximum on a scan grid before exponentiating.
  const int n_scan = 512;
  double max_lw = -kInf;
  for (int i = 0; i <= n_scan; ++i) {
    const double p = s.p_min() + (s.p_max() - s.p_min()) * i / n_scan;
    max_lw = std::max(max_lw, log_weight(p));
  }
  auto base_amp = [&s](double p) { return s.amplitude(p); };
  auto amp = [base_amp, log_weight, max_lw](double p) {
    return base_amp(p) * std::exp(0.5 * (log_weight(p) - max_lw));
  };
  auto out = make_custom_state(amp, s.p_min(), s.p_max(), s.mass(),
                               s.phase_gradient());
  return out;
}

double momentum_expectation(const MomentumState& s,
                            const std::function<double(double)>& f,
                            const QuadratureSpec& spec) {
  auto g = [&](double p) { return f(p) * s.density(p); };
  if (s.bounded()) return integrate(g, s.p_min(), s.p_max(), spec);
  return improper_integral(g, s.p_min(), s.tail_scale(), spec);
}

double DensityMatrixGrid::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size(); ++i) t += weights[i] * at(i, i).real();
  return t;
}

double DensityMatrixGrid::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      d = std::max(d, std::abs(at(i, j) - std::conj(at(j, i))));
  return d;
}

namespace {

DensityMatrixGrid pure_density_on_grid(const MomentumState::Amplitude& amp,
                                       double a, double b, int n,
                                       bool normalize) {
  DensityMatrixGrid g;
  GaussLegendre::get(n).mapped(a, b, g.nodes, g.weights);
  std::vector<std::complex<double>> psi(n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    psi[i] = amp(g.nodes[i]);
    norm += g.weights[i] * std::norm(psi[i]);
  }
  const double scale = normalize ? 1.0 / norm : 1.0;
  g.rho.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.at(i, j) = scale * psi[i] * std::conj(psi[j]);
  return g;
}

}  // namespace

DensityMatrixGrid density_matrix_from_state(const MomentumState& s, int n) {
  if (!s.bounded())
    throw DomainError("density_matrix_from_state: unbounded support");
  return pure_density_on_grid([&s](double p) { return s.amplitude(p); },
                              s.p_min(), s.p_max(), n, true);
}

DensityMatrixGrid density_matrix_from_amplitude(
    const MomentumState::Amplitude& amp, double a, double b, int n) {
  return pure_density_on_grid(amp, a, b, n, true);
}

}  // namespace toa
