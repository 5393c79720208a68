#include "toa/position.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>

#include "toa/quadrature.hpp"

namespace toa {

namespace {

using cplx = std::complex<double>;

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

// ln of the position-map reweight: v(p) * alpha(p).
std::function<double(double)> position_log_weight(
    const MomentumState& s, const LocalizationKernel& kernel) {
  auto log_alpha = kernel.log_alpha_reweight();
  return [&s, log_alpha](double p) {
    const double lv = std::log(s.velocity(p));
    return log_alpha ? lv + log_alpha(p) : lv;
  };
}

int node_count_x(const MomentumState& s, double t, double x_lo, double x_hi) {
  const double width = s.p_max() - s.p_min();
  double grad = 0.0;
  for (double p : {s.p_min(), s.p_max()})
    for (double x : {x_lo, x_hi})
      grad = std::max(grad, std::abs(x - s.velocity(p) * t));
  grad = std::max(grad, std::abs(s.phase_gradient()));
  const double phase = grad * width;
  const int n =
      static_cast<int>(std::ceil(0.5 * phase + 10.0 * std::cbrt(phase + 1.0))) + 32;
  return std::clamp(n, 64, 4096);
}

PositionDistribution finalize(std::vector<double> x, std::vector<double> raw,
                              double t, std::string state_ref,
                              std::string det_ref) {
  PositionDistribution d;
  d.time_t = t;
  d.x = std::move(x);
  d.norm = trapezoid(d.x, raw);
  d.min_density = *std::min_element(raw.begin(), raw.end());
  const double peak = *std::max_element(raw.begin(), raw.end());
  d.negative_dip = d.min_density < -1e-6 * std::max(peak, 1e-300);
  if (!(d.norm > 0.0))
    throw NonConvergence("position density: vanishing total probability");
  d.density.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) d.density[i] = raw[i] / d.norm;
  d.state_ref = std::move(state_ref);
  d.detector_ref = std::move(det_ref);
  return d;
}

struct PosNodes {
  std::vector<double> p, w;
  std::vector<cplx> amp;  // reweighted state amplitude at nodes
};

PosNodes make_pos_nodes(const MomentumState& st, int n) {
  PosNodes ns;
  GaussLegendre::get(n).mapped(st.p_min(), st.p_max(), ns.p, ns.w);
  ns.amp.resize(n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    ns.amp[i] = st.amplitude(ns.p[i]);
    norm += ns.w[i] * std::norm(ns.amp[i]);
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : ns.amp) a *= scale;
  return ns;
}

std::vector<double> density_on_x(const PosNodes& ns,
                                 const LocalizationKernel& kernel,
                                 const MomentumState& st, double t,
                                 const std::vector<double>& x) {
  const std::size_t n = ns.p.size();
  std::vector<double> out(x.size());
  if (kernel.unit()) {
    std::vector<cplx> c(n);
    for (std::size_t i = 0; i < n; ++i)
      c[i] = ns.w[i] * ns.amp[i] * std::polar(1.0, -st.energy(ns.p[i]) * t);
    for (std::size_t k = 0; k < x.size(); ++k) {
      cplx sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        sum += c[i] * std::polar(1.0, ns.p[i] * x[k]);
      out[k] = std::norm(sum) / (2.0 * M_PI);
    }
    return out;
  }
  std::vector<cplx> m(n * (n - 1) / 2);
  double diag = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += ns.w[i] * ns.w[i] * std::norm(ns.amp[i]);
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      const double lij = kernel(ns.p[i], ns.p[j]);
      m[idx] = ns.w[i] * ns.w[j] * ns.amp[i] * std::conj(ns.amp[j]) * lij *
               std::polar(1.0, -(st.energy(ns.p[i]) - st.energy(ns.p[j])) * t);
    }
  }
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i)
      z[i] = std::polar(1.0, ns.p[i] * x[k]);
    double sum = diag;
    idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx zi = z[i];
      for (std::size_t j = i + 1; j < n; ++j, ++idx)
        sum += 2.0 * (m[idx] * zi * std::conj(z[j])).real();
    }
    out[k] = sum / (2.0 * M_PI);
  }
  return out;
}

}  // namespace

std::vector<double> make_position_grid(const MomentumState& s, double t,
                                       const PositionGridSpec& spec) {
  if (!s.bounded())
    throw DomainError("make_position_grid: unbounded momentum support");
  const double p0 = s.mean_momentum();
  const double v0 = s.velocity(p0);
  const double eps0 = s.energy(p0);
  const double sp = s.momentum_spread();
  const double sx = s.position_spread();
  const double sv = sp * s.mass() * s.mass() / (eps0 * eps0 * eps0);
  const double center = s.position_center() + v0 * t;
  const double half =
      spec.halfwidth_factor * (std::hypot(sx, std::abs(t) * sv) + std::abs(t) * sv);

  const double d_p = s.p_max() - s.p_min();
  int n = spec.points;
  const int need = static_cast<int>(std::ceil(2.0 * half * d_p / M_PI)) + 1;
  if (need > (1 << 20))
    throw NonConvergence("make_position_grid: window too wide for the bandwidth");
  while (n < need) n *= 2;
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k)
    x[k] = center - half + 2.0 * half * k / (n - 1);
  return x;
}

PositionDistribution position_density(const MomentumState& s,
                                      const LocalizationKernel& kernel,
                                      double t, const PositionGridSpec& spec,
                                      const std::vector<double>& x_grid) {
  if (!s.bounded())
    throw DomainError("position_density: unbounded momentum support");
  const MomentumState st = reweighted_state(s, position_log_weight(s, kernel));
  const std::vector<double> x =
      x_grid.empty() ? make_position_grid(st, t, spec) : x_grid;
  const int n = node_count_x(st, t, x.front(), x.back());
  PosNodes ns = make_pos_nodes(st, n);
  std::vector<double> raw = density_on_x(ns, kernel, st, t, x);
  return finalize(std::move(x), std::move(raw), t, to_string(s.family()),
                  to_string(kernel.kind()));
}

double position_density_at(const MomentumState& s,
                           const LocalizationKernel& kernel, double t,
                           double x) {
  if (!kernel.unit())
    throw DomainError("position_density_at: unit kernels only");
  const MomentumState st = reweighted_state(s, position_log_weight(s, kernel));
  const int n = node_count_x(st, t, x, x + 1.0);
  PosNodes ns = make_pos_nodes(st, n);
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += ns.w[i] * ns.amp[i] *
           std::polar(1.0, ns.p[i] * x - st.energy(ns.p[i]) * t);
  return std::norm(sum) / (2.0 * M_PI);
}

PositionDistribution newton_wigner_density(const MomentumState& s, double t,
                                           const PositionGridSpec& spec,
                                           const std::vector<double>& x_grid) {
  const MomentumState st =
      reweighted_state(s, [&s](double p) { return std::log(s.velocity(p)); });
  const std::vector<double> x =
      x_grid.empty() ? make_position_grid(st, t, spec) : x_grid;
  const int n = node_count_x(st, t, x.front(), x.back());
  PosNodes ns = make_pos_nodes(st, n);
  std::vector<double> raw(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i)
      sum += ns.w[i] * ns.amp[i] *
             std::polar(1.0, ns.p[i] * x[k] - st.energy(ns.p[i]) * t);
    raw[k] = std::norm(sum) / (2.0 * M_PI);
  }
  return finalize(std::move(x), std::move(raw), t, to_string(s.family()),
                  "newton_wigner");
}

MomentumState boosted_state(const MomentumState& s, double rapidity) {
  if (!s.bounded()) throw DomainError("boosted_state: unbounded support");
  const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  const double m = s.mass();
  auto back = [ch, sh, m](double p) {  // rest-frame momentum of lab momentum p
    return p * ch - std::hypot(p, m) * sh;
  };
  auto fwd = [ch, sh, m](double q) { return q * ch + std::hypot(q, m) * sh; };
  const double q_lo = s.p_min(), q_hi = s.p_max();
  if (!(fwd(q_lo) > 0.0))
    throw SupportNotPositive("boosted_state: support leaves the positive axis");
  auto amp = [&s, back, m](double p) {
    const double q = back(p);
    if (q <= s.p_min() || q >= s.p_max()) return std::complex<double>(0.0, 0.0);
    const double eq = std::hypot(q, m), ep = std::hypot(p, m);
    return std::sqrt(eq / ep) * s.amplitude(q);
  };
  return make_custom_state(amp, fwd(q_lo), fwd(q_hi), m, s.phase_gradient());
}

DualityReport duality_check(const MomentumState& s, const DetectorModel& det,
                            double x_fixed, double t_fixed) {
  (void)x_fixed;
  DualityReport rep;
  LocalizationKernel kernel(det, s.mass());

  // The two normalized maps differ by sqrt(v(p) v(p')) element by element.
  auto log_alpha = kernel.log_alpha_reweight();
  const int n = 33;
  for (int i = 0; i < n; ++i) {
    const double p = s.p_min() + (s.p_max() - s.p_min()) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double pp = s.p_min() + (s.p_max() - s.p_min()) * j / (n - 1);
      const double wa_t = log_alpha ? 0.5 * (log_alpha(p) + log_alpha(pp)) : 0.0;
      const double wa_x =
          wa_t + 0.5 * (std::log(s.velocity(p)) + std::log(s.velocity(pp)));
      const double ratio = std::exp(wa_x - wa_t);
      const double expect = std::sqrt(s.velocity(p) * s.velocity(pp));
      rep.max_reweight_ratio_dev = std::max(
          rep.max_reweight_ratio_dev, std::abs(ratio / expect - 1.0));
    }
  }

  // Both probability maps must sample the very same kernel values.
  rep.kernel_values_identical = true;
  for (int i = 0; i < n && rep.kernel_values_identical; ++i) {
    const double p = s.p_min() + (s.p_max() - s.p_min()) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double pp = s.p_min() + (s.p_max() - s.p_min()) * j / (n - 1);
      const double a = kernel(p, pp);
      const double b = kernel(p, pp);
      if (std::memcmp(&a, &b, sizeof(double)) != 0) {
        rep.kernel_values_identical = false;
        break;
      }
    }
  }

  // Non-covariance exhibit: boost the state and compare its fixed-time
  // density against the scalar transport of the rest-frame density onto the
  // boosted time slice.
  rep.rapidity = 0.5;
  const MomentumState sb = boosted_state(s, rep.rapidity);
  const PositionDistribution boosted = position_density(sb, kernel, t_fixed);
  const double ch = std::cosh(rep.rapidity), sh = std::sinh(rep.rapidity);
  std::vector<double> transported(boosted.x.size());
  for (std::size_t k = 0; k < boosted.x.size(); ++k) {
    const double xp = boosted.x[k];
    transported[k] =
        ch * position_density_at(s, kernel, t_fixed * ch + xp * sh,
                                 xp * ch + t_fixed * sh);
  }
  const double tn = trapezoid(boosted.x, transported);
  double l1 = 0.0;
  for (std::size_t k = 0; k + 1 < boosted.x.size(); ++k) {
    const double a = std::abs(boosted.density[k] - transported[k] / tn);
    const double b = std::abs(boosted.density[k + 1] - transported[k + 1] / tn);
    l1 += 0.5 * (a + b) * (boosted.x[k + 1] - boosted.x[k]);
  }
  rep.boost_l1 = l1;
  return rep;
}

}  // namespace toa
