#include "toa/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace toa {

namespace {

using cplx = std::complex<double>;

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

// Momentum node count needed to resolve the stationary phase p x - eps t
// over the whole support and time window.
int node_count(const MomentumState& s, double x, double t_lo, double t_hi) {
  const double width = s.p_max() - s.p_min();
  double grad = 0.0;
  for (double p : {s.p_min(), s.p_max()})
    for (double t : {t_lo, t_hi})
      grad = std::max(grad, std::abs(x - s.velocity(p) * t));
  grad = std::max(grad, std::abs(s.phase_gradient()));
  const double phase = grad * width;
  const int n = static_cast<int>(std::ceil(0.5 * phase + 10.0 * std::cbrt(phase + 1.0))) + 32;
  return std::clamp(n, 64, 4096);
}

struct NodeSet {
  std::vector<double> p, w;
  std::vector<cplx> amp;     // node amplitudes, discrete-normalized
  std::vector<double> omega;  // dispersion at nodes
};

// Nodes + discrete-normalized amplitudes with an extra sqrt weight applied.
NodeSet make_nodes(const MomentumState& s, int n,
                   const std::function<double(double)>& weight,
                   const std::function<double(double)>& dispersion) {
  NodeSet ns;
  GaussLegendre::get(n).mapped(s.p_min(), s.p_max(), ns.p, ns.w);
  ns.amp.resize(n);
  ns.omega.resize(n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    ns.amp[i] = s.amplitude(ns.p[i]) * std::sqrt(weight(ns.p[i]));
    ns.omega[i] = dispersion(ns.p[i]);
    norm += ns.w[i] * std::norm(s.amplitude(ns.p[i]));
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : ns.amp) a *= scale;
  return ns;
}

std::vector<double> factorized_density(const NodeSet& ns, double x,
                                       const std::vector<double>& t) {
  const std::size_t n = ns.p.size();
  std::vector<cplx> c(n);
  for (std::size_t i = 0; i < n; ++i)
    c[i] = ns.w[i] * ns.amp[i] * std::polar(1.0, ns.p[i] * x);
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum += c[i] * std::polar(1.0, -ns.omega[i] * t[k]);
    out[k] = std::norm(sum) / (2.0 * M_PI);
  }
  return out;
}

std::vector<double> bilinear_density(const NodeSet& ns,
                                     const LocalizationKernel& kernel,
                                     double x, const std::vector<double>& t) {
  const std::size_t n = ns.p.size();
  if (n > 2560)
    throw NonConvergence(
        "arrival_density: phase too steep for the kernel route; use the "
        "amplitude route");
  // Upper triangle of M_ij = w_i w_j a_i conj(a_j) L_ij e^{i (p_i - p_j) x}.
  std::vector<cplx> m(n * (n - 1) / 2);
  double diag = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += ns.w[i] * ns.w[i] * std::norm(ns.amp[i]);
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      const double lij = kernel(ns.p[i], ns.p[j]);
      m[idx] = ns.w[i] * ns.w[j] * ns.amp[i] * std::conj(ns.amp[j]) * lij *
               std::polar(1.0, (ns.p[i] - ns.p[j]) * x);
    }
  }
  std::vector<double> out(t.size());
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i)
      z[i] = std::polar(1.0, -ns.omega[i] * t[k]);
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

ArrivalDistribution finalize(std::vector<double> t, std::vector<double> raw,
                             double x, std::string state_ref,
                             std::string det_ref) {
  ArrivalDistribution d;
  d.detector_x = x;
  d.t = std::move(t);
  d.norm = trapezoid(d.t, raw);
  d.min_density = *std::min_element(raw.begin(), raw.end());
  const double peak = *std::max_element(raw.begin(), raw.end());
  d.negative_dip = d.min_density < -1e-6 * std::max(peak, 1e-300);
  if (!(d.norm > 0.0))
    throw NonConvergence("arrival density: vanishing total probability");
  d.density.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) d.density[i] = raw[i] / d.norm;
  d.state_ref = std::move(state_ref);
  d.detector_ref = std::move(det_ref);
  return d;
}

std::vector<double> grid_or(const MomentumState& s, double x,
                            const TimeGridSpec& spec,
                            const std::vector<double>& given) {
  if (!given.empty()) return given;
  return make_time_grid(s, x, spec);
}

}  // namespace

std::vector<double> make_time_grid(const MomentumState& s, double x,
                                   const TimeGridSpec& spec) {
  if (!s.bounded())
    throw DomainError("make_time_grid: unbounded momentum support");
  const double p0 = s.mean_momentum();
  const double v0 = s.velocity(p0);
  const double eps0 = s.energy(p0);
  const double sp = s.momentum_spread();
  const double sx = s.position_spread();
  const double sv = sp * s.mass() * s.mass() / (eps0 * eps0 * eps0);
  const double spatial = sx / v0;
  const double disp = std::abs(x) * sv / (v0 * v0);
  const double center = (x - s.position_center()) / v0;
  const double half =
      spec.halfwidth_factor * (std::hypot(spatial, disp) + disp);

  // Nyquist guard: the grid must resolve the fastest energy beat.
  const double d_eps = s.energy(s.p_max()) - s.energy(s.p_min());
  int n = spec.points;
  if (d_eps > 0.0) {
    const int need =
        static_cast<int>(std::ceil(2.0 * half * d_eps / M_PI)) + 1;
    if (need > (1 << 20))
      throw NonConvergence("make_time_grid: window too wide for the bandwidth");
    while (n < need) n *= 2;
  }
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k)
    t[k] = center - half + 2.0 * half * k / (n - 1);
  return t;
}

ArrivalDistribution arrival_density(const MomentumState& s,
                                    const LocalizationKernel& kernel, double x,
                                    const TimeGridSpec& spec,
                                    const std::vector<double>& t_grid) {
  if (!s.bounded())
    throw DomainError("arrival_density: unbounded momentum support");
  auto log_alpha = kernel.log_alpha_reweight();
  const MomentumState st = log_alpha ? reweighted_state(s, log_alpha) : s;
  const std::vector<double> t = grid_or(st, x, spec, t_grid);
  const int n = node_count(st, x, t.front(), t.back());
  auto weight = [&st](double p) { return st.velocity(p); };
  auto disp = [&st](double p) { return st.energy(p); };
  NodeSet ns = make_nodes(st, n, weight, disp);
  std::vector<double> raw = kernel.unit() ? factorized_density(ns, x, t)
                                          : bilinear_density(ns, kernel, x, t);
  return finalize(std::move(t), std::move(raw), x, to_string(s.family()),
                  to_string(kernel.kind()));
}

ArrivalDistribution arrival_density_amplitude(const MomentumState& s, double x,
                                              double tau, double delta,
                                              const TimeGridSpec& spec,
                                              const std::vector<double>& t_grid) {
  if (!(tau >= 0.0) || !(delta >= 0.0))
    throw DomainError("arrival_density_amplitude: tau, delta must be >= 0");
  if (!s.bounded())
    throw DomainError("arrival_density_amplitude: unbounded support");
  const std::vector<double> t = grid_or(s, x, spec, t_grid);
  const int n = node_count(s, x, t.front(), t.back());
  auto weight = [&s](double p) { return s.velocity(p); };
  auto disp = [&s](double p) { return s.energy(p); };
  NodeSet ns = make_nodes(s, n, weight, disp);
  std::vector<double> raw = factorized_density(ns, x, t);
  return finalize(std::move(t), std::move(raw), x, to_string(s.family()),
                  "maximal");
}

ArrivalDistribution arrival_density_phillips(const MomentumState& s, double x,
                                             double tau, double delta,
                                             const TimeGridSpec& spec,
                                             const std::vector<double>& t_grid) {
  if (!(tau >= 0.0) || !(delta >= 0.0))
    throw DomainError("arrival_density_phillips: tau, delta must be >= 0");
  if (!s.bounded())
    throw DomainError("arrival_density_phillips: unbounded support");
  const std::vector<double> t = grid_or(s, x, spec, t_grid);
  const int n = node_count(s, x, t.front(), t.back());
  // Pointer-kernel weight exp(-tau E - delta K) factorizes over the two
  // momentum integrals, leaving a single weighted amplitude.
  auto weight = [&s, tau, delta](double p) {
    const double eps = s.energy(p);
    return std::exp(-tau * eps - delta * p) / (2.0 * eps);
  };
  auto disp = [&s](double p) { return s.energy(p); };
  NodeSet ns = make_nodes(s, n, weight, disp);
  std::vector<double> raw = factorized_density(ns, x, t);
  return finalize(std::move(t), std::move(raw), x, to_string(s.family()),
                  "phillips");
}

ArrivalDistribution kijowski_density(const MomentumState& s, double x,
                                     const TimeGridSpec& spec,
                                     const std::vector<double>& t_grid) {
  if (!s.bounded()) throw DomainError("kijowski_density: unbounded support");
  const std::vector<double> t = grid_or(s, x, spec, t_grid);
  const int n = node_count(s, x, t.front(), t.back());
  const double m = s.mass();
  auto weight = [m](double p) { return p / m; };
  auto disp = [m](double p) { return p * p / (2.0 * m); };
  NodeSet ns = make_nodes(s, n, weight, disp);
  std::vector<double> raw = factorized_density(ns, x, t);
  return finalize(std::move(t), std::move(raw), x, to_string(s.family()),
                  "kijowski");
}

std::vector<double> phillips_current(const MomentumState& s, double x,
                                     const std::vector<double>& t_grid) {
  if (!s.bounded()) throw DomainError("phillips_current: unbounded support");
  const int n = node_count(s, x, t_grid.front(), t_grid.back());
  std::vector<double> p, w;
  GaussLegendre::get(n).mapped(s.p_min(), s.p_max(), p, w);
  std::vector<cplx> c(n);
  for (int i = 0; i < n; ++i)
    c[i] = w[i] * s.amplitude(p[i]) / std::sqrt(2.0 * s.energy(p[i])) *
           std::polar(1.0, p[i] * x);
  std::vector<double> j(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    cplx phi = 0.0, dphi = 0.0;
    for (int i = 0; i < n; ++i) {
      const cplx term = c[i] * std::polar(1.0, -s.energy(p[i]) * t_grid[k]);
      phi += term;
      dphi += cplx(0.0, p[i]) * term;
    }
    j[k] = -(std::conj(phi) * dphi).imag();
  }
  double norm = 0.0;
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k)
    norm += 0.5 * (j[k] + j[k + 1]) * (t_grid[k + 1] - t_grid[k]);
  if (norm != 0.0)
    for (auto& v : j) v /= norm;
  return j;
}

double l1_distance(const ArrivalDistribution& a, const ArrivalDistribution& b) {
  if (a.t.size() != b.t.size())
    throw DomainError("l1_distance: grids differ in size");
  std::vector<double> diff(a.t.size());
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (a.t[i] != b.t[i]) throw DomainError("l1_distance: grids differ");
    diff[i] = std::abs(a.density[i] - b.density[i]);
  }
  return trapezoid(a.t, diff);
}

DensityMatrixGrid restrict_positive(const DensityMatrixGrid& rho) {
  DensityMatrixGrid out = rho;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j)
      if (out.nodes[i] * out.nodes[j] < 0.0) out.at(i, j) = 0.0;
  const double tr = out.trace();
  if (!(tr > 0.0))
    throw ZeroMass("restrict_positive: no positive-momentum component");
  for (auto& v : out.rho) v /= tr;
  return out;
}

ThetaTotals time_integrated_totals(const DensityMatrixGrid& rho, double x) {
  const std::size_t n = rho.size();
  ThetaTotals tot;
  for (std::size_t i = 0; i < n; ++i) {
    tot.diagonal += rho.weights[i] * rho.at(i, i).real();
    const std::size_t mirror = n - 1 - i;
    const double pm = rho.nodes[mirror];
    if (std::abs(pm + rho.nodes[i]) > 1e-12 * std::abs(rho.nodes[i]))
      throw DomainError("time_integrated_totals: grid not symmetric");
    tot.antidiagonal +=
        rho.weights[i] *
        (rho.at(i, mirror) * std::polar(1.0, 2.0 * rho.nodes[i] * x)).real();
  }
  return tot;
}

}  // namespace toa
