#include "toa/detector.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace toa {

namespace {

double eps_of(double p, double m) { return std::hypot(p, m); }

// Natural cubic spline through (x, y), evaluated with linear extrapolation.
class Spline {
 public:
  Spline(const std::vector<double>& x, const std::vector<double>& y)
      : x_(x), y_(y), m_(x.size(), 0.0) {
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("spline: need at least two knots");
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {  // Thomas algorithm
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  double operator()(double x) const {
    if (x <= x_.front())
      return y_.front() + slope_front() * (x - x_.front());
    if (x >= x_.back())
      return y_.back() + slope_back() * (x - x_.back());
    std::size_t i =
        std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  double slope_front() const {
    const double h = x_[1] - x_[0];
    return (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
  }
  double slope_back() const {
    const std::size_t n = x_.size();
    const double h = x_[n - 1] - x_[n - 2];
    return (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
  }
  std::vector<double> x_, y_, m_;
};

const Spline& table_spline(const Absorption& a) {
  thread_local std::vector<double> cached_p, cached_alpha;
  thread_local std::unique_ptr<Spline> spline;
  if (!spline || cached_p != a.table_p || cached_alpha != a.table_alpha) {
    std::vector<double> lna(a.table_alpha.size());
    for (std::size_t i = 0; i < lna.size(); ++i) lna[i] = std::log(a.table_alpha[i]);
    spline = std::make_unique<Spline>(a.table_p, lna);
    cached_p = a.table_p;
    cached_alpha = a.table_alpha;
  }
  return *spline;
}

}  // namespace

std::string to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::maximal: return "maximal";
    case DetectorKind::fully_decoherent: return "fully_decoherent";
    case DetectorKind::coherent: return "coherent";
    case DetectorKind::covariant: return "covariant";
    case DetectorKind::ideal: return "ideal";
  }
  return "maximal";
}

void Absorption::validate() const {
  switch (form) {
    case Form::constant:
      if (!(value > 0.0)) throw DomainError("alpha: constant must be positive");
      break;
    case Form::exp_family:
      if (!(coeff > 0.0)) throw DomainError("alpha: coeff must be positive");
      break;
    case Form::table:
      if (table_p.size() < 2 || table_p.size() != table_alpha.size())
        throw DomainError("alpha: table needs matching p/alpha arrays");
      for (std::size_t i = 0; i < table_p.size(); ++i) {
        if (!(table_alpha[i] > 0.0)) throw DomainError("alpha: table values > 0");
        if (i > 0 && !(table_p[i] > table_p[i - 1]))
          throw DomainError("alpha: table momenta must increase");
      }
      break;
  }
}

double Absorption::log_alpha(double p, double mass) const {
  if (!(p > 0.0)) throw DomainError("alpha: momentum must be positive");
  switch (form) {
    case Form::constant:
      return std::log(value);
    case Form::exp_family: {
      const double eps = eps_of(p, mass);
      return std::log(coeff) - p_log * std::log(p) - e_log * std::log(eps) -
             p_lin * p - e_lin * eps - p_quad * p * p;
    }
    case Form::table:
      return table_spline(*this)(p);
  }
  return 0.0;
}

double Absorption::dlog_alpha(double p, double mass) const {
  switch (form) {
    case Form::constant:
      return 0.0;
    case Form::exp_family: {
      const double eps = eps_of(p, mass);
      const double v = p / eps;
      return -p_log / p - e_log * v / eps - p_lin - e_lin * v -
             2.0 * p_quad * p;
    }
    case Form::table: {
      const double h = 1e-4 * p;
      const Spline& s = table_spline(*this);
      return (s(p + h) - s(p - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double Absorption::d2log_alpha(double p, double mass) const {
  switch (form) {
    case Form::constant:
      return 0.0;
    case Form::exp_family: {
      const double eps = eps_of(p, mass);
      const double eps2 = eps * eps;
      // d(v/eps)/dp = (eps^2 - 2 p^2) / eps^4
      const double dve = (eps2 - 2.0 * p * p) / (eps2 * eps2);
      return p_log / (p * p) - e_log * dve -
             e_lin * mass * mass / (eps2 * eps) - 2.0 * p_quad;
    }
    case Form::table: {
      const double h = 1e-4 * p;
      const Spline& s = table_spline(*this);
      return (s(p + h) - 2.0 * s(p) + s(p - h)) / (h * h);
    }
  }
  return 0.0;
}

void CovariantSigma::validate() const {
  if (form == Form::exponential && !(rate > 0.0))
    throw DomainError("sigma: rate must be positive");
  if (form == Form::power && !(exponent > 0.0))
    throw DomainError("sigma: exponent must be positive");
}

double CovariantSigma::log_sigma(double z) const {
  if (form == Form::exponential) return -rate * z;
  if (!(z > 0.0)) throw DomainError("sigma: z must be positive for power form");
  return -exponent * std::log(z);
}

double CovariantSigma::dlog_sigma(double z) const {
  if (form == Form::exponential) return -rate;
  return -exponent / z;
}

void IdealProfile::validate() const {
  if (!(width > 0.0)) throw DomainError("profile: width must be positive");
}

double IdealProfile::density(double s) const {
  const double z = s / width;
  return std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * M_PI));
}

double IdealProfile::char_fn(double w) const {
  const double z = width * w;
  return std::exp(-0.5 * z * z);
}

void DetectorModel::validate() const {
  switch (kind) {
    case DetectorKind::maximal:
      if (tau < 0.0 || delta < 0.0)
        throw DomainError("maximal detector: tau, delta must be >= 0");
      break;
    case DetectorKind::fully_decoherent:
    case DetectorKind::coherent:
      alpha.validate();
      break;
    case DetectorKind::covariant:
      sigma.validate();
      break;
    case DetectorKind::ideal:
      profile.validate();
      break;
  }
}

std::string DetectorModel::label() const { return to_string(kind); }

LocalizationKernel::LocalizationKernel(DetectorModel det, double mass)
    : det_(std::move(det)), mass_(mass) {
  if (!(mass_ > 0.0)) throw DomainError("LocalizationKernel: mass > 0");
  det_.validate();
}

double LocalizationKernel::operator()(double p, double pp) const {
  if (det_.kind == DetectorKind::maximal) return 1.0;
  if (!(p > 0.0) || !(pp > 0.0))
    throw DomainError("localization kernel: momenta must be positive");
  if (p == pp) return 1.0;
  const double m = mass_;
  switch (det_.kind) {
    case DetectorKind::fully_decoherent: {
      // ln S~(K) = ln 2K + ln alpha(K)
      auto lnS = [&](double k) {
        return std::log(2.0 * k) + det_.alpha.log_alpha(k, m);
      };
      const double kbar = 0.5 * (p + pp);
      return std::exp(lnS(kbar) - 0.5 * lnS(p) - 0.5 * lnS(pp));
    }
    case DetectorKind::coherent: {
      // ln S~(E) = ln 2 + (1/2) ln(E^2 - m^2) + ln alpha(sqrt(E^2 - m^2))
      auto lnS = [&](double e) {
        const double k2 = e * e - m * m;
        return std::log(2.0) + 0.5 * std::log(k2) +
               det_.alpha.log_alpha(std::sqrt(k2), m);
      };
      const double ebar = 0.5 * (eps_of(p, m) + eps_of(pp, m));
      return std::exp(lnS(ebar) - 0.5 * lnS(eps_of(p, m)) -
                      0.5 * lnS(eps_of(pp, m)));
    }
    case DetectorKind::covariant: {
      const double pdotp = eps_of(p, m) * eps_of(pp, m) - p * pp;
      const double z = 0.5 * (m * m + pdotp);
      return std::exp(det_.sigma.log_sigma(z) - det_.sigma.log_sigma(m * m));
    }
    case DetectorKind::ideal:
      return det_.profile.char_fn(2.0 * (pp - p) / (p + pp));
    case DetectorKind::maximal:
      break;
  }
  return 1.0;
}

std::function<double(double)> LocalizationKernel::log_alpha_reweight() const {
  switch (det_.kind) {
    case DetectorKind::fully_decoherent:
    case DetectorKind::coherent: {
      const Absorption a = det_.alpha;
      const double m = mass_;
      return [a, m](double p) { return a.log_alpha(p, m); };
    }
    case DetectorKind::covariant:
      // alpha(p) = Sigma(m^2) / (2p); the constant cancels on renormalization.
      return [](double p) { return -std::log(2.0 * p); };
    case DetectorKind::maximal:
    case DetectorKind::ideal:
      return nullptr;
  }
  return nullptr;
}

LocalizationKernel localization_kernel(const DetectorModel& det, double mass) {
  return LocalizationKernel(det, mass);
}

double detection_width(const DetectorModel& det, double p, double mass) {
  if (!(p > 0.0)) throw DomainError("detection_width: p must be positive");
  const double m = mass;
  const double eps = eps_of(p, m);
  const double eps2 = eps * eps;
  switch (det.kind) {
    case DetectorKind::maximal:
      return 0.0;
    case DetectorKind::fully_decoherent:
      return 0.25 * det.alpha.d2log_alpha(p, m) - 0.25 / (p * p);
    case DetectorKind::coherent: {
      // On-shell curvature of ln S~(E) mapped through E = eps_p; reduces to
      // (v^2/4) d^2/dE^2 ln S~.
      const double la1 = det.alpha.dlog_alpha(p, m);
      const double la2 = det.alpha.d2log_alpha(p, m);
      return 0.25 * la2 - 0.25 / (p * p) - m * m / (4.0 * eps2 * p * p) -
             m * m * la1 / (4.0 * eps2 * p);
    }
    case DetectorKind::covariant:
      return -det.sigma.dlog_sigma(m * m) * m * m / (2.0 * eps2);
    case DetectorKind::ideal:
      return det.profile.variance() / (p * p);
  }
  return 0.0;
}

namespace {

// Kernel anti-diagonal L(p + xi/2, p - xi/2). The covariant and ideal
// closed forms extend smoothly past |xi| = 2p; the spectra parameterized by
// alpha are confined to positive momenta.
double anti_diagonal(const DetectorModel& det, double mass, double p,
                     double xi) {
  const double m = mass;
  const double pa = p + 0.5 * xi, pb = p - 0.5 * xi;
  switch (det.kind) {
    case DetectorKind::maximal:
      return 1.0;
    case DetectorKind::fully_decoherent: {
      if (!(pa > 0.0) || !(pb > 0.0))
        throw FourierGridError("anti_diagonal: |xi| >= 2p");
      auto lnS = [&](double k) {
        return std::log(2.0 * k) + det.alpha.log_alpha(k, m);
      };
      return std::exp(lnS(p) - 0.5 * lnS(pa) - 0.5 * lnS(pb));
    }
    case DetectorKind::coherent: {
      if (!(pa > 0.0) || !(pb > 0.0))
        throw FourierGridError("anti_diagonal: |xi| >= 2p");
      auto lnS = [&](double e) {
        const double k2 = e * e - m * m;
        return 0.5 * std::log(k2) + det.alpha.log_alpha(std::sqrt(k2), m);
      };
      const double ebar = 0.5 * (std::hypot(pa, m) + std::hypot(pb, m));
      return std::exp(lnS(ebar) - 0.5 * lnS(std::hypot(pa, m)) -
                      0.5 * lnS(std::hypot(pb, m)));
    }
    case DetectorKind::covariant: {
      const double pdotp = std::hypot(pa, m) * std::hypot(pb, m) - pa * pb;
      const double z = 0.5 * (m * m + pdotp);
      return std::exp(det.sigma.log_sigma(z) - det.sigma.log_sigma(m * m));
    }
    case DetectorKind::ideal:
      return det.profile.char_fn(xi / p);
  }
  return 1.0;
}

// The alpha-restricted families live on |xi| < 2p.
bool window_capped(DetectorKind k) {
  return k == DetectorKind::fully_decoherent || k == DetectorKind::coherent;
}

}  // namespace

double detection_width_numeric(const DetectorModel& det, double p,
                               double mass) {
  auto g = [&](double xi) { return anti_diagonal(det, mass, p, xi); };
  // 4th-order symmetric stencil: g''(0) = (-2 g(2h) + 32 g(h) - 30) / (12 h^2)
  auto d2 = [&](double h) {
    return (-2.0 * g(2.0 * h) + 32.0 * g(h) - 30.0) / (12.0 * h * h);
  };
  // Two-stage step choice balancing roundoff against truncation.
  double h = 0.1 * p;
  double est = d2(h);
  const double curv = std::max(std::abs(est), 1e-10 / (p * p));
  h = std::min(2e-3 / std::sqrt(curv), 0.4 * p);
  const double coarse = d2(h), fine = d2(0.5 * h);
  return -(16.0 * fine - coarse) / 15.0;  // Richardson on the O(h^4) error
}

RecordSpread record_spread(const DetectorModel& det, double p, double mass,
                           const SpreadGridSpec& grid) {
  if (!(p > 0.0)) throw DomainError("record_spread: p must be positive");
  if (grid.n < 16 || grid.n % 2 != 0)
    throw FourierGridError("record_spread: grid size must be even and >= 16");
  det.validate();
  auto ut = [&](double xi) { return anti_diagonal(det, mass, p, xi); };

  // Kernel anti-diagonals needing both momenta positive limit |xi| < 2p.
  // Non-decaying spectra (the maximal detector) stop at a window wide enough
  // to resolve any spread on the 1/p scale into a single cell.
  const double hard_cap = window_capped(det.kind) ? 1.995 * p : 1024.0 * p;
  double xi_max = 0.125 * p;
  while (xi_max < hard_cap && std::abs(ut(xi_max)) > grid.decay_cut)
    xi_max = std::min(2.0 * xi_max, hard_cap);

  RecordSpread out;
  out.momentum = p;
  out.xi_max = xi_max;
  const int n = grid.n;
  const double dxi = 2.0 * xi_max / n;
  out.dx = M_PI / xi_max;
  out.x.resize(n);
  out.u.resize(n);

  std::vector<double> uvals(n / 2);  // xi > 0 midpoints; even symmetry
  for (int k = 0; k < n / 2; ++k) uvals[k] = ut((k + 0.5) * dxi);

  for (int j = 0; j < n; ++j) {
    const double x = (j - n / 2) * out.dx;
    double sum = 0.0;
    for (int k = 0; k < n / 2; ++k)
      sum += uvals[k] * std::cos((k + 0.5) * dxi * x);
    out.x[j] = x;
    out.u[j] = sum * dxi / M_PI;  // both xi signs folded
  }

  double umax = 0.0;
  out.min_u = out.u[0];
  for (int j = 0; j < n; ++j) {
    out.min_u = std::min(out.min_u, out.u[j]);
    umax = std::max(umax, out.u[j]);
    out.total += out.u[j] * out.dx;
    out.mean += out.x[j] * out.u[j] * out.dx;
    out.second_moment += out.x[j] * out.x[j] * out.u[j] * out.dx;
  }
  out.regular = out.min_u >= -1e-9 * std::max(umax, 1e-300);
  return out;
}

namespace {

// Cyclic Jacobi eigenvalue sweep for a dense symmetric matrix.
void symmetric_eigenvalues(std::vector<double>& a, int n,
                           std::vector<double>& eig) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-24 * n * n) break;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double apq = a[i * n + j];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[i * n + i], aqq = a[j * n + j];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double aik = a[i * n + k], ajk = a[j * n + k];
          a[i * n + k] = c * aik - s * ajk;
          a[j * n + k] = s * aik + c * ajk;
        }
        for (int k = 0; k < n; ++k) {
          const double aki = a[k * n + i], akj = a[k * n + j];
          a[k * n + i] = c * aki - s * akj;
          a[k * n + j] = s * aki + c * akj;
        }
      }
    }
  }
  eig.resize(n);
  for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
}

}  // namespace

RegularityReport regularity_check(const DetectorModel& det, double p_lo,
                                  double p_hi, double mass, int n) {
  if (!(p_lo > 0.0) || !(p_lo < p_hi))
    throw DomainError("regularity_check: window must be positive and ordered");
  LocalizationKernel kern(det, mass);
  RegularityReport rep;
  rep.grid_n = n;
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double pi = p_lo + (p_hi - p_lo) * i / (n - 1);
    for (int j = 0; j <= i; ++j) {
      const double pj = p_lo + (p_hi - p_lo) * j / (n - 1);
      const double lij = kern(pi, pj);
      g[i * n + j] = lij;
      g[j * n + i] = lij;
      if (i != j) rep.max_offdiag = std::max(rep.max_offdiag, std::abs(lij));
    }
  }
  std::vector<double> eig;
  symmetric_eigenvalues(g, n, eig);
  rep.lambda_min = *std::min_element(eig.begin(), eig.end());
  rep.lambda_max = *std::max_element(eig.begin(), eig.end());
  rep.regular = rep.lambda_min >= -1e-9 * rep.lambda_max;
  rep.cs_bound_ok = rep.max_offdiag <= 1.0 + 1e-12;
  return rep;
}

std::complex<double> MaximalForms::S(double t, double x) const {
  const std::complex<double> i(0.0, 1.0);
  return 1.0 / ((1.0 + i * t / tau) * (1.0 - i * x / delta));
}

double MaximalForms::alpha(double p, double mass) const {
  const double eps = eps_of(p, mass);
  return tau * delta * std::exp(-tau * eps - delta * p) / (2.0 * p);
}

MaximalForms maximal_detector_forms(double tau, double delta) {
  if (!(tau > 0.0) || !(delta > 0.0))
    throw DomainError("maximal_detector_forms: tau, delta must be positive");
  return MaximalForms{tau, delta};
}

}  // namespace toa
