#include "toa/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace toa {

namespace {

// Legendre polynomial value and derivative at x, order n.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[n - 1 - i] = x;
    gl.nodes[i] = -x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

template <typename T>
double magnitude(T v) {
  return std::abs(v);
}

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
};

// Fine rule: GL(n); error indicator: |GL(n) - GL(floor(n/2))|.
template <typename T>
Panel<T> eval_panel(const std::function<T(double)>& f, double a, double b,
                    const GaussLegendre& fine, const GaussLegendre& coarse) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  T fine_sum{};
  std::vector<T> vals(fine.nodes.size());
  for (std::size_t i = 0; i < fine.nodes.size(); ++i) {
    vals[i] = f(mid + half * fine.nodes[i]);
    fine_sum += fine.weights[i] * vals[i];
  }
  T coarse_sum{};
  for (std::size_t i = 0; i < coarse.nodes.size(); ++i)
    coarse_sum += coarse.weights[i] * f(mid + half * coarse.nodes[i]);
  Panel<T> p;
  p.a = a;
  p.b = b;
  p.value = half * fine_sum;
  p.error = magnitude(half * (fine_sum - coarse_sum));
  return p;
}

template <typename T>
T adaptive(const std::function<T(double)>& f, double a, double b,
           const QuadratureSpec& spec) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate: requires a < b");

  const GaussLegendre& fine = GaussLegendre::get(spec.nodes_per_panel);
  const GaussLegendre& coarse =
      GaussLegendre::get(std::max(2, spec.nodes_per_panel / 2));

  // Worst-error-first refinement; a serial counter breaks ties so panel
  // processing order is fully deterministic.
  std::multimap<double, std::pair<long, Panel<T>>, std::greater<double>> queue;
  long serial = 0;
  auto push = [&](Panel<T> p) { queue.emplace(p.error, std::make_pair(serial++, std::move(p))); };

  push(eval_panel(f, a, b, fine, coarse));
  int splits = 0;
  while (true) {
    T total{};
    double err = 0.0;
    for (const auto& [e, sp] : queue) {
      total += sp.second.value;
      err += e;
    }
    if (err <= std::max(spec.abs_tol, spec.rel_tol * magnitude(total))) break;
    if (splits >= spec.max_subdivisions)
      throw NonConvergence("integrate: subdivision budget exhausted");
    auto worst = queue.begin();
    Panel<T> p = worst->second.second;
    queue.erase(worst);
    const double mid = 0.5 * (p.a + p.b);
    push(eval_panel(f, p.a, mid, fine, coarse));
    push(eval_panel(f, mid, p.b, fine, coarse));
    ++splits;
  }

  // Final compensated sum in left-to-right panel order.
  std::vector<Panel<T>> panels;
  panels.reserve(queue.size());
  for (const auto& [e, sp] : queue) panels.push_back(sp.second);
  std::sort(panels.begin(), panels.end(),
            [](const Panel<T>& l, const Panel<T>& r) { return l.a < r.a; });
  T sum{}, comp{};
  for (const auto& p : panels) {
    const T y = p.value - comp;
    const T t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <typename T>
T oscillatory(const std::function<T(double)>& f, double a, double b,
              double max_abs_freq, const QuadratureSpec& spec) {
  if (!(a < b)) throw DomainError("integrate_oscillatory: requires a < b");
  int panels = 1;
  if (max_abs_freq > 0.0) {
    const double need = (b - a) * max_abs_freq / M_PI;
    panels = std::max(1, static_cast<int>(std::ceil(need)));
  }
  // The Nyquist pre-split is uniform, not adaptive; only a hard sanity cap.
  if (panels > 2000000)
    throw NonConvergence("integrate_oscillatory: frequency too high");
  QuadratureSpec sub = spec;
  sub.abs_tol = spec.abs_tol / panels;
  T sum{}, comp{};
  for (int k = 0; k < panels; ++k) {
    const double pa = a + (b - a) * k / panels;
    const double pb = a + (b - a) * (k + 1) / panels;
    const T y = adaptive<T>(f, pa, pb, sub) - comp;
    const T t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

const GaussLegendre& GaussLegendre::get(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

void GaussLegendre::mapped(double a, double b, std::vector<double>& x,
                           std::vector<double>& w) const {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  x.resize(nodes.size());
  w.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x[i] = mid + half * nodes[i];
    w[i] = half * weights[i];
  }
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  return adaptive<double>(f, a, b, spec);
}

std::complex<double> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadratureSpec& spec) {
  return adaptive<std::complex<double>>(f, a, b, spec);
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               double a, const QuadratureSpec& spec,
                               double scale) {
  if (!(scale > 0.0)) throw DomainError("integrate_semi_infinite: scale > 0");
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double p = a + scale * s / one_minus;
    return f(p) * scale / (one_minus * one_minus);
  };
  return adaptive<double>(mapped, 0.0, 1.0, spec);
}

double integrate_oscillatory(const std::function<double(double)>& f, double a,
                             double b, double max_abs_freq,
                             const QuadratureSpec& spec) {
  return oscillatory<double>(f, a, b, max_abs_freq, spec);
}

std::complex<double> integrate_oscillatory_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double max_abs_freq, const QuadratureSpec& spec) {
  return oscillatory<std::complex<double>>(f, a, b, max_abs_freq, spec);
}

std::complex<double> integrate2d(
    const std::function<std::complex<double>(double, double)>& f,
    const Rectangle& d, const QuadratureSpec& spec) {
  if (!(d.ax < d.bx) || !(d.ay < d.by))
    throw DomainError("integrate2d: degenerate rectangle");
  QuadratureSpec inner = spec;
  inner.abs_tol = 0.5 * spec.abs_tol / (d.by - d.ay);
  auto outer = [&](double y) {
    return integrate_complex([&](double x) { return f(x, y); }, d.ax, d.bx,
                             inner);
  };
  return integrate_complex(outer, d.ay, d.by, spec);
}

}  // namespace toa
