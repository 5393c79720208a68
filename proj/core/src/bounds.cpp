#include "toa/bounds.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "toa/arrival.hpp"
#include "toa/moments.hpp"
#include "toa/optimize.hpp"

namespace toa {

namespace {

double mass_term_of(const MomentumState& s, const QuadratureSpec& spec = {}) {
  const double m = s.mass();
  const double m4 = m * m * m * m;
  return momentum_expectation(
      s,
      [m, m4](double p) {
        const double eps2 = p * p + m * m;
        return 0.25 * m4 / (eps2 * p * p * p * p);
      },
      spec);
}

// Deterministic uniform in [0, 1) independent of distribution wrappers.
double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace

EnergySpread energy_spread(const MomentumState& s) {
  QuadratureSpec spec;
  auto moments_on = [&](double p_hi) {
    const double m1 = integrate(
        [&](double p) { return s.energy(p) * s.density(p); }, s.p_min(), p_hi,
        spec);
    const double m2 = integrate(
        [&](double p) {
          const double e = s.energy(p);
          return e * e * s.density(p);
        },
        s.p_min(), p_hi, spec);
    return m2 - m1 * m1;
  };
  if (s.bounded()) {
    EnergySpread out;
    out.dh = std::sqrt(std::max(0.0, moments_on(s.p_max())));
    return out;
  }
  // Doubling truncation study for unbounded supports.
  const double growth_cap = 1e6 * s.mass() * s.mass();
  double p_hi = s.p_min() + 8.0 * s.tail_scale();
  double prev = moments_on(p_hi);
  int growing = 0;
  for (int k = 0; k < 60; ++k) {
    p_hi *= 2.0;
    const double cur = moments_on(p_hi);
    if (cur > prev * 1.02) {
      growing = (cur > growth_cap) ? growing + 1 : 0;
      if (growing >= 2) return {0.0, true};
    } else if (std::abs(cur - prev) <= 1e-9 * std::abs(cur)) {
      return {std::sqrt(std::max(0.0, cur)), false};
    }
    prev = cur;
  }
  return {std::sqrt(std::max(0.0, prev)), false};
}

EnergyMean mean_energy(const MomentumState& s) {
  QuadratureSpec spec;
  auto mean_on = [&](double p_hi) {
    return integrate([&](double p) { return s.energy(p) * s.density(p); },
                     s.p_min(), p_hi, spec);
  };
  if (s.bounded()) return {mean_on(s.p_max()), false};
  const double growth_cap = 1e6 * s.mass();
  double p_hi = s.p_min() + 8.0 * s.tail_scale();
  double prev = mean_on(p_hi);
  int growing = 0;
  for (int k = 0; k < 60; ++k) {
    p_hi *= 2.0;
    const double cur = mean_on(p_hi);
    if (cur > prev * 1.02) {
      growing = (cur > growth_cap) ? growing + 1 : 0;
      if (growing >= 2)
        return {std::numeric_limits<double>::infinity(), true};
    } else if (std::abs(cur - prev) <= 1e-9 * std::abs(cur)) {
      return {cur, false};
    }
    prev = cur;
  }
  return {prev, false};
}

BoundReport fundamental_bound(const MomentumState& s, double measured_variance,
                              const QuadratureSpec& spec) {
  BoundReport rep;
  rep.lhs = measured_variance;
  const EnergySpread es = energy_spread(s);
  rep.dh = es.dh;
  rep.dh_infinite = es.infinite;
  rep.energy_term = es.infinite ? 0.0 : 1.0 / (4.0 * es.dh * es.dh);
  rep.mass_term = mass_term_of(s, spec);
  const double rhs = rep.energy_term + rep.mass_term;
  rep.slack = rep.lhs - rhs;
  rep.satisfied = rep.lhs >= rhs - 1e-9 * std::max(rhs, rep.lhs);
  return rep;
}

KineticBound kinetic_bound(const MomentumState& s) {
  const double m = s.mass();
  KineticBound kb;
  const EnergyMean em = mean_energy(s);
  kb.mean_ek = em.infinite ? std::numeric_limits<double>::infinity()
                           : em.value - m;
  const double inv_ek2 = momentum_expectation(s, [&](double p) {
    const double ek = s.energy(p) - m;
    return 1.0 / (ek * ek);
  });
  const EnergySpread es = energy_spread(s);
  const double energy_term = es.infinite ? 0.0 : 1.0 / (4.0 * es.dh * es.dh);
  kb.dt_lower = std::sqrt(energy_term + inv_ek2 / 16.0);
  kb.product = kb.mean_ek * kb.dt_lower;
  kb.passes_quarter = kb.product > 0.25;
  if (em.infinite) {
    kb.regime_ok = false;
    return kb;
  }
  const double mean_p = momentum_expectation(s, [](double p) { return p; });
  kb.regime_ok = mean_p / m <= 0.1;
  return kb;
}

UltrarelReport ultrarel_bounds(const MomentumState& s, double mass) {
  UltrarelReport rep;
  const double m4 = mass * mass * mass * mass;
  rep.h6_term = momentum_expectation(s, [&](double p) {
    const double e = s.energy(p);
    return 0.25 * m4 / (e * e * e * e * e * e);
  });
  const EnergySpread es = energy_spread(s);
  rep.energy_term = es.infinite ? 0.0 : 1.0 / (4.0 * es.dh * es.dh);
  rep.dt_lower = std::sqrt(rep.energy_term + rep.h6_term);
  const EnergyMean em = mean_energy(s);
  rep.h_mean =
      em.infinite ? std::numeric_limits<double>::infinity() : em.value;
  rep.product = rep.h_mean * rep.h_mean * rep.h_mean * rep.dt_lower;
  rep.threshold = 0.5 * mass * mass;
  rep.satisfied = rep.product > rep.threshold;
  const double fundamental_rhs = rep.energy_term + mass_term_of(s);
  rep.rhs_ratio = (rep.energy_term + rep.h6_term) / fundamental_rhs;
  return rep;
}

double levy_inverse_moment(int k, double c) {
  if (k < 1) throw DomainError("levy_inverse_moment: k >= 1");
  return std::tgamma(k + 0.5) * std::pow(2.0, k) /
         (std::sqrt(M_PI) * std::pow(c, k));
}

LevyCoefficient levy_bound_constants(double c_E, double mass, Regime regime) {
  LevyCoefficient out;
  out.regime = regime;
  out.c_E = c_E;
  const MomentumState s = make_levy_energy_state(c_E, mass);
  if (regime == Regime::nonrel) {
    // Mass term limit (1/16) <E_k^-2>; lower bound on dt scales as 1/c_E.
    const double inv2 = momentum_expectation(s, [&](double p) {
      const double y = s.energy(p) - mass;
      return 1.0 / (y * y);
    });
    out.coefficient = c_E * std::sqrt(inv2 / 16.0);
    out.closed_form = 0.25 * std::sqrt(3.0);
    out.published_value = 0.5 * std::sqrt(3.0);
    out.regime_ok = c_E <= 0.1 * mass;
    out.factor_two_flag =
        std::abs(out.published_value / out.coefficient - 2.0) < 1e-2;
  } else {
    // Mass term limit (m^4/4) <(E-m)^-6>; lower bound scales as m^2/c_E^3.
    const double inv6 = momentum_expectation(s, [&](double p) {
      const double y = s.energy(p) - mass;
      return 1.0 / (y * y * y * y * y * y);
    });
    out.coefficient = (c_E * c_E * c_E / (mass * mass)) *
                      std::sqrt(0.25 * mass * mass * mass * mass * inv6);
    out.closed_form = 0.5 * std::sqrt(10395.0);
    out.published_value = 51.0;
    out.regime_ok = c_E >= 10.0 * mass;
    out.factor_two_flag = false;
  }
  out.rel_err_vs_closed =
      std::abs(out.coefficient - out.closed_form) / out.closed_form;
  return out;
}

VariationalResult variational_constant(Regime regime, double xi0) {
  VariationalResult res;
  res.regime = regime;
  res.xi0 = xi0;
  OptimizeSpec ospec;
  ospec.abs_tol = 1e-12;
  if (regime == Regime::nonrel) {
    auto f = [](double lb) {
      const double b = std::exp(lb);
      return b + 0.25 * (1.0 + 3.0 / b + 3.0 / (b * b));
    };
    const MinimizeResult mr =
        minimize_scalar(f, std::log(1e-2), std::log(1e2), ospec);
    res.b_star = std::exp(mr.argmin);
    res.constant = 0.5 * std::sqrt(mr.min_value);
    res.published_value = 0.8;
  } else {
    if (!(xi0 > 1.0))
      throw DomainError("variational_constant: ultrarel regime needs xi0 > 1");
    const double xi4 = xi0 * xi0 * xi0 * xi0;
    auto q = [](double x) {
      return x * (1.0 + x * (10.0 + x * (60.0 + x * (225.0 + x * (495.0 + x * 495.0)))));
    };
    auto h = [&](double lb) {
      const double b = std::exp(lb);
      return b + (1.0 + 21.0 * q(1.0 / b)) / xi4;
    };
    const MinimizeResult mr =
        minimize_scalar(h, std::log(1e-6), std::log(1e2), ospec);
    res.b_star = std::exp(mr.argmin);
    res.constant = std::pow(1.0 + xi0, 9.0 / 7.0) * std::sqrt(mr.min_value) /
                   (2.0 * xi0);
    res.published_value = 1.7;
  }
  return res;
}

SuiteOutcome inequality_suite(int n, std::uint64_t seed, double mass) {
  SuiteOutcome out;
  out.seed = seed;
  out.n = n;
  std::mt19937_64 gen(seed);
  for (int i = 0; i < n; ++i) {
    SuiteRow row;
    row.p0 = mass * std::exp(std::log(0.1) +
                             uniform01(gen) * (std::log(10.0) - std::log(0.1)));
    row.sigma_p = row.p0 * (0.02 + 0.06 * uniform01(gen));
    row.x = 5.0 / row.sigma_p;
    const MomentumState s = make_gaussian_state(row.p0, row.sigma_p, 0.0, mass);
    const ArrivalDistribution d =
        arrival_density_amplitude(s, row.x, 0.0, 0.0);
    row.lhs = variance_arrival(d);
    const BoundReport rep = fundamental_bound(s, row.lhs);
    row.rhs = rep.energy_term + rep.mass_term;
    row.satisfied = rep.satisfied;
    if (row.satisfied) ++out.satisfied;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace toa
