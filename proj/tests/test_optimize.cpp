#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "toa/optimize.hpp"

using namespace toa;

namespace {

// Plain bisection, kept independent of find_root on purpose.
double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fa * fm <= 0.0)
      b = m;
    else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double cubic(double b) { return b * b * b - 0.75 * b - 1.5; }

}  // namespace

TEST_CASE("parabola minimum") {
  const MinimizeResult r =
      minimize_scalar([](double b) { return (b - 2.0) * (b - 2.0); }, 0.0, 5.0);
  CHECK(r.converged);
  CHECK(r.argmin == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("am-gm minimum of b + 1/b") {
  const MinimizeResult r =
      minimize_scalar([](double b) { return b + 1.0 / b; }, 0.1, 10.0);
  CHECK(r.argmin == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.min_value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("variational objective: argmin equals the cubic root") {
  auto f = [](double b) {
    return b + 0.25 * (1.0 + 3.0 / b + 3.0 / (b * b));
  };
  const MinimizeResult r = minimize_scalar(f, 0.1, 10.0);
  const double b_star = bisect(cubic, 1.0, 2.0);
  CHECK(r.argmin == doctest::Approx(b_star).epsilon(1e-7));
  // stationarity by central difference
  const double h = 1e-5;
  const double deriv = (f(r.argmin + h) - f(r.argmin - h)) / (2.0 * h);
  CHECK(std::abs(deriv) < 1e-6);
}

TEST_CASE("find_root basics") {
  const double r2 =
      find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0);
  CHECK(r2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(r2 * r2 - 2.0) < 1e-10);

  const double b_star = find_root(cubic, 1.0, 2.0);
  CHECK(b_star == doctest::Approx(bisect(cubic, 1.0, 2.0)).epsilon(1e-10));
  CHECK(std::abs(cubic(b_star)) < 1e-10);

  CHECK(find_root([](double x) { return x; }, -1.0, 1.0) ==
        doctest::Approx(0.0));
}

TEST_CASE("bracket errors") {
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  NoSignChange);
  CHECK_THROWS_AS(minimize_scalar([](double x) { return x * x; }, 2.0, 1.0),
                  BracketInvalid);
}
