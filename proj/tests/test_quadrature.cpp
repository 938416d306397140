// Tests for the adaptive Gauss-Kronrod integrator against closed-form
// integrals and a deliberately oscillatory integrand.

#include <catch2/catch_amalgamated.hpp>

#include <heavytail/quadrature.hpp>
#include <heavytail/specfun.hpp>

#include <cmath>

namespace ht = heavytail;
using Catch::Approx;

TEST_CASE("polynomials and smooth integrands are exact to tolerance") {
  auto r1 = ht::quad::integrate([](double x) { return x * x * x; }, 0.0, 2.0);
  CHECK(r1.converged);
  CHECK(r1.value == Approx(4.0).margin(1e-12));

  auto r2 = ht::quad::integrate([](double x) { return std::exp(-x); }, 0.0,
                                50.0);
  CHECK(r2.converged);
  CHECK(r2.value == Approx(1.0 - std::exp(-50.0)).margin(1e-11));

  auto r3 = ht::quad::integrate([](double x) { return 1.0 / (1.0 + x * x); },
                                0.0, 1.0);
  CHECK(r3.value == Approx(ht::pi / 4.0).margin(1e-12));
}

TEST_CASE("oscillatory integrand with many periods converges") {
  // int_0^{40pi} sin(x) e^{-x/10} dx has a closed form.
  const double b = 40.0 * ht::pi;
  auto f = [](double x) { return std::sin(x) * std::exp(-x / 10.0); };
  // Antiderivative of sin(x)e^{-ax}: -e^{-ax}(cos x + a sin x)/(1+a^2).
  const double a = 0.1;
  auto F = [a](double x) {
    return -std::exp(-a * x) * (std::cos(x) + a * std::sin(x)) /
           (1.0 + a * a);
  };
  auto r = ht::quad::integrate(f, 0.0, b, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == Approx(F(b) - F(0.0)).margin(1e-10));
}

TEST_CASE("integrand with sharp peak benefits from seeds") {
  // Narrow Gaussian bump centred far from the midpoint.
  auto f = [](double x) {
    const double u = (x - 9.7) / 1e-3;
    return std::exp(-0.5 * u * u);
  };
  const double want = 1e-3 * std::sqrt(2.0 * ht::pi);  // full mass inside
  auto seeded = ht::quad::integrate(f, 0.0, 10.0, 1e-14, 200000,
                                    {9.6, 9.7, 9.8});
  CHECK(seeded.value == Approx(want).epsilon(1e-9));
}

TEST_CASE("error estimate bounds the true error on a hard integrand") {
  auto f = [](double x) { return std::sqrt(x); };
  auto r = ht::quad::integrate(f, 0.0, 1.0, 1e-10);
  CHECK(std::fabs(r.value - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("degenerate interval integrates to zero") {
  auto r = ht::quad::integrate([](double x) { return x; }, 1.0, 1.0);
  CHECK(r.value == 0.0);
}
