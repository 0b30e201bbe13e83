#include "helpers.hpp"
#include "wavelab/quadrature.hpp"

#include <doctest.h>

using namespace wavelab;
using namespace wavelab::testing;

TEST_CASE("Gauss-Legendre rule matches the Golub-Welsch oracle") {
  for (int n : {1, 2, 5, 16, 40}) {
    const GaussRule r = gauss_legendre(n, -0.5, 2.0);
    const GLRule o = gauss_legendre_oracle(n, -0.5, 2.0);
    CHECK((r.nodes - o.x).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((r.weights - o.w).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("adaptive Gauss-Kronrod on known integrals") {
  auto r = integrate_adaptive([](double x) { return cplx(std::exp(-x * x)); }, -6, 6);
  CHECK(std::abs(r.value - std::sqrt(pi)) < 1e-10);
  r = integrate_adaptive([](double x) { return std::exp(cplx(0, 60 * x)); }, 0, 1);
  CHECK(std::abs(r.value - (std::exp(cplx(0, 60)) - 1.0) / cplx(0, 60)) < 1e-10);
  r = integrate_adaptive([](double x) { return cplx(std::sqrt(x)); }, 0, 1, {1e-12, 0, 4000, 1});
  CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-11);
  CHECK(r.error <= 1e-12);
}

TEST_CASE("adaptive quadrature reports non-convergence") {
  AdaptiveOptions o;
  o.max_intervals = 8;
  o.abs_tol = 1e-14;
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return cplx(1 / std::sqrt(x + 1e-12)); }, 0, 1, o),
                  QuadratureError);
}

TEST_CASE("finite-difference weights") {
  Eigen::VectorXd x(3);
  x << -1, 0, 1;
  Eigen::VectorXd w = fd_weights(x, 2);
  CHECK(w[0] == doctest::Approx(1));
  CHECK(w[1] == doctest::Approx(-2));
  w = fd_weights(x, 1);
  CHECK(w[0] == doctest::Approx(-0.5));
  CHECK(w[2] == doctest::Approx(0.5));
  Eigen::VectorXd y(9);
  for (int i = 0; i < 9; ++i) y[i] = (i - 4) * 0.05;
  for (int m = 1; m <= 4; ++m) {
    const Eigen::VectorXd c = fd_weights(y, m);
    double d = 0;
    for (int i = 0; i < 9; ++i) d += c[i] * std::exp(0.3 + y[i]);
    CHECK(d == doctest::Approx(std::exp(0.3)).epsilon(1e-8));
  }
}
