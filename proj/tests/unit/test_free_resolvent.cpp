#include "helpers.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/free_resolvent.hpp"

#include <doctest.h>

using namespace wavelab;
using namespace wavelab::testing;

TEST_CASE("free resolvent kernel values") {
  CHECK(std::abs(free_resolvent_kernel(0, 1, BoundaryValue::minus) - 1 / (4 * pi)) < 1e-15);
  CHECK(std::abs(free_resolvent_kernel(pi, 1, BoundaryValue::minus) + 1 / (4 * pi)) < 1e-15);
  const cplx a = free_resolvent_kernel(0.7, 2.3, BoundaryValue::minus);
  CHECK(std::abs(a - std::conj(free_resolvent_kernel(0.7, 2.3, BoundaryValue::plus))) < 1e-16);
  CHECK(std::arg(a) == doctest::Approx(-0.7 * 2.3));
  CHECK_THROWS_AS(free_resolvent_kernel(1, 0, BoundaryValue::minus), std::invalid_argument);
}

TEST_CASE("truncated kernel transform matches radial quadrature") {
  const double R = 20;
  for (double kappa : {0.0, -1.0, 2.0})
    for (double k : {0.0, 1e-3, 0.3, 1.0, 2.5}) {
      const cplx oracle = integrate_gl([&](double r) {
        const double s = k == 0 ? r : std::sin(k * r) / k;
        return s * std::exp(cplx(0, kappa * r));
      }, 0, R, 64, 20);
      CHECK(std::abs(truncated_kernel_transform(k, kappa, R) - oracle) < 1e-10 * (1 + std::abs(oracle)));
    }
}

TEST_CASE("zero input gives zero output") {
  const Grid3 g = make_grid(16, 8.0);
  CHECK(apply_free_resolvent(ComplexField(g), 1.0, BoundaryValue::minus).values.norm() == 0.0);
}

TEST_CASE("Newtonian potential of a Gaussian") {
  const Grid3 g = make_grid(32, 8.0);
  const double s = 1.0;
  const ComplexField u = apply_free_resolvent(gaussian_field(g, s), 0.0, BoundaryValue::minus);
  double err = 0, peak = 0;
  for (Index i = 0; i < g.size(); ++i) {
    const double r = g.point(i).norm();
    const double pref = std::pow(2 * pi * s * s, 1.5) / (4 * pi);
    const double exact = r > 0 ? pref * std::erf(r / (std::sqrt(2.0) * s)) / r
                               : pref * std::sqrt(2 / pi) / s;
    err = std::max(err, std::abs(u[i] - exact));
    peak = std::max(peak, exact);
  }
  CHECK(err / peak < 1e-4);
}

TEST_CASE("Helmholtz residual on 64^3") {
  const Grid3 g = make_grid(64, 12.0);
  const ComplexField f = gaussian_field(g, 1.0);
  for (double q : {0.0, 1.0, 2.0}) {
    const ComplexField u = apply_free_resolvent(f, q, BoundaryValue::minus);
    CHECK(helmholtz_residual(f, u, q) <= 1e-3);
  }
}

TEST_CASE("outgoing and incoming resolvents are conjugate on real data") {
  const Grid3 g = make_grid(16, 8.0);
  const ComplexField f = gaussian_field(g, 1.5, {0.5, -1, 0});
  const ComplexField a = apply_free_resolvent(f, 0.8, BoundaryValue::minus);
  const ComplexField b = apply_free_resolvent(f, 0.8, BoundaryValue::plus);
  CHECK((a.values - b.values.conjugate()).norm() <= 1e-10 * a.values.norm());
}

TEST_CASE("kernel samples approach the point kernel away from the origin") {
  const Grid3 g = make_grid(32, 16.0);
  const FreeResolvent R(g, 0.5, BoundaryValue::minus);
  for (int d : {6, 10, 14}) {
    const cplx exact = free_resolvent_kernel(0.5, d * g.h, BoundaryValue::minus);
    CHECK(std::abs(R.kernel(d, 0, 0) - exact) < 2e-2 * std::abs(exact));
  }
}
