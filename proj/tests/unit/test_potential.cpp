#include "helpers.hpp"
#include "wavelab/potential.hpp"

#include <doctest.h>

using namespace wavelab;
using namespace wavelab::testing;

TEST_CASE("sample_potential closed forms") {
  const Grid3 g = make_grid(32, 8.0);  // h = 0.5
  const Potential V = sample_potential(PotentialFamily::gaussian, -1.0, 1.0, g);
  CHECK(V.field[g.index(16, 16, 16)] == doctest::Approx(-1.0));
  CHECK(V(std::sqrt(2.0)) == doctest::Approx(-std::exp(-1.0)));
  CHECK(V.field[g.index(18, 18, 16)] == doctest::Approx(-std::exp(-1.0)));  // |x| = sqrt 2
  const Potential B = sample_potential(PotentialFamily::compact_bump, 1.0, 2.0, g);
  CHECK(B(6.0) == 0.0);
  CHECK(B(0.0) == doctest::Approx(1.0));
  for (Index i = 0; i < g.size(); ++i)
    if (g.point(i).norm() >= B.support_radius()) CHECK(B.field[i] == 0.0);
  const Potential Y = sample_potential(PotentialFamily::yukawa_regularized, 0.7, 1.5, g);
  CHECK(Y(0.0) == doctest::Approx(0.7));
  CHECK(Y(10.0) == doctest::Approx(0.7 * 1.5 * std::exp(-(std::sqrt(102.25) - 1.5) / 1.5) /
                                   std::sqrt(102.25)));
}

TEST_CASE("sample_potential errors") {
  const Grid3 g = make_grid(16, 8.0);
  CHECK_THROWS_AS(parse_family("coulomb"), std::invalid_argument);
  CHECK_THROWS_AS(sample_potential(PotentialFamily::gaussian, 1.0, 0.5, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_potential(PotentialFamily::gaussian, 1.0, 0.0, g), std::invalid_argument);
  CHECK(parse_family("compact-bump") == PotentialFamily::compact_bump);
}

TEST_CASE("cell averages of 1/|u| and 1/|u|^2 over the unit cube") {
  // Divergence theorem: Delta(r/2) = 1/r and Delta(log r) = 1/r^2, so both
  // volume integrals reduce to smooth face integrals.
  auto face = [](auto g) {
    return 6 * integrate_gl([&](double u) {
      return integrate_gl([&](double v) { return g(0.25 + u * u + v * v); }, -0.5, 0.5, 4, 20);
    }, -0.5, 0.5, 4, 20);
  };
  const double c1 = face([](double s) { return 0.5 * 0.5 / std::sqrt(s); });
  const double c2 = face([](double s) { return 0.5 / s; });
  CHECK(std::abs(c1 - cube_inv_dist) < 1e-12);
  CHECK(std::abs(c2 - cube_inv_dist_sq) < 1e-12);
}

TEST_CASE("kato norm trivial cases") {
  const Grid3 g = make_grid(16, 8.0);
  const Potential Z = sample_potential(PotentialFamily::gaussian, 0.0, 1.0, g);
  CHECK(kato_norm(Z, 0) == 0.0);
  RealField cell(g);
  cell[g.index(8, 8, 8)] = 1.0;
  CHECK(kato_norm(cell, 0) == doctest::Approx(cube_inv_dist * g.h * g.h));
  CHECK_THROWS_AS(kato_norm(sample_potential(PotentialFamily::gaussian, 1, 1, make_grid(8, 4)).field, 0),
                  std::invalid_argument);
}

TEST_CASE("kato norm of a Gaussian matches a radial-angular quadrature") {
  const Grid3 g = make_grid(128, 6.0);
  const Potential V = sample_potential(PotentialFamily::gaussian, 1.0, 1.0, g);
  // Oracle: sup over sampled |x| <= 4 of int V(|x + k w|) k dk dw.
  auto at = [&](double xr) {
    return integrate_gl([&](double k) {
      return 2 * pi * k * integrate_gl([&](double c) {
        return V(std::sqrt(xr * xr + k * k + 2 * xr * k * c));
      }, -1, 1, 4, 16);
    }, 0, 12, 24, 16);
  };
  double oracle = 0;
  for (double xr : {0.0, 0.25, 1.0, 2.0, 4.0}) oracle = std::max(oracle, at(xr));
  CHECK(oracle == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(std::abs(kato_norm(V, 0) / oracle - 1) < 1e-3);
}

TEST_CASE("kato norm linearity and monotonicity") {
  const Grid3 g = make_grid(32, 16.0);
  for (auto fam : {PotentialFamily::gaussian, PotentialFamily::yukawa_regularized,
                   PotentialFamily::compact_bump}) {
    const Potential V = sample_potential(fam, -0.5, 1.0, g);
    const Potential W = sample_potential(fam, 1.5, 1.0, g);
    CHECK(kato_norm(W, 2) == doctest::Approx(3 * kato_norm(V, 2)).epsilon(1e-12));
    double prev = 0;
    for (double d : {0.0, 1.0, 2.5, 5.0}) {
      const double k = kato_norm(V, d);
      CHECK(std::isfinite(k));
      CHECK(k >= prev);
      prev = k;
      CHECK(std::isfinite(l1_weighted_norm(V, d)));
      CHECK(std::isfinite(linf_weighted_norm(V, 2 * d)));
    }
    CHECK(V.linf_2delta == doctest::Approx(linf_weighted_norm(V, 10.0)));
  }
}
