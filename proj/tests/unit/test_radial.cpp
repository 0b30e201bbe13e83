#include <doctest.h>

#include "helpers.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/radial.hpp"

#include <Eigen/Eigenvalues>

using namespace wavelab;

TEST_CASE("sine DVR kinetic spectrum is exact") {
  const SineDVR d = make_sine_dvr(10.0, 0.25);
  CHECK(d.N == 39);
  CHECK(d.dr() == doctest::Approx(0.25));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.kinetic());
  for (int j = 0; j < d.N; ++j) {
    const double exact = std::pow((j + 1) * pi / 10.0, 2);
    CHECK(std::abs(es.eigenvalues()[j] - exact) <= 1e-10 * exact);
  }
  CHECK_THROWS_AS(make_sine_dvr(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("radial oscillator levels") {
  // -u'' + l(l+1)/r^2 u + r^2 u: E = 4 n + 2 l + 3
  const SineDVR d = make_sine_dvr(12.0, 0.1);
  for (int l : {0, 1, 3}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(radial_hamiltonian(d, l, [](double r) { return r * r; }));
    for (int n = 0; n < 3; ++n) CHECK(es.eigenvalues()[n] == doctest::Approx(4 * n + 2 * l + 3).epsilon(1e-4));
  }
}

TEST_CASE("sine coefficients interpolate between points") {
  const SineDVR d = make_sine_dvr(8.0, 0.2);
  auto f = [](double r) { return r * std::exp(-r * r); };
  Eigen::MatrixXcd v(d.N, 1);
  for (int j = 0; j < d.N; ++j) v(j, 0) = f(d.r[j]);
  const Eigen::MatrixXcd a = d.coefficients(v);
  Eigen::VectorXd probe(4);
  probe << 0.05, 0.77, 1.31, 3.0;
  const Eigen::MatrixXcd at = d.basis_at(probe).cast<cplx>() * a;
  for (int i = 0; i < 4; ++i) CHECK(std::abs(at(i, 0) - f(probe[i])) < 1e-10);
  // f'(0) = 1
  CHECK(std::abs((d.k.cast<cplx>().transpose() * a.col(0))(0) - 1.0) < 1e-9);
}

TEST_CASE("spherical harmonics match the standard library and are orthonormal") {
  const double th = 0.83, ph = -1.1;
  const Eigen::VectorXcd Y = spherical_harmonics(8, std::cos(th), ph);
  for (int l = 0; l <= 8; ++l)
    for (int m = 0; m <= l; ++m) {
      const cplx ref = std::sph_legendre(unsigned(l), unsigned(m), th) * std::exp(cplx(0.0, m * ph));
      CHECK(std::abs(Y[harmonic_index(l, m)] - ref) < 1e-12);
    }
  // Gauss-Legendre in cos(theta) times trapezoid in phi
  const auto gl = wavelab::testing::gauss_legendre_oracle(12, -1.0, 1.0);
  const int nphi = 24;
  const Index nh = 36;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(nh, nh);
  for (int i = 0; i < 12; ++i)
    for (int k = 0; k < nphi; ++k) {
      const Eigen::VectorXcd y = spherical_harmonics(5, gl.x[i], 2.0 * pi * k / nphi);
      G += (gl.w[i] * 2.0 * pi / nphi) * y.conjugate() * y.transpose();
    }
  CHECK((G - Eigen::MatrixXcd::Identity(nh, nh)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial-wave projection and reconstruction round trip") {
  const Grid3 g = make_grid(32, 16.0);
  const ComplexField psi = sample<cplx>(g, [](const Eigen::Vector3d& x) {
    const Eigen::Vector3d c(1.0, 0.5, -0.5);
    return std::exp(-(x - c).squaredNorm() / 8.0) * std::exp(cplx(0.0, 0.3 * x[0]));
  });
  const SineDVR d = make_sine_dvr(30.0, 0.25);
  const int lmax = 20;
  const Eigen::MatrixXcd u = project_partial_waves(continuum_transform(psi), lmax, d.r, g.L);
  const ComplexField back = reconstruct_partial_waves(g, d, u, lmax);
  double worst = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    if (g.point(i).norm() < 0.75 * g.L) worst = std::max(worst, std::abs(back[i] - psi[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("projection of a centred Gaussian is pure s-wave") {
  const Grid3 g = make_grid(32, 16.0);
  const ComplexField psi = wavelab::testing::gaussian_field(g, 2.0);
  Eigen::VectorXd radii(3);
  radii << 0.5, 2.0, 4.0;
  const Eigen::MatrixXcd u = project_partial_waves(continuum_transform(psi), 4, radii, g.L);
  for (int i = 0; i < 3; ++i) {
    const double r = radii[i];
    CHECK(std::abs(u(i, 0) - std::sqrt(4.0 * pi) * r * std::exp(-r * r / 8.0)) < 1e-8);
    CHECK(u.row(i).tail(24).cwiseAbs().maxCoeff() < 1e-8);
  }
}
