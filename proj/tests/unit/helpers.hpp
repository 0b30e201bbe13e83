#pragma once

#include "wavelab/grid.hpp"

#include <random>

namespace wavelab::testing {

inline ComplexField random_field(const Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexField f(g);
  for (Index i = 0; i < g.size(); ++i) f[i] = cplx(nd(rng), nd(rng));
  return f;
}

inline ComplexField gaussian_field(const Grid3& g, double s, const Eigen::Vector3d& c = {0, 0, 0}) {
  return sample<cplx>(g, [&](const Eigen::Vector3d& x) {
    return std::exp(-(x - c).squaredNorm() / (2 * s * s));
  });
}

inline double rel_diff(const ComplexField& a, const ComplexField& b) {
  return (a.values - b.values).norm() / std::max(b.values.norm(), 1e-300);
}

}  // namespace wavelab::testing

#include <Eigen/Eigenvalues>

namespace wavelab::testing {

// Gauss-Legendre nodes/weights on [a, b] by Golub-Welsch (test-side oracle).
struct GLRule {
  Eigen::VectorXd x, w;
};
inline GLRule gauss_legendre_oracle(int n, double a, double b) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GLRule r{(0.5 * (b - a)) * (es.eigenvalues().array() + 1.0).matrix() +
               Eigen::VectorXd::Constant(n, a),
           (b - a) * es.eigenvectors().row(0).transpose().array().square().matrix()};
  return r;
}

// Composite GL on [a, b] with `panels` panels of `order` points.
template <typename Fn>
auto integrate_gl(Fn&& f, double a, double b, int panels = 64, int order = 20) {
  using R = decltype(f(a));
  R s{};
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    const GLRule r = gauss_legendre_oracle(order, lo, hi);
    for (int i = 0; i < order; ++i) s += r.w[i] * f(r.x[i]);
  }
  return s;
}

}  // namespace wavelab::testing
