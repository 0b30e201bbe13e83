#include "wavelab/bound_states.hpp"

#include "wavelab/fft.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

namespace wavelab {

ComplexField apply_hamiltonian(const Potential& V, const ComplexField& f) {
  return kinetic(f) + multiply(V.field, f);
}

namespace {

Eigen::MatrixXd apply_h(const Potential& V, const Eigen::MatrixXd& X) {
  const Grid3& g = V.grid();
  Eigen::MatrixXd Y(X.rows(), X.cols());
  for (Index c = 0; c < X.cols(); ++c) {
    const ComplexField f(g, X.col(c).cast<cplx>());
    Y.col(c) = apply_hamiltonian(V, f).values.real();
  }
  return Y;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  return qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), X.cols());
}

double outer_mass(const Grid3& g, const Eigen::VectorXd& v) {
  double out = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    if (g.point(i).cwiseAbs().maxCoeff() > 0.5 * g.L) out += v[i] * v[i];
  return out / v.squaredNorm();
}

}  // namespace

BoundStates compute_bound_states(const Potential& V, const EigenOptions& opt) {
  const Grid3& g = V.grid();
  BoundStates out;
  out.grid = g;
  const double vmin = V.field.values.minCoeff();
  if (vmin >= 0.0) return out;  // -Delta + V >= 0 has no negative spectrum

  const double upper = 3.0 * g.nyquist() * g.nyquist() + std::max(0.0, V.field.values.maxCoeff());
  const double cut = 0.5 * g.dk() * g.dk();  // below the first nonzero box level
  const double e = 0.5 * (upper - cut), c = 0.5 * (upper + cut);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  auto random_block = [&](Index cols) {
    Eigen::MatrixXd R(g.size(), cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < g.size(); ++i) R(i, j) = nd(rng);
    return R;
  };

  int b = opt.block;
  Eigen::MatrixXd X = orthonormalize(random_block(b));
  Eigen::VectorXd theta;
  Eigen::MatrixXd HX;
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it + 1;
    // Chebyshev filter damping [cut, upper].
    Eigen::MatrixXd Y0 = X, Y1 = (apply_h(V, X) - c * X) / e;
    for (int d = 2; d <= opt.degree; ++d) {
      Eigen::MatrixXd Y2 = 2.0 * (apply_h(V, Y1) - c * Y1) / e - Y0;
      Y0 = std::move(Y1);
      Y1 = std::move(Y2);
      const double s = Y1.cwiseAbs().maxCoeff();
      if (s > 1e100) {
        Y0 /= s;
        Y1 /= s;
      }
    }
    const Eigen::MatrixXd Q = orthonormalize(Y1);
    const Eigen::MatrixXd HQ = apply_h(V, Q);
    Eigen::MatrixXd S = Q.transpose() * HQ;
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    theta = es.eigenvalues();
    X = Q * es.eigenvectors();
    HX = HQ * es.eigenvectors();

    int below = 0;
    for (Index j = 0; j < b; ++j) below += theta[j] < cut;
    if (below >= b - 1) {
      Eigen::MatrixXd grown(g.size(), b + 4);
      grown << X, random_block(4);
      X = orthonormalize(grown);
      b += 4;
      continue;
    }
    bool ok = it >= 2;
    for (Index j = 0; j < b && ok; ++j) {
      if (theta[j] >= 0.0) break;
      if (outer_mass(g, X.col(j)) > opt.outer_fraction) continue;
      const double r = (HX.col(j) - theta[j] * X.col(j)).norm();
      ok = r <= opt.tol * std::max(1.0, std::abs(theta[j]));
    }
    if (ok) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("compute_bound_states: eigensolve did not converge in " +
                             std::to_string(opt.max_iter) + " iterations");

  const double scale = 1.0 / std::sqrt(g.cell_volume());
  for (Index j = 0; j < b; ++j) {
    if (theta[j] >= 0.0) break;
    const bool localized = outer_mass(g, X.col(j)) <= opt.outer_fraction;
    if (!localized) {
      out.discarded.push_back(theta[j]);
      continue;
    }
    if (theta[j] > -opt.eps_bs)
      throw std::runtime_error("compute_bound_states: localized eigenvalue " +
                               std::to_string(theta[j]) + " lies in the threshold window (-" +
                               std::to_string(opt.eps_bs) + ", 0)");
    out.energies.push_back(theta[j]);
    out.states.emplace_back(g, (scale * X.col(j)).cast<cplx>());
    out.residuals.push_back((HX.col(j) - theta[j] * X.col(j)).norm());
  }
  return out;
}

ComplexField ContinuousProjection::apply(const ComplexField& f) const {
  ComplexField out = f;
  for (const auto& phi : bound_.states) out.values -= inner(phi, f) * phi.values;
  return out;
}

ContinuousProjection continuous_projection(const Potential& V, const EigenOptions& opt) {
  return ContinuousProjection(compute_bound_states(V, opt));
}

}  // namespace wavelab
