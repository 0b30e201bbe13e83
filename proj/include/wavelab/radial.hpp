#pragma once

#include "wavelab/grid.hpp"

#include <functional>
#include <vector>

namespace wavelab {

// Sine discrete variable representation on (0, R) with Dirichlet ends:
// points r_j = j R / (N + 1), j = 1..N, basis sin(k pi r / R), k = 1..N.
struct SineDVR {
  double R = 0.0;
  int N = 0;
  Eigen::VectorXd r;
  Eigen::MatrixXd S;  // orthogonal sine transform sqrt(2/(N+1)) sin(pi j k / (N+1))
  Eigen::VectorXd k;  // k pi / R

  double dr() const { return R / (N + 1); }
  // -d^2/dr^2, exact on the span of the basis.
  Eigen::MatrixXd kinetic() const;
  // Sine-series coefficients a_k with f(r) = sum a_k sin(k pi r / R).
  Eigen::MatrixXcd coefficients(const Eigen::MatrixXcd& values) const;
  // Rows: evaluation points; columns: sin(k pi r / R).
  Eigen::MatrixXd basis_at(const Eigen::VectorXd& radii) const;
};

SineDVR make_sine_dvr(double R, double dr);

// -d^2/dr^2 + l(l+1)/r^2 + V(r) on the DVR points.
Eigen::MatrixXd radial_hamiltonian(const SineDVR& dvr, int l, const std::function<double(double)>& V);

// Y_lm(theta, phi) for 0 <= l <= lmax, stored at l*l + l + m (Condon-Shortley phase).
Eigen::VectorXcd spherical_harmonics(int lmax, double cos_theta, double phi);
inline Index harmonic_index(int l, int m) { return Index(l) * l + l + m; }

// u_lm(r) = r * int Y_lm^*(w) psi(r w) dw for the trigonometric interpolant of a
// field given by its lattice continuum transform, at the radii `radii`.
// Columns are harmonic_index(l, m); radii beyond `r_cut` give 0.
Eigen::MatrixXcd project_partial_waves(const ComplexField& psi_hat, int lmax,
                                       const Eigen::VectorXd& radii, double r_cut);

// sum_lm u_lm(|x|)/|x| Y_lm(x/|x|) on the grid, with u given on the DVR points.
// The l = 0 value at the origin uses the limit of u/r.
ComplexField reconstruct_partial_waves(const Grid3& grid, const SineDVR& dvr,
                                       const Eigen::MatrixXcd& u, int lmax);

}  // namespace wavelab
