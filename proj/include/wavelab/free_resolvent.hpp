#pragma once

#include "wavelab/grid.hpp"

namespace wavelab {

// Boundary value of the resolvent on the real axis: R(q^2 -+ i0).
enum class BoundaryValue { minus, plus };

inline double kernel_sign(BoundaryValue s) { return s == BoundaryValue::minus ? -1.0 : 1.0; }

// e^{-+ i q r} / (4 pi r); throws for r <= 0.
cplx free_resolvent_kernel(double q, double r, BoundaryValue s);

// Fourier transform of e^{i kappa r}/(4 pi r) truncated to r < R, at |k| = k.
cplx truncated_kernel_transform(double k, double kappa, double R);

// Free-space convolution with the outgoing/incoming Helmholtz kernel on a box.
// The kernel is truncated beyond the box diameter so its transform is smooth;
// sampled on an oversampled lattice, it gives exact aperiodic convolutions for
// band-limited data.
class FreeResolvent {
 public:
  FreeResolvent(const Grid3& grid, double q, BoundaryValue s);

  const Grid3& grid() const { return grid_; }
  double q() const { return q_; }
  BoundaryValue sign() const { return sign_; }

  ComplexField apply(const ComplexField& f) const;
  // Band-limited kernel at lattice displacement (di, dj, dk) h, |d*| < n.
  cplx kernel(int di, int dj, int dk) const;
  // h^3 DFT of the kernel on the (2n)^3 padded lattice
  const Eigen::VectorXcd& kernel_hat() const { return kernel_hat_; }

 private:
  Index wrap_index(int di, int dj, int dk) const;

  Grid3 grid_;
  double q_;
  BoundaryValue sign_;
  Eigen::VectorXcd kernel_;      // on the (2n)^3 wrap-around lattice
  Eigen::VectorXcd kernel_hat_;  // h^3 * DFT(kernel_)
};

ComplexField apply_free_resolvent(const ComplexField& f, double q, BoundaryValue s);

}  // namespace wavelab

namespace wavelab {

// Relative residual ||(-Delta - q^2) u - f||_2 / ||f||_2 over the cube
// |x|_inf <= inner*L, where u = R0 f.  The Laplacian is taken spectrally after
// multiplying u by a smooth window equal to 1 on |x|_inf <= plateau*L.
double helmholtz_residual(const ComplexField& f, const ComplexField& u, double q,
                          double inner = 0.45, double plateau = 0.55, double edge = 0.9);

}  // namespace wavelab
