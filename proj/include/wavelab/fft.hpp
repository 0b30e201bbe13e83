#pragma once

#include "wavelab/grid.hpp"

#include <functional>
#include <memory>

namespace wavelab {

// Cubic 3-D DFT of size N^3 on row-major data (last axis fastest).
// forward: unnormalized, kernel e^{-2 pi i m j / N}; inverse includes 1/N^3.
class Fft3 {
 public:
  explicit Fft3(int N);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  int size() const { return N_; }
  void forward(cplx* data);
  void inverse(cplx* data);

 private:
  void transform(cplx* data, bool inv);
  int N_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Per-thread cached transform for size N.
Fft3& fft_plan(int N);

ComplexField fft_forward(const ComplexField& f);
ComplexField fft_inverse(const ComplexField& f);

// Multiply the spectrum by m(|k|) on the grid's dual lattice.
ComplexField apply_radial_multiplier(const ComplexField& f,
                                     const std::function<cplx(double)>& m);

// Spectral multiplier beta(|k| <= M); rejects M >= Nyquist.
ComplexField lowpass_filter(const ComplexField& f, const CutoffProfile& cutoff);

// -Laplacian by spectral differentiation.
ComplexField kinetic(const ComplexField& f);

// Samples of the continuum transform  h^3 sum_x e^{-i k.x} f(x)  on the dual
// lattice (slot layout as the FFT), and its inverse (1/(2L)^3) sum_k e^{ik.x}.
ComplexField continuum_transform(const ComplexField& f);
ComplexField inverse_continuum_transform(const ComplexField& fhat);

// f placed in the centred box of `factor` times the half-width at the same
// spacing, zero outside; crop_centre takes the inner block back out.
ComplexField zero_pad(const ComplexField& f, int factor);
ComplexField crop_centre(const ComplexField& f, const Grid3& inner);

// h^3 sum_y k(x - y) f(y) over the box, without wrap-around; k is sampled at
// lattice displacements on a (2n)^3 padded lattice.
class AperiodicConvolution {
 public:
  AperiodicConvolution(const Grid3& grid, const std::function<cplx(const Eigen::Vector3d&)>& k);

  ComplexField apply(const ComplexField& f) const;
  // h^3 DFT of the kernel on the padded lattice
  const Eigen::VectorXcd& kernel_hat() const { return kernel_hat_; }

 private:
  Grid3 grid_;
  Eigen::VectorXcd kernel_hat_;
};

// Building blocks of the padded convolution: the (2n)^3 DFT of f placed in
// the corner block, and the corner block of the inverse DFT of `spec`.
// padded_convolve(f, kh) = padded_idft(kh .* padded_dft(f)).
Eigen::VectorXcd padded_dft(const ComplexField& f);
ComplexField padded_idft(const Eigen::VectorXcd& spec, const Grid3& grid);
ComplexField padded_convolve(const ComplexField& f, const Eigen::VectorXcd& kernel_hat);

// max |f| within `layers` cells of the box boundary divided by max |f|.
double boundary_ratio(const ComplexField& f, int layers = 2);

}  // namespace wavelab
