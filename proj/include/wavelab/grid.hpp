#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wavelab {

using Index = Eigen::Index;
using cplx = std::complex<double>;

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// Japanese bracket <r> = sqrt(1 + r^2).
inline double jbracket(double r) { return std::sqrt(1.0 + r * r); }

// Uniform periodic grid on [-L, L)^3, x_i = -L + i h.
struct Grid3 {
  int n = 0;
  double L = 0.0;
  double h = 0.0;

  Index size() const { return Index(n) * n * n; }
  double cell_volume() const { return h * h * h; }
  double nyquist() const { return pi / h; }
  double dk() const { return pi / L; }

  Index index(int i, int j, int k) const { return (Index(i) * n + j) * n + k; }
  double coord(int i) const { return -L + i * h; }
  Eigen::Vector3d point(Index idx) const {
    const int k = int(idx % n);
    const int j = int((idx / n) % n);
    const int i = int(idx / (Index(n) * n));
    return {coord(i), coord(j), coord(k)};
  }
  // Signed frequency index m' in {-n/2, ..., n/2-1} for FFT slot m.
  int signed_mode(int m) const { return m < n / 2 ? m : m - n; }
  Eigen::Vector3d wavevector(Index idx) const {
    const int k = int(idx % n);
    const int j = int((idx / n) % n);
    const int i = int(idx / (Index(n) * n));
    return dk() * Eigen::Vector3d(signed_mode(i), signed_mode(j), signed_mode(k));
  }

  bool operator==(const Grid3& o) const { return n == o.n && L == o.L; }
};

Grid3 make_grid(int n, double L);

// Samples of a scalar function on a Grid3.
template <typename Scalar>
struct Field {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid3 grid;
  Vector values;

  Field() = default;
  explicit Field(const Grid3& g) : grid(g), values(Vector::Zero(g.size())) {}
  Field(const Grid3& g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("Field: value count does not match grid");
  }

  Index size() const { return values.size(); }
  Scalar& operator[](Index i) { return values[i]; }
  const Scalar& operator[](Index i) const { return values[i]; }

  bool all_finite() const { return values.allFinite(); }
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

template <typename Scalar, typename Fn>
Field<Scalar> sample(const Grid3& g, Fn&& f) {
  Field<Scalar> out(g);
  for (Index idx = 0; idx < g.size(); ++idx) out[idx] = Scalar(f(g.point(idx)));
  return out;
}

inline ComplexField to_complex(const RealField& f) {
  return ComplexField(f.grid, f.values.template cast<cplx>());
}

template <typename Scalar>
Field<Scalar> operator+(const Field<Scalar>& a, const Field<Scalar>& b) {
  return Field<Scalar>(a.grid, a.values + b.values);
}
template <typename Scalar>
Field<Scalar> operator-(const Field<Scalar>& a, const Field<Scalar>& b) {
  return Field<Scalar>(a.grid, a.values - b.values);
}
template <typename Scalar, typename T>
Field<Scalar> operator*(T c, const Field<Scalar>& a) {
  return Field<Scalar>(a.grid, Scalar(c) * a.values);
}

// Pointwise product with a real field (e.g. multiplication by V).
template <typename Scalar>
Field<Scalar> multiply(const RealField& w, const Field<Scalar>& f) {
  return Field<Scalar>(f.grid, w.values.template cast<Scalar>().cwiseProduct(f.values));
}

// Grid inner product h^3 sum conj(a) b.
inline cplx inner(const ComplexField& a, const ComplexField& b) {
  return a.grid.cell_volume() * a.values.dot(b.values);
}

// (h^3 sum |psi|^p)^(1/p), grid max for p = inf.
template <typename Scalar>
double lp_norm(const Field<Scalar>& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  const Eigen::ArrayXd a = f.values.cwiseAbs().array();
  if (p == 1.0) return f.grid.cell_volume() * a.sum();
  if (p == 2.0) return std::sqrt(f.grid.cell_volume() * a.square().sum());
  return std::pow(f.grid.cell_volume() * a.pow(p).sum(), 1.0 / p);
}

// lp_norm of <x>^delta f.
template <typename Scalar>
double weighted_lp_norm(const Field<Scalar>& f, double p, double delta) {
  if (delta == 0.0) return lp_norm(f, p);
  Field<Scalar> w(f.grid);
  for (Index idx = 0; idx < f.size(); ++idx)
    w[idx] = std::pow(jbracket(f.grid.point(idx).norm()), delta) * f[idx];
  return lp_norm(w, p);
}

// Smooth cutoff beta with beta = 0 below 1/2 and 1 above 1, scaled by M.
struct CutoffProfile {
  double M = 1.0;

  // sigma(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) on (0, 1).
  static double smoothstep(double s);
  static double profile(double lambda) { return smoothstep(2.0 * lambda - 1.0); }

  double high(double t) const { return profile(t / M); }       // beta(t > M)
  double low(double t) const { return 1.0 - profile(t / M); }  // beta(t <= M)
};

}  // namespace wavelab
