#include "wavelab/free_resolvent.hpp"

#include "wavelab/fft.hpp"

#include <vector>

namespace wavelab {

cplx free_resolvent_kernel(double q, double r, BoundaryValue s) {
  if (!(r > 0.0)) throw std::invalid_argument("free_resolvent_kernel: r must be positive");
  return std::exp(cplx(0.0, kernel_sign(s) * q * r)) / (4.0 * pi * r);
}

namespace {

// int_0^R e^{i s r} dr
cplx segment_exp(double s, double R) {
  const double t = 0.5 * s * R;
  const double sinc = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return R * std::exp(cplx(0.0, t)) * sinc;
}

// int_0^R r e^{i kappa r} dr
cplx ramp_exp(double kappa, double R) {
  const double x = kappa * R;
  if (std::abs(x) < 1e-2) {
    cplx sum = 0.0, term = 1.0;
    for (int j = 0; j < 12; ++j) {
      sum += term / double(j + 2);
      term *= cplx(0.0, x) / double(j + 1);
    }
    return R * R * sum;
  }
  const cplx e = std::exp(cplx(0.0, x));
  return R * e / cplx(0.0, kappa) + (e - 1.0) / (kappa * kappa);
}

}  // namespace

cplx truncated_kernel_transform(double k, double kappa, double R) {
  // 4 pi int_0^R r^2 sinc(kr) e^{i kappa r}/(4 pi r) dr
  if (k == 0.0) return ramp_exp(kappa, R);
  return (segment_exp(kappa + k, R) - segment_exp(kappa - k, R)) / (cplx(0.0, 2.0) * k);
}

FreeResolvent::FreeResolvent(const Grid3& grid, double q, BoundaryValue s)
    : grid_(grid), q_(q), sign_(s) {
  if (!(q >= 0.0) || !std::isfinite(q))
    throw std::invalid_argument("FreeResolvent: q must be finite and >= 0");
  const int n = grid.n;
  const int B = 3 * n;  // period 6L >= 2L + R
  const double R = 2.0 * std::sqrt(3.0) * grid.L;
  const double kappa = kernel_sign(s) * q;
  const double dkB = 2.0 * pi / (B * grid.h);

  auto sgn = [&](int m) { return long(m < B / 2 ? m : m - B); };
  // the transform depends on |m|^2 only; evaluated once per occurring value
  const long max_m2 = 3L * (B / 2 + 1) * (B / 2 + 1);
  std::vector<cplx> by_shell(std::size_t(max_m2) + 1);
  std::vector<char> known(std::size_t(max_m2) + 1, 0);
  auto transform_at = [&](long m2) {
    if (!known[std::size_t(m2)]) {
      by_shell[std::size_t(m2)] = truncated_kernel_transform(dkB * std::sqrt(double(m2)), kappa, R);
      known[std::size_t(m2)] = 1;
    }
    return by_shell[std::size_t(m2)];
  };

  const Index BB = Index(B) * B * B;
  Eigen::VectorXcd big(BB);
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < B; ++j)
      for (int k = 0; k < B; ++k) {
        const long m2 = sgn(i) * sgn(i) + sgn(j) * sgn(j) + sgn(k) * sgn(k);
        big[(Index(i) * B + j) * B + k] = transform_at(m2);
      }
  fft_plan(B).inverse(big.data());
  big /= grid.cell_volume();

  const int N = 2 * n;
  kernel_.resize(Index(N) * N * N);
  auto from_big = [&](int d) { return d >= 0 ? d : d + B; };
  auto signed_pad = [&](int m) { return m < n ? m : m - N; };
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const int a = from_big(signed_pad(i)), b = from_big(signed_pad(j)),
                  c = from_big(signed_pad(k));
        kernel_[(Index(i) * N + j) * N + k] = big[(Index(a) * B + b) * B + c];
      }
  kernel_hat_ = kernel_;
  fft_plan(N).forward(kernel_hat_.data());
  kernel_hat_ *= grid.cell_volume();
}

Index FreeResolvent::wrap_index(int di, int dj, int dk) const {
  const int N = 2 * grid_.n;
  auto w = [&](int d) { return d >= 0 ? d : d + N; };
  return (Index(w(di)) * N + w(dj)) * N + w(dk);
}

cplx FreeResolvent::kernel(int di, int dj, int dk) const {
  return kernel_[wrap_index(di, dj, dk)];
}

ComplexField FreeResolvent::apply(const ComplexField& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("FreeResolvent::apply: grid mismatch");
  return padded_convolve(f, kernel_hat_);
}

ComplexField apply_free_resolvent(const ComplexField& f, double q, BoundaryValue s) {
  return FreeResolvent(f.grid, q, s).apply(f);
}

}  // namespace wavelab

namespace wavelab {

double helmholtz_residual(const ComplexField& f, const ComplexField& u, double q, double inner,
                          double plateau, double edge) {
  const Grid3& g = f.grid;
  auto window = [&](double t) {
    return 1.0 - CutoffProfile::smoothstep((std::abs(t) / g.L - plateau) / (edge - plateau));
  };
  ComplexField wu(g);
  for (Index idx = 0; idx < g.size(); ++idx) {
    const Eigen::Vector3d x = g.point(idx);
    wu[idx] = window(x[0]) * window(x[1]) * window(x[2]) * u[idx];
  }
  const ComplexField r = kinetic(wu) - (q * q) * wu;
  double num = 0.0, den = 0.0;
  for (Index idx = 0; idx < g.size(); ++idx) {
    if (g.point(idx).cwiseAbs().maxCoeff() > inner * g.L) continue;
    num += std::norm(r[idx] - f[idx]);
    den += std::norm(f[idx]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace wavelab
