#include "wavelab/fft.hpp"

#include <unsupported/Eigen/FFT>

#ifdef EIGEN_FFTW_DEFAULT
#include <fftw3.h>
#endif

#include <algorithm>
#include <map>
#include <vector>

namespace wavelab {

// With FFTW present the whole cube goes through one in-place 3-D plan;
// otherwise Eigen's 1-D transform runs along each axis.
struct Fft3::Impl {
  Eigen::FFT<double> fft;
  std::vector<cplx> in, out;
#ifdef EIGEN_FFTW_DEFAULT
  fftw_plan fwd = nullptr, inv = nullptr;
  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
#endif
};

Fft3::Fft3(int N) : N_(N), impl_(std::make_unique<Impl>()) {
  if (N < 1) throw std::invalid_argument("Fft3: size must be positive");
#ifdef EIGEN_FFTW_DEFAULT
  const std::size_t total = std::size_t(N) * N * N;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (!buf) throw std::bad_alloc();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->fwd = fftw_plan_dft_3d(N, N, N, buf, buf, FFTW_FORWARD, flags);
  impl_->inv = fftw_plan_dft_3d(N, N, N, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!impl_->fwd || !impl_->inv) throw std::runtime_error("Fft3: FFTW planning failed");
#else
  impl_->fft.SetFlag(Eigen::FFT<double>::Unscaled);
  impl_->in.resize(N);
  impl_->out.resize(N);
#endif
}

Fft3::~Fft3() = default;

void Fft3::transform(cplx* data, bool inv) {
#ifdef EIGEN_FFTW_DEFAULT
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(inv ? impl_->inv : impl_->fwd, d, d);
#else
  const Index N = N_;
  auto& fft = impl_->fft;
  cplx* in = impl_->in.data();
  cplx* out = impl_->out.data();
  auto line = [&](cplx* base, Index stride) {
    for (Index t = 0; t < N; ++t) in[t] = base[t * stride];
    if (inv)
      fft.inv(out, in, N);
    else
      fft.fwd(out, in, N);
    for (Index t = 0; t < N; ++t) base[t * stride] = out[t];
  };
  for (Index a = 0; a < N * N; ++a) line(data + a * N, 1);
  for (Index i = 0; i < N; ++i)
    for (Index k = 0; k < N; ++k) line(data + i * N * N + k, N);
  for (Index a = 0; a < N * N; ++a) line(data + a, N * N);
#endif
}

void Fft3::forward(cplx* data) { transform(data, false); }

void Fft3::inverse(cplx* data) {
  transform(data, true);
  const double s = 1.0 / (double(N_) * N_ * N_);
  const Index total = Index(N_) * N_ * N_;
  for (Index i = 0; i < total; ++i) data[i] *= s;
}

Fft3& fft_plan(int N) {
  thread_local std::map<int, std::unique_ptr<Fft3>> cache;
  auto& p = cache[N];
  if (!p) p = std::make_unique<Fft3>(N);
  return *p;
}

ComplexField fft_forward(const ComplexField& f) {
  ComplexField out = f;
  fft_plan(f.grid.n).forward(out.values.data());
  return out;
}

ComplexField fft_inverse(const ComplexField& f) {
  ComplexField out = f;
  fft_plan(f.grid.n).inverse(out.values.data());
  return out;
}

ComplexField apply_radial_multiplier(const ComplexField& f,
                                     const std::function<cplx(double)>& m) {
  ComplexField s = fft_forward(f);
  for (Index idx = 0; idx < s.size(); ++idx) s[idx] *= m(f.grid.wavevector(idx).norm());
  return fft_inverse(s);
}

ComplexField lowpass_filter(const ComplexField& f, const CutoffProfile& cutoff) {
  if (!(cutoff.M > 0.0)) throw std::invalid_argument("lowpass_filter: M must be positive");
  if (cutoff.M >= f.grid.nyquist())
    throw std::invalid_argument("lowpass_filter: M = " + std::to_string(cutoff.M) +
                                " is not below the grid Nyquist frequency " +
                                std::to_string(f.grid.nyquist()));
  return apply_radial_multiplier(f, [&](double k) { return cplx(cutoff.low(k)); });
}

ComplexField kinetic(const ComplexField& f) {
  return apply_radial_multiplier(f, [](double k) { return cplx(k * k); });
}

namespace {
// e^{-i k x_0} with x_0 = -L per axis: (-1)^{m'} per axis.
double origin_phase(const Grid3& g, Index idx) {
  const int n = g.n;
  const int k = int(idx % n), j = int((idx / n) % n), i = int(idx / (Index(n) * n));
  const int s = g.signed_mode(i) + g.signed_mode(j) + g.signed_mode(k);
  return (s % 2 == 0) ? 1.0 : -1.0;
}
}  // namespace

ComplexField continuum_transform(const ComplexField& f) {
  ComplexField s = fft_forward(f);
  const double h3 = f.grid.cell_volume();
  for (Index idx = 0; idx < s.size(); ++idx) s[idx] *= h3 * origin_phase(f.grid, idx);
  return s;
}

ComplexField inverse_continuum_transform(const ComplexField& fhat) {
  ComplexField s = fhat;
  const double h3 = fhat.grid.cell_volume();
  for (Index idx = 0; idx < s.size(); ++idx) s[idx] *= origin_phase(fhat.grid, idx) / h3;
  return fft_inverse(s);
}

ComplexField zero_pad(const ComplexField& f, int factor) {
  if (factor == 1) return f;
  if (factor < 1) throw std::invalid_argument("zero_pad: factor must be >= 1");
  const Grid3& g = f.grid;
  ComplexField out(make_grid(factor * g.n, factor * g.L));
  const int o = (factor - 1) * g.n / 2;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) out[out.grid.index(i + o, j + o, k + o)] = f[g.index(i, j, k)];
  return out;
}

ComplexField crop_centre(const ComplexField& f, const Grid3& inner) {
  if (f.grid == inner) return f;
  const int o = (f.grid.n - inner.n) / 2;
  if (o < 0 || std::abs(f.grid.h - inner.h) > 1e-12 * inner.h)
    throw std::invalid_argument("crop_centre: grids are not nested at equal spacing");
  ComplexField out(inner);
  for (int i = 0; i < inner.n; ++i)
    for (int j = 0; j < inner.n; ++j)
      for (int k = 0; k < inner.n; ++k) out[inner.index(i, j, k)] = f[f.grid.index(i + o, j + o, k + o)];
  return out;
}

double boundary_ratio(const ComplexField& f, int layers) {
  const int n = f.grid.n;
  double peak = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double a = std::abs(f[f.grid.index(i, j, k)]);
        peak = std::max(peak, a);
        auto near = [&](int c) { return c < layers || c >= n - layers; };
        if (near(i) || near(j) || near(k)) edge = std::max(edge, a);
      }
  return peak > 0.0 ? edge / peak : 0.0;
}

AperiodicConvolution::AperiodicConvolution(
    const Grid3& grid, const std::function<cplx(const Eigen::Vector3d&)>& k)
    : grid_(grid) {
  const int n = grid.n, N = 2 * n;
  auto sgn = [&](int m) { return m < n ? m : m - N; };
  kernel_hat_.resize(Index(N) * N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l)
        kernel_hat_[(Index(i) * N + j) * N + l] =
            k(grid.h * Eigen::Vector3d(sgn(i), sgn(j), sgn(l)));
  fft_plan(N).forward(kernel_hat_.data());
  kernel_hat_ *= grid.cell_volume();
}

ComplexField AperiodicConvolution::apply(const ComplexField& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("AperiodicConvolution: grid mismatch");
  return padded_convolve(f, kernel_hat_);
}

namespace {

// reused between calls; fresh 2n-cubed buffers cost more in page faults than the FFT
Eigen::VectorXcd& padded_scratch(Index size) {
  thread_local Eigen::VectorXcd s;
  if (s.size() != size) s.resize(size);
  return s;
}

void pad_into(const ComplexField& f, Eigen::VectorXcd& pad) {
  const int n = f.grid.n, N = 2 * n;
  pad.setZero(Index(N) * N * N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      std::copy_n(f.values.data() + f.grid.index(i, j, 0), n, pad.data() + (Index(i) * N + j) * N);
}

ComplexField crop_from(const Eigen::VectorXcd& pad, const Grid3& g) {
  const int n = g.n, N = 2 * n;
  ComplexField out(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      std::copy_n(pad.data() + (Index(i) * N + j) * N, n, out.values.data() + g.index(i, j, 0));
  return out;
}

}  // namespace

Eigen::VectorXcd padded_dft(const ComplexField& f) {
  Eigen::VectorXcd pad;
  pad_into(f, pad);
  fft_plan(2 * f.grid.n).forward(pad.data());
  return pad;
}

ComplexField padded_idft(const Eigen::VectorXcd& spec, const Grid3& grid) {
  const int N = 2 * grid.n;
  if (spec.size() != Index(N) * N * N) throw std::invalid_argument("padded_idft: size mismatch");
  Eigen::VectorXcd& pad = padded_scratch(spec.size());
  pad = spec;
  fft_plan(N).inverse(pad.data());
  return crop_from(pad, grid);
}

ComplexField padded_convolve(const ComplexField& f, const Eigen::VectorXcd& kernel_hat) {
  const int N = 2 * f.grid.n;
  if (kernel_hat.size() != Index(N) * N * N) throw std::invalid_argument("padded_convolve: size mismatch");
  Eigen::VectorXcd& pad = padded_scratch(kernel_hat.size());
  pad_into(f, pad);
  Fft3& fft = fft_plan(N);
  fft.forward(pad.data());
  pad.array() *= kernel_hat.array();
  fft.inverse(pad.data());
  return crop_from(pad, f.grid);
}

}  // namespace wavelab
