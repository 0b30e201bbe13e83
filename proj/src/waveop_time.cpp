#include "wavelab/fft.hpp"
#include "wavelab/waveop.hpp"

#include <Eigen/Eigenvalues>

namespace wavelab {

TimeLimitWaveOperator::TimeLimitWaveOperator(const Potential& V, double M,
                                             std::shared_ptr<const ContinuousProjection> pc,
                                             const TimeLimitOptions& opt)
    : WaveOperatorRoute(V, M, std::move(pc)),
      family_(V.family),
      coupling_(V.coupling),
      width_(V.width),
      opt_(opt) {
  if (!(opt.T > 0.0)) throw std::invalid_argument("time-limit route: T must be positive");
  if (!(opt.eps_factor >= 0.0)) throw std::invalid_argument("time-limit route: damping must be >= 0");
  if (opt.spectral_pad < 1) throw std::invalid_argument("time-limit route: spectral_pad must be >= 1");
  if (opt.lmax < 0) throw std::invalid_argument("time-limit route: lmax must be >= 0");
  if (opt.richardson && opt.eps_factor == 0.0)
    throw std::invalid_argument("time-limit route: Richardson extrapolation needs damping");
  // the radial grid has to carry the band M and the potential's local momenta
  double vmax = 0.0;
  for (double r = 0.0; r < 4.0 * width_ + 1.0; r += 0.01)
    vmax = std::max(vmax, std::abs(potential_profile(family_, coupling_, width_, r)));
  const double kmax = std::max(M, std::sqrt(vmax));
  if (pi / opt.dr < 4.0 * kmax)
    throw std::invalid_argument("time-limit route: radial step " + std::to_string(opt.dr) +
                                " does not resolve momenta up to " + std::to_string(kmax));
  // waves faster than 2M must not return from the wall within the longest time
  const double t_max = opt.richardson ? 2.0 * opt.T : opt.T;
  const double R = std::sqrt(3.0) * grid_.L + 1.25 * M * t_max + 5.0;
  dvr_ = make_sine_dvr(R, opt.dr);
  diag_.R = dvr_.R;
  diag_.N = dvr_.N;
}

const TimeLimitWaveOperator::Channel& TimeLimitWaveOperator::channel(int l) const {
  auto it = channels_.find(l);
  if (it != channels_.end()) return it->second;
  const int N = dvr_.N;
  auto vr = [&](double r) { return coupling_ == 0.0 ? 0.0 : potential_profile(family_, coupling_, width_, r); };
  Eigen::VectorXd Vd(N);
  for (int j = 0; j < N; ++j) Vd[j] = vr(dvr_.r[j]);

  Channel ch;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> h0(radial_hamiltonian(dvr_, l, [](double) { return 0.0; }));
  ch.free_vals = h0.eigenvalues();
  ch.free_vecs = h0.eigenvectors();
  if (Vd.cwiseAbs().maxCoeff() == 0.0) {
    ch.A = Eigen::MatrixXcd::Zero(N, N);
    return channels_.emplace(l, std::move(ch)).first->second;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> h(radial_hamiltonian(dvr_, l, vr));
  std::vector<int> keep;  // continuous part of H_l
  for (int n = 0; n < N; ++n)
    if (h.eigenvalues()[n] >= -opt_.eps_bs) keep.push_back(n);
  Eigen::MatrixXd Phi(N, Index(keep.size()));
  Eigen::VectorXd E(Index(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    Phi.col(Index(c)) = h.eigenvectors().col(keep[c]);
    E[Index(c)] = h.eigenvalues()[keep[c]];
  }
  const Eigen::MatrixXd B = Phi.transpose() * Vd.asDiagonal() * ch.free_vecs;

  auto window = [&](double T, double eps) {
    Eigen::MatrixXcd W(B.rows(), B.cols());
    for (Index n = 0; n < B.rows(); ++n)
      for (Index m = 0; m < B.cols(); ++m) {
        const cplx a(-eps, E[n] - ch.free_vals[m]);
        W(n, m) = std::abs(a) * T < 1e-10 ? cplx(0.0, T) : cplx(0.0, 1.0) * (std::exp(a * T) - 1.0) / a;
      }
    return W;
  };
  const double eps = opt_.eps_factor / opt_.T;
  Eigen::MatrixXcd K = window(opt_.T, eps).cwiseProduct(B.cast<cplx>());
  if (opt_.richardson)
    K = 2.0 * window(2.0 * opt_.T, 0.5 * eps).cwiseProduct(B.cast<cplx>()) - K;
  ch.A = Phi.cast<cplx>() * K * ch.free_vecs.transpose().cast<cplx>();
  return channels_.emplace(l, std::move(ch)).first->second;
}

std::vector<ComplexField> TimeLimitWaveOperator::apply(const std::vector<ComplexField>& psi) const {
  std::vector<ComplexField> out;
  diag_.l_used = 0;
  diag_.tail = 0.0;
  diag_.last_channel = 0.0;
  const int lmax = opt_.lmax;
  const double t_max = opt_.richardson ? 2.0 * opt_.T : opt_.T;
  const double eps_min = opt_.eps_factor / t_max;
  Eigen::VectorXd Vd(dvr_.N);
  for (int j = 0; j < dvr_.N; ++j)
    Vd[j] = coupling_ == 0.0 ? 0.0 : potential_profile(family_, coupling_, width_, dvr_.r[j]);

  for (const auto& p : psi) {
    const ComplexField bp = filtered(p);
    const double norm = lp_norm(bp, 2.0);
    if (norm == 0.0 || coupling_ == 0.0) {
      out.push_back(pc_->apply(bp));
      continue;
    }
    const ComplexField wide = lowpass_filter(zero_pad(p, opt_.spectral_pad), CutoffProfile{M_});
    const Eigen::MatrixXcd u = project_partial_waves(continuum_transform(wide), lmax, dvr_.r, wide.grid.L);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dvr_.N, u.cols());
    int small = 0, l = 0;
    double tail2 = 0.0, last = 0.0;
    for (; l <= lmax; ++l) {
      const Channel& ch = channel(l);
      const Index lo = harmonic_index(l, -l), cnt = 2 * l + 1;
      w.middleCols(lo, cnt) = ch.A * u.middleCols(lo, cnt);
      last = std::sqrt(dvr_.dr() * w.middleCols(lo, cnt).squaredNorm()) / norm;
      // integrand at the final time
      const Eigen::VectorXcd ph =
          (-cplx(0.0, t_max) * ch.free_vals.cast<cplx>()).array().exp().matrix();
      const Eigen::MatrixXcd late =
          Vd.cast<cplx>().asDiagonal() *
          (ch.free_vecs.cast<cplx>() * (ph.asDiagonal() * (ch.free_vecs.transpose().cast<cplx>() * u.middleCols(lo, cnt))));
      tail2 += dvr_.dr() * late.squaredNorm();
      small = last < opt_.l_tol ? small + 1 : 0;
      if (small >= 2) break;
    }
    const int used = std::min(l, lmax);
    diag_.l_used = std::max(diag_.l_used, used);
    diag_.last_channel = std::max(diag_.last_channel, last);
    const double tail = std::exp(-eps_min * t_max) * std::sqrt(tail2) / norm;
    diag_.tail = std::max(diag_.tail, tail);
    if (tail > opt_.tail_tol)
      throw TailError("time-limit route: integrand has not decayed at T = " + std::to_string(t_max) +
                      " (tail estimate " + std::to_string(tail) + ")");
    const ComplexField corr = reconstruct_partial_waves(grid_, dvr_, w, used);
    out.push_back(pc_->apply(bp) + corr);
  }
  return out;
}

}  // namespace wavelab
