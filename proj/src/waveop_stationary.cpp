#include "wavelab/fft.hpp"
#include "wavelab/waveop.hpp"

namespace wavelab {

StationaryWaveOperator::StationaryWaveOperator(const Potential& V, double M,
                                               std::shared_ptr<const ContinuousProjection> pc,
                                               const StationaryOptions& opt)
    : WaveOperatorRoute(V, M, std::move(pc)) {
  if (opt.spectral_pad < 1) throw std::invalid_argument("stationary route: spectral_pad must be >= 1");
  spec_grid_ = opt.spectral_pad == 1 ? grid_ : make_grid(opt.spectral_pad * grid_.n, opt.spectral_pad * grid_.L);
  const CutoffProfile beta{M};
  beta_.resize(spec_grid_.size());
  std::map<long, std::size_t> by_m2;
  const double dk2 = spec_grid_.dk() * spec_grid_.dk();
  for (Index idx = 0; idx < spec_grid_.size(); ++idx) {
    const double k = spec_grid_.wavevector(idx).norm();
    beta_[idx] = beta.low(k);
    if (beta_[idx] <= 0.0) continue;
    const long m2 = std::lround(k * k / dk2);
    auto [it, fresh] = by_m2.emplace(m2, shells_.size());
    if (fresh) shells_.push_back({k, {}});
    shells_[it->second].modes.push_back(idx);
  }
  std::vector<double> qs;
  for (const auto& s : shells_) qs.push_back(s.q);
  cache_ = std::make_unique<ContextCache>(V, qs, pc_, opt.resolvent, opt.cache_budget_mb);
}

namespace {

// e^{i q.x_a} for support points a of g and shell modes of the lattice of s
Eigen::MatrixXcd plane_waves(const Grid3& g, const Grid3& s, const std::vector<Index>& support,
                             const std::vector<Index>& modes) {
  Eigen::MatrixXcd P(Index(support.size()), Index(modes.size()));
  for (std::size_t b = 0; b < modes.size(); ++b) {
    const Eigen::Vector3d k = s.wavevector(modes[b]);
    for (std::size_t a = 0; a < support.size(); ++a)
      P(Index(a), Index(b)) = std::exp(cplx(0.0, k.dot(g.point(support[a]))));
  }
  return P;
}

}  // namespace

std::vector<ComplexField> StationaryWaveOperator::apply(const std::vector<ComplexField>& psi) const {
  const Index batch = Index(psi.size());
  std::vector<ComplexField> spec;
  std::vector<Eigen::VectorXcd> acc;  // sum over shells of R0 src, as padded spectra
  for (const auto& p : psi) {
    if (!(p.grid == grid_)) throw std::invalid_argument("StationaryWaveOperator: grid mismatch");
    spec.push_back(continuum_transform(zero_pad(p, spec_grid_.n / grid_.n)));
  }
  const double scale = -1.0 / std::pow(2.0 * spec_grid_.L, 3);
  for (std::size_t s = 0; s < shells_.size() && batch > 0; ++s) {
    const auto ctx = cache_->get(s);
    const Index m = ctx->support_size();
    if (m == 0) break;
    const auto& modes = shells_[s].modes;
    Eigen::MatrixXcd C(Index(modes.size()), batch);
    for (std::size_t b = 0; b < modes.size(); ++b)
      for (Index i = 0; i < batch; ++i) C(Index(b), i) = scale * beta_[modes[b]] * spec[i][modes[b]];
    const Eigen::MatrixXcd F =
        ctx->v_support.cast<cplx>().asDiagonal() * (plane_waves(grid_, spec_grid_, ctx->support, modes) * C);
    const Eigen::MatrixXcd U = ctx->lu.solve(ctx->g_ss * F);
    // R^- f = R0 (f - V u_S) for f = V E supported on S
    const Eigen::MatrixXcd src = F - ctx->v_support.cast<cplx>().asDiagonal() * U;
    const Eigen::VectorXcd& kh = ctx->free->kernel_hat();
    for (Index i = 0; i < batch; ++i) {
      if (Index(acc.size()) <= i) acc.push_back(Eigen::VectorXcd::Zero(kh.size()));
      acc[i].array() += kh.array() * padded_dft(ctx->embed(src.col(i))).array();
    }
  }
  std::vector<ComplexField> out;
  for (Index i = 0; i < batch; ++i)
    out.push_back(pc_->apply(filtered(psi[i]) + (i < Index(acc.size()) ? padded_idft(acc[i], grid_) : ComplexField(grid_))));
  return out;
}

std::vector<ComplexField> StationaryWaveOperator::apply_adjoint(const std::vector<ComplexField>& phi) const {
  const Index batch = Index(phi.size());
  std::vector<ComplexField> p, pconj, spec;
  for (const auto& f : phi) {
    if (!(f.grid == grid_)) throw std::invalid_argument("StationaryWaveOperator: grid mismatch");
    p.push_back(pc_->apply(f));
    pconj.emplace_back(grid_, p.back().values.conjugate());
    spec.emplace_back(spec_grid_);
  }
  const double h3 = grid_.cell_volume();
  for (std::size_t s = 0; s < shells_.size() && batch > 0; ++s) {
    const auto ctx = cache_->get(s);
    const Index m = ctx->support_size();
    if (m == 0) break;
    const auto& modes = shells_[s].modes;
    // R^+ p = conj(R^- conj p); only its values on S are needed
    Eigen::MatrixXcd B(m, batch);
    for (Index i = 0; i < batch; ++i) B.col(i) = ctx->restrict(ctx->free->apply(pconj[i]));
    const Eigen::MatrixXcd G = ctx->lu.solve(B).conjugate();
    const Eigen::MatrixXcd Cq =
        h3 * plane_waves(grid_, spec_grid_, ctx->support, modes).adjoint() * (ctx->v_support.cast<cplx>().asDiagonal() * G);
    for (std::size_t b = 0; b < modes.size(); ++b)
      for (Index i = 0; i < batch; ++i) spec[i][modes[b]] += beta_[modes[b]] * Cq(Index(b), i);
  }
  std::vector<ComplexField> out;
  for (Index i = 0; i < batch; ++i) out.push_back(filtered(p[i]) - crop_centre(inverse_continuum_transform(spec[i]), grid_));
  return out;
}

}  // namespace wavelab
