#include "wavelab/fft.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/waveop.hpp"

namespace wavelab {

KernelSplitWaveOperator::KernelSplitWaveOperator(const Potential& V, double M,
                                                 std::shared_ptr<const ContinuousProjection> pc,
                                                 const KernelSplitOptions& opt)
    : WaveOperatorRoute(V, M, std::move(pc)), rule_(cutoff_q_rule(M, opt.nodes_per_panel)) {
  std::vector<double> qs(rule_.nodes.data(), rule_.nodes.data() + rule_.nodes.size());
  cache_ = std::make_unique<ContextCache>(V, qs, pc_, opt.resolvent, opt.cache_budget_mb);
}

std::vector<SplitParts> KernelSplitWaveOperator::parts(const std::vector<ComplexField>& psi) const {
  std::vector<SplitParts> out;
  for (const auto& p : psi) {
    if (!(p.grid == grid_)) throw std::invalid_argument("KernelSplitWaveOperator: grid mismatch");
    out.push_back({ComplexField(grid_), ComplexField(grid_)});
  }
  const CutoffProfile beta{M_};
  const double c = 1.0 / std::pow(2.0 * pi, 3);
  for (std::size_t n = 0; n < cache_->size() && !psi.empty(); ++n) {
    const double q = cache_->q(n);
    const double wq = rule_.weights[Index(n)] * q * q * beta.low(q) * c;
    if (wq == 0.0) continue;
    const auto ctx = cache_->get(n);
    if (ctx->support_size() == 0) break;
    const AperiodicConvolution sphere(grid_, [q](const Eigen::Vector3d& d) {
      const double r = q * d.norm();
      return cplx(4.0 * pi * (r < 1e-8 ? 1.0 : std::sin(r) / r));
    });
    const Eigen::VectorXcd v = ctx->v_support.cast<cplx>();
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const ComplexField g = sphere.apply(psi[i]);
      const ComplexField vg = ctx->embed(v.cwiseProduct(ctx->restrict(g)));
      const ComplexField r0 = ctx->free->apply(pc_->apply(vg));  // R0^- P_c V g
      const Eigen::VectorXcd u = ctx->solve(ctx->restrict(r0));   // (R^- P_c V g) on S
      out[i].I1.values -= wq * r0.values;
      out[i].I2.values += wq * ctx->free->apply(ctx->embed(v.cwiseProduct(u))).values;
    }
  }
  return out;
}

// Same sum as parts(), with R0 applied once to I1 + I2 and the q sum carried
// out on padded spectra: per node and field one inverse DFT (g_q) and one
// forward DFT (the combined source).
std::vector<ComplexField> KernelSplitWaveOperator::apply(const std::vector<ComplexField>& psi) const {
  for (const auto& p : psi)
    if (!(p.grid == grid_)) throw std::invalid_argument("KernelSplitWaveOperator: grid mismatch");
  const CutoffProfile beta{M_};
  const double c = 1.0 / std::pow(2.0 * pi, 3);
  const std::vector<ComplexField>& bs = pc_->bound_states().states;
  std::vector<Eigen::VectorXcd> psi_hat, acc, phi_hat;
  for (const auto& p : psi) {
    psi_hat.push_back(padded_dft(p));
    acc.push_back(Eigen::VectorXcd::Zero(psi_hat.back().size()));
  }
  for (const auto& phi : bs) phi_hat.push_back(padded_dft(phi));

  for (std::size_t n = 0; n < cache_->size() && !psi.empty(); ++n) {
    const double q = cache_->q(n);
    const double wq = rule_.weights[Index(n)] * q * q * beta.low(q) * c;
    if (wq == 0.0) continue;
    const auto ctx = cache_->get(n);
    if (ctx->support_size() == 0) break;
    const AperiodicConvolution sphere(grid_, [q](const Eigen::Vector3d& d) {
      const double r = q * d.norm();
      return cplx(4.0 * pi * (r < 1e-8 ? 1.0 : std::sin(r) / r));
    });
    const Eigen::VectorXcd v = ctx->v_support.cast<cplx>();
    std::vector<Eigen::VectorXcd> r0_phi;  // (R0 phi_j) on S
    for (const auto& phi : bs) r0_phi.push_back(ctx->restrict(ctx->free->apply(phi)));
    for (std::size_t i = 0; i < psi.size(); ++i) {
      Eigen::VectorXcd spec = sphere.kernel_hat().cwiseProduct(psi_hat[i]);
      const Eigen::VectorXcd vg = v.cwiseProduct(ctx->restrict(padded_idft(spec, grid_)));
      // P_c V g = V g - sum_j c_j phi_j
      Eigen::VectorXcd cj(Index(bs.size()));
      const ComplexField vg_full = ctx->embed(vg);
      for (std::size_t j = 0; j < bs.size(); ++j) cj[Index(j)] = inner(bs[j], vg_full);
      Eigen::VectorXcd r0 = ctx->g_ss * vg;
      for (std::size_t j = 0; j < bs.size(); ++j) r0 -= cj[Index(j)] * r0_phi[j];
      const Eigen::VectorXcd u = ctx->solve(r0);
      spec = padded_dft(ctx->embed(v.cwiseProduct(u) - vg));
      for (std::size_t j = 0; j < bs.size(); ++j) spec += cj[Index(j)] * phi_hat[j];
      acc[i].array() += wq * ctx->free->kernel_hat().array() * spec.array();
    }
  }
  std::vector<ComplexField> out;
  for (std::size_t i = 0; i < psi.size(); ++i)
    out.push_back(pc_->apply(filtered(psi[i])) + padded_idft(acc[i], grid_));
  return out;
}

}  // namespace wavelab
