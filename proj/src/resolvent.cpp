#include "wavelab/resolvent.hpp"

#include "wavelab/quadrature.hpp"

#include <random>

namespace wavelab {

Eigen::VectorXcd ResolventContext::solve(const Eigen::VectorXcd& b) const {
  if (support.empty()) return b;
  return lu.solve(b);
}

Eigen::VectorXcd ResolventContext::restrict(const ComplexField& f) const {
  Eigen::VectorXcd s(support_size());
  for (Index a = 0; a < support_size(); ++a) s[a] = f[support[a]];
  return s;
}

ComplexField ResolventContext::embed(const Eigen::VectorXcd& s) const {
  ComplexField f(grid);
  for (Index a = 0; a < support_size(); ++a) f[support[a]] = s[a];
  return f;
}

namespace {

void factor(ResolventContext& ctx, const ResolventOptions& opt) {
  const Grid3& g = ctx.grid;
  const int n = g.n;
  const Index m = ctx.support_size();
  ctx.g_ss.resize(m, m);
  std::vector<std::array<int, 3>> ijk(m);
  for (Index a = 0; a < m; ++a) {
    const Index idx = ctx.support[a];
    ijk[a] = {int(idx / (Index(n) * n)), int((idx / n) % n), int(idx % n)};
  }
  const double h3 = g.cell_volume();
  for (Index b = 0; b < m; ++b)
    for (Index a = 0; a < m; ++a)
      ctx.g_ss(a, b) = h3 * ctx.free->kernel(ijk[a][0] - ijk[b][0], ijk[a][1] - ijk[b][1],
                                             ijk[a][2] - ijk[b][2]);
  if (m == 0) return;
  Eigen::MatrixXcd A = ctx.g_ss * ctx.v_support.cast<cplx>().asDiagonal();
  A.diagonal().array() += 1.0;
  ctx.lu.compute(A);
  const double rc = ctx.lu.rcond();
  ctx.condition = rc > 0.0 ? 1.0 / rc : inf;
  if (!(ctx.condition <= opt.max_condition))
    throw ResonanceError("build_resolvent_context: Lippmann-Schwinger operator is near-singular at q = " +
                         std::to_string(ctx.q) + " (condition estimate " +
                         std::to_string(ctx.condition) + ")");
}

}  // namespace

ResolventContext build_resolvent_context(const Potential& V, double q, BoundaryValue s,
                                         std::shared_ptr<const ContinuousProjection> pc,
                                         const ResolventOptions& opt) {
  ResolventContext ctx;
  ctx.grid = V.grid();
  ctx.q = q;
  ctx.sign = s;
  ctx.free = std::make_shared<FreeResolvent>(ctx.grid, q, s);
  ctx.projection = pc ? std::move(pc) : std::make_shared<ContinuousProjection>();
  const double vmax = V.field.values.cwiseAbs().maxCoeff();
  for (Index i = 0; i < ctx.grid.size(); ++i)
    if (vmax > 0.0 && std::abs(V.field[i]) > opt.support_threshold * vmax) ctx.support.push_back(i);
  ctx.v_support.resize(ctx.support_size());
  for (Index a = 0; a < ctx.support_size(); ++a) ctx.v_support[a] = V.field[ctx.support[a]];
  factor(ctx, opt);
  return ctx;
}

ResolventContext rebuild_at(const ResolventContext& like, double q, const ResolventOptions& opt) {
  ResolventContext ctx;
  ctx.grid = like.grid;
  ctx.q = q;
  ctx.sign = like.sign;
  ctx.free = std::make_shared<FreeResolvent>(ctx.grid, q, like.sign);
  ctx.projection = like.projection;
  ctx.support = like.support;
  ctx.v_support = like.v_support;
  factor(ctx, opt);
  return ctx;
}

ComplexField apply_perturbed_resolvent(const ResolventContext& ctx, const ComplexField& f) {
  if (!ctx.free) throw std::logic_error("apply_perturbed_resolvent: context not built");
  ComplexField u = ctx.free->apply(f);
  if (ctx.support.empty()) return u;
  const Eigen::VectorXcd us = ctx.solve(ctx.restrict(u));
  u.values -= ctx.free->apply(ctx.embed(ctx.v_support.cast<cplx>().cwiseProduct(us))).values;
  return u;
}

ComplexField apply_R1(const ResolventContext& ctx, const ComplexField& f) {
  if (ctx.sign != BoundaryValue::minus)
    throw std::invalid_argument("apply_R1: context must use the minus boundary value");
  const ComplexField pf = ctx.projection->apply(f);
  // R^- P_c f - R0^- P_c f = -R0 V u_S with u_S the support solution.
  if (ctx.support.empty()) return ComplexField(f.grid);
  const Eigen::VectorXcd us = ctx.solve(ctx.restrict(ctx.free->apply(pf)));
  return -1.0 * ctx.free->apply(ctx.embed(ctx.v_support.cast<cplx>().cwiseProduct(us)));
}

double lippmann_schwinger_residual(const ResolventContext& ctx, const Potential& V,
                                   const ComplexField& f, const ComplexField& u) {
  const ComplexField r0f = ctx.free->apply(f);
  const ComplexField r = u + ctx.free->apply(multiply(V.field, u)) - r0f;
  return r.values.norm() / std::max(r0f.values.norm(), 1e-300);
}

namespace {

std::vector<ComplexField> probing_inputs(const Potential& V, const DerivativeProbeOptions& opt) {
  const Grid3& g = V.grid();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ComplexField> out;
  const double reach = std::min(3.0, 0.5 * g.L);
  while (int(out.size()) < opt.ensemble) {
    Eigen::Vector3d c(u(rng), u(rng), u(rng));
    if (c.norm() > 1.0) continue;
    c *= reach;
    const double w = g.h * (1.0 + 0.5 * (u(rng) + 1.0));
    const cplx phase = std::polar(1.0, pi * u(rng));
    ComplexField f = sample<cplx>(g, [&](const Eigen::Vector3d& x) {
      return phase * std::exp(-(x - c).squaredNorm() / (2 * w * w));
    });
    const double nrm = opt.norm == ProbeNorm::l1_to_linf ? weighted_lp_norm(f, 1.0, V.delta)
                                                         : weighted_lp_norm(f, 2.0, V.delta);
    out.push_back((1.0 / nrm) * f);
  }
  return out;
}

}  // namespace

DerivativeProbeResult resolvent_derivative_probe(const Potential& V, double q, int j,
                                                 std::shared_ptr<const ContinuousProjection> pc,
                                                 const DerivativeProbeOptions& opt) {
  if (j < 1 || j > 4) throw std::invalid_argument("resolvent_derivative_probe: j must be in 1..4");
  DerivativeProbeResult res;
  res.h_q = opt.h_q > 0.0 ? opt.h_q : std::min(q / 16.0, 0.01);
  if (!(q > 0.0) || res.h_q > q / 8.0)
    throw std::invalid_argument("resolvent_derivative_probe: step h_q = " + std::to_string(res.h_q) +
                                " exceeds q/8 for q = " + std::to_string(q));
  if (V.is_zero()) {
    res.samples.assign(opt.ensemble, 0.0);
    return res;
  }
  Eigen::VectorXd offsets(2 * j + 1);
  for (int m = -j; m <= j; ++m) offsets[m + j] = m;
  const Eigen::VectorXd w = fd_weights(offsets, j) / std::pow(res.h_q, j);

  const auto inputs = probing_inputs(V, opt);
  std::vector<ComplexField> acc(inputs.size(), ComplexField(V.grid()));
  for (int m = -j; m <= j; ++m) {
    const ResolventContext ctx =
        build_resolvent_context(V, q + m * res.h_q, BoundaryValue::minus, pc, opt.resolvent);
    for (std::size_t i = 0; i < inputs.size(); ++i)
      acc[i].values += w[m + j] * apply_R1(ctx, inputs[i]).values;
  }
  const double pref = std::pow(q, j - 1);
  for (const auto& a : acc) {
    const double out = opt.norm == ProbeNorm::l1_to_linf ? lp_norm(a, inf)
                                                         : weighted_lp_norm(a, 2.0, -V.delta);
    res.samples.push_back(pref * out);
    res.ratio = std::max(res.ratio, pref * out);
  }
  return res;
}

}  // namespace wavelab
