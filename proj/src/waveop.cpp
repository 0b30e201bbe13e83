#include "wavelab/waveop.hpp"

#include "wavelab/fft.hpp"

namespace wavelab {

Route parse_route(const std::string& s) {
  if (s == "time_limit") return Route::time_limit;
  if (s == "stationary") return Route::stationary;
  if (s == "kernel_split") return Route::kernel_split;
  throw std::invalid_argument("unknown route '" + s + "' (expected time_limit, stationary or kernel_split)");
}

std::string route_name(Route r) {
  switch (r) {
    case Route::time_limit: return "time_limit";
    case Route::stationary: return "stationary";
    case Route::kernel_split: return "kernel_split";
  }
  return "?";
}

WaveOperatorRoute::WaveOperatorRoute(const Potential& V, double M,
                                     std::shared_ptr<const ContinuousProjection> pc)
    : grid_(V.grid()), M_(M), pc_(std::move(pc)) {
  if (!(M > 0.0) || M >= grid_.nyquist())
    throw std::invalid_argument("wave operator: need 0 < M < pi/h");
  if (!pc_) pc_ = std::make_shared<const ContinuousProjection>(continuous_projection(V));
}

ComplexField WaveOperatorRoute::filtered(const ComplexField& psi) const {
  if (!(psi.grid == grid_)) throw std::invalid_argument("wave operator: field is on a different grid");
  return lowpass_filter(psi, CutoffProfile{M_});
}

std::vector<ComplexField> WaveOperatorRoute::apply_scattered(const std::vector<ComplexField>& psi) const {
  std::vector<ComplexField> out = apply(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = out[i] - pc_->apply(filtered(psi[i]));
  return out;
}

ContextCache::ContextCache(const Potential& V, std::vector<double> qs,
                           std::shared_ptr<const ContinuousProjection> pc, const ResolventOptions& opt,
                           double budget_mb)
    : V_(V), qs_(std::move(qs)), pc_(std::move(pc)), opt_(opt), budget_mb_(budget_mb),
      kept_(qs_.size()) {}

std::shared_ptr<const ResolventContext> ContextCache::get(std::size_t i) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (kept_.at(i)) return kept_[i];
  std::shared_ptr<const ResolventContext> ctx;
  if (!first_)
    ctx = first_ = std::make_shared<const ResolventContext>(
        build_resolvent_context(V_, qs_[i], BoundaryValue::minus, pc_, opt_));
  else
    ctx = std::make_shared<const ResolventContext>(rebuild_at(*first_, qs_[i], opt_));
  const double m = double(ctx->support_size());
  const double N = 2.0 * ctx->grid.n;
  const double mb = (2.0 * m * m + 2.0 * N * N * N) * 16.0 / 1048576.0;
  if (used_mb_ + mb <= budget_mb_) {
    kept_[i] = ctx;
    used_mb_ += mb;
  }
  return ctx;
}

std::size_t ContextCache::cached() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t c = 0;
  for (const auto& k : kept_) c += k ? 1 : 0;
  return c;
}

std::unique_ptr<WaveOperatorRoute> make_route(Route r, const Potential& V, double M,
                                              std::shared_ptr<const ContinuousProjection> pc) {
  switch (r) {
    case Route::time_limit: return std::make_unique<TimeLimitWaveOperator>(V, M, pc);
    case Route::stationary: return std::make_unique<StationaryWaveOperator>(V, M, pc);
    case Route::kernel_split: return std::make_unique<KernelSplitWaveOperator>(V, M, pc);
  }
  throw std::invalid_argument("make_route: bad route");
}

std::vector<ComplexField> commutator_x(const WaveOperatorRoute& op, const std::vector<ComplexField>& psi,
                                       double boundary_tol) {
  const Grid3& g = op.grid();
  std::vector<ComplexField> weighted;
  for (const auto& p : psi) {
    ComplexField w(g);
    for (Index i = 0; i < g.size(); ++i) w[i] = g.point(i).norm() * p[i];
    if (boundary_ratio(w) > boundary_tol)
      throw std::invalid_argument("commutator_x: |y| psi is not negligible at the box boundary (ratio " +
                                  std::to_string(boundary_ratio(w)) + ")");
    weighted.push_back(std::move(w));
  }
  std::vector<ComplexField> all = psi;
  all.insert(all.end(), weighted.begin(), weighted.end());
  const std::vector<ComplexField> s = op.apply_scattered(all);
  std::vector<ComplexField> out;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    ComplexField c(g);
    for (Index i = 0; i < g.size(); ++i) c[i] = g.point(i).norm() * s[k][i] - s[psi.size() + k][i];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace wavelab
