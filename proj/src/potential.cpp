#include "wavelab/potential.hpp"

#include "wavelab/fft.hpp"

namespace wavelab {

PotentialFamily parse_family(const std::string& name) {
  if (name == "gaussian") return PotentialFamily::gaussian;
  if (name == "yukawa-regularized") return PotentialFamily::yukawa_regularized;
  if (name == "compact-bump") return PotentialFamily::compact_bump;
  throw std::invalid_argument("unknown potential family '" + name + "'");
}

std::string family_name(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::gaussian: return "gaussian";
    case PotentialFamily::yukawa_regularized: return "yukawa-regularized";
    case PotentialFamily::compact_bump: return "compact-bump";
  }
  return "?";
}

double potential_profile(PotentialFamily f, double coupling, double width, double r) {
  switch (f) {
    case PotentialFamily::gaussian:
      return coupling * std::exp(-r * r / (2.0 * width * width));
    case PotentialFamily::yukawa_regularized: {
      const double s = std::sqrt(r * r + width * width);
      return coupling * width * std::exp(-(s - width) / width) / s;
    }
    case PotentialFamily::compact_bump: {
      const double t = r / (2.0 * width);
      if (t >= 1.0) return 0.0;
      return coupling * std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
  }
  return 0.0;
}

double Potential::support_radius() const {
  return family == PotentialFamily::compact_bump ? 2.0 * width : inf;
}

Potential sample_potential(PotentialFamily family, double coupling, double width,
                           const Grid3& grid, double delta) {
  if (!(width > 0.0)) throw std::invalid_argument("sample_potential: width must be positive");
  if (!std::isfinite(coupling)) throw std::invalid_argument("sample_potential: coupling not finite");
  if (4.0 * width < 4.0 * grid.h)
    throw std::invalid_argument("sample_potential: width " + std::to_string(width) +
                                " is unresolved on spacing h = " + std::to_string(grid.h) +
                                " (the core [-2w, 2w] needs at least 4 cells)");
  Potential V;
  V.family = family;
  V.coupling = coupling;
  V.width = width;
  V.delta = delta;
  V.field = sample<double>(grid, [&](const Eigen::Vector3d& x) {
    return potential_profile(family, coupling, width, x.norm());
  });
  V.linf_2delta = linf_weighted_norm(V, 2.0 * delta);
  return V;
}

RealField newton_sum(const RealField& g) {
  const Grid3& grid = g.grid;
  const int n = grid.n, N = 2 * n;
  const Index NN = Index(N) * N * N;
  Eigen::VectorXcd w(NN), a = Eigen::VectorXcd::Zero(NN);
  auto wrap = [&](int m) { return m < n ? m : m - N; };
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const double d = grid.h * std::sqrt(double(wrap(i)) * wrap(i) + double(wrap(j)) * wrap(j) +
                                            double(wrap(k)) * wrap(k));
        w[(Index(i) * N + j) * N + k] = d > 0.0 ? 1.0 / d : cube_inv_dist / grid.h;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) a[(Index(i) * N + j) * N + k] = g[grid.index(i, j, k)];
  Fft3& fft = fft_plan(N);
  fft.forward(w.data());
  fft.forward(a.data());
  a = a.cwiseProduct(w);
  fft.inverse(a.data());
  RealField out(grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[grid.index(i, j, k)] = grid.cell_volume() * a[(Index(i) * N + j) * N + k].real();
  return out;
}

double kato_norm(const RealField& V, double delta) {
  const Grid3& g = V.grid;
  if (g.L < 4.0 + 2.0 * g.h)
    throw std::invalid_argument("kato_norm: box half-width " + std::to_string(g.L) +
                                " cannot contain the ball |x| <= 4");
  const double peak = V.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  if (boundary_ratio(to_complex(V), 2) > 1e-6)
    throw std::invalid_argument("kato_norm: V is not negligible at the box boundary");
  RealField weighted(g);
  for (Index idx = 0; idx < g.size(); ++idx)
    weighted[idx] = std::pow(jbracket(g.point(idx).norm()), delta) * std::abs(V[idx]);
  const RealField s = newton_sum(weighted);
  double sup = 0.0;
  for (Index idx = 0; idx < g.size(); ++idx)
    if (g.point(idx).norm() <= 4.0) sup = std::max(sup, s[idx]);
  return sup;
}

double kato_norm(const Potential& V, double delta) { return kato_norm(V.field, delta); }

double l1_weighted_norm(const Potential& V, double delta) {
  return weighted_lp_norm(V.field, 1.0, delta);
}

double linf_weighted_norm(const Potential& V, double delta) {
  return weighted_lp_norm(V.field, inf, delta);
}

}  // namespace wavelab
