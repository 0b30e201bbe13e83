#include "wavelab/kernels.hpp"

namespace wavelab {

FKernel parse_fkernel(const std::string& s) {
  if (s == "F") return FKernel::F;
  if (s == "F1") return FKernel::F1;
  if (s == "F2") return FKernel::F2;
  throw std::invalid_argument("unknown kernel '" + s + "' (expected F, F1 or F2)");
}

std::string fkernel_name(FKernel k) {
  switch (k) {
    case FKernel::F: return "F";
    case FKernel::F1: return "F1";
    case FKernel::F2: return "F2";
  }
  return "?";
}

GaussRule cutoff_q_rule(double M, int nodes_per_panel) {
  if (!(M > 0.0)) throw std::invalid_argument("cutoff_q_rule: M must be positive");
  return composite_gauss_legendre({0.0, 0.5 * M, M}, nodes_per_panel);
}

FKernelEvaluator::FKernelEvaluator(const Potential& V, double M, int nodes_per_panel,
                                   std::shared_ptr<const ContinuousProjection> pc,
                                   const ResolventOptions& opt)
    : grid_(V.grid()), M_(M), rule_(cutoff_q_rule(M, nodes_per_panel)), pc_(std::move(pc)) {
  if (!pc_) pc_ = std::make_shared<const ContinuousProjection>(continuous_projection(V));
  contexts_.reserve(rule_.nodes.size());
  for (Index i = 0; i < rule_.nodes.size(); ++i) {
    if (contexts_.empty())
      contexts_.push_back(build_resolvent_context(V, rule_.nodes[i], BoundaryValue::minus, pc_, opt));
    else
      contexts_.push_back(rebuild_at(contexts_.front(), rule_.nodes[i]));
  }
}

cplx FKernelEvaluator::operator()(const Eigen::Vector3i& x, const Eigen::Vector3i& y,
                                  FKernel which) const {
  for (int a = 0; a < 3; ++a)
    if (x[a] < 0 || x[a] >= grid_.n || y[a] < 0 || y[a] >= grid_.n)
      throw std::out_of_range("FKernelEvaluator: lattice index outside the grid");
  const CutoffProfile beta{M_};
  const Eigen::Vector3d yp(grid_.coord(y[0]), grid_.coord(y[1]), grid_.coord(y[2]));
  const double h3 = grid_.cell_volume();
  cplx total = 0.0;
  for (std::size_t n = 0; n < contexts_.size(); ++n) {
    const ResolventContext& ctx = contexts_[n];
    const Index m = ctx.support_size();
    if (m == 0) return 0.0;
    const double q = ctx.q;

    // V s on the support, then (R0 P_c V s)_S
    Eigen::VectorXcd vs(m);
    for (Index a = 0; a < m; ++a) {
      const double r = q * (grid_.point(ctx.support[a]) - yp).norm();
      vs[a] = ctx.v_support[a] * (r < 1e-8 ? 1.0 : std::sin(r) / r);
    }
    Eigen::VectorXcd b;
    if (pc_->is_identity())
      b = ctx.g_ss * vs;
    else
      b = ctx.restrict(ctx.free->apply(pc_->apply(ctx.embed(vs))));

    Eigen::VectorXcd w;  // the field hit by the outer R0^- V, on the support
    switch (which) {
      case FKernel::F: w = ctx.solve(b); break;
      case FKernel::F2: w = b; break;
      case FKernel::F1: {
        const Eigen::VectorXcd u = ctx.solve(b);
        w = -(ctx.g_ss * ctx.v_support.cast<cplx>().cwiseProduct(u));
        break;
      }
    }
    cplx outer = 0.0;
    for (Index a = 0; a < m; ++a) {
      const Index idx = ctx.support[a];
      const int k = int(idx % grid_.n), j = int((idx / grid_.n) % grid_.n),
                i = int(idx / (Index(grid_.n) * grid_.n));
      outer += ctx.free->kernel(x[0] - i, x[1] - j, x[2] - k) * ctx.v_support[a] * w[a];
    }
    total += rule_.weights[n] * q * q * beta.low(q) * h3 * outer;
  }
  return 4.0 * pi * total;
}

cplx eval_F_kernel(const Potential& V, double M, const Eigen::Vector3i& x, const Eigen::Vector3i& y,
                   FKernel which, int nodes_per_panel) {
  if (V.is_zero()) return 0.0;
  return FKernelEvaluator(V, M, nodes_per_panel)(x, y, which);
}

namespace {

struct SupportPoint {
  Eigen::Vector3d x;
  double v;  // |V|
};

std::vector<SupportPoint> support_points(const Potential& V) {
  std::vector<SupportPoint> s;
  const double vmax = V.field.values.cwiseAbs().maxCoeff();
  if (!(vmax > 0.0)) return s;
  for (Index i = 0; i < V.field.size(); ++i)
    if (std::abs(V.field[i]) > 1e-10 * vmax) s.push_back({V.grid().point(i), std::abs(V.field[i])});
  return s;
}

// 1/|u| and 1/(|u||u - c|) with singular cells replaced by cell averages.
struct Singular {
  double h;
  double inv(double r) const { return r < 0.5 * h ? cube_inv_dist / h : 1.0 / r; }
  double inv_pair(double r1, double r2) const {
    if (r1 < 0.5 * h && r2 < 0.5 * h) return cube_inv_dist_sq / (h * h);
    return inv(r1) * inv(r2);
  }
};

// chi(a+b>1)/(a+b)^2 * 1/<a-b>^power
double far_factor(double a, double b, int power) {
  if (!(a + b > 1.0)) return 0.0;
  const double d = jbracket(a - b);
  return 1.0 / ((a + b) * (a + b) * (power == 2 ? d * d : d));
}

bool near(double a, double b) { return a + b <= 10.0; }

}  // namespace

double osi_majorant(const Potential& V, const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                    MajorantVariant variant) {
  if (variant == MajorantVariant::I_ab)
    throw std::invalid_argument("osi_majorant: I_ab is not a kernel majorant");
  const auto S = support_points(V);
  if (S.empty()) return 0.0;
  const Singular sg{V.grid().h};
  const double h3 = V.grid().cell_volume();
  const double delta = V.delta;
  double sum = 0.0;

  switch (variant) {
    case MajorantVariant::maineq1:
    case MajorantVariant::cm1cm2: {
      const bool cm = variant == MajorantVariant::cm1cm2;
      std::vector<double> wz(S.size());
      for (std::size_t b = 0; b < S.size(); ++b)
        wz[b] = std::pow(jbracket(S[b].x.norm()), cm ? delta + 1.0 : delta) * S[b].v;
      for (const auto& s1 : S) {
        const double a = (x - s1.x).norm();  // |k| with x - k = s1
        const double wk = cm ? jbracket(s1.x.norm()) * s1.v : s1.v;
        const double ka = jbracket(a) * sg.inv(a);
        double inner = 0.0;
        for (std::size_t b = 0; b < S.size(); ++b) {
          const double bb = (S[b].x - y).norm();
          double t = ka * far_factor(a, bb, cm ? 1 : 2);
          if (near(a, bb)) t += sg.inv(a) * sg.inv(bb);
          inner += wz[b] * t;
        }
        sum += wk * inner;
      }
      return sum * h3 * h3;
    }
    case MajorantVariant::maineq2:
    case MajorantVariant::cm3cm4: {
      const bool cm = variant == MajorantVariant::cm3cm4;
      const double xy = std::abs(x.norm() - y.norm());
      for (const auto& s1 : S) {
        const double a = (x - s1.x).norm(), bb = (s1.x - y).norm();
        const double wk = cm ? jbracket(s1.x.norm()) * s1.v : s1.v;
        double t = jbracket(a) * sg.inv(a) * far_factor(a, bb, cm ? 1 : 2);
        if (near(a, bb)) t += (cm ? xy : 1.0) * sg.inv_pair(a, bb);
        sum += wk * t;
      }
      return sum * h3;
    }
    case MajorantVariant::maineq8:
    case MajorantVariant::cm8: {
      const bool cm = variant == MajorantVariant::cm8;
      for (const auto& s1 : S) {
        const double a = (x - s1.x).norm();
        const double w1 = cm ? jbracket(s1.x.norm()) * s1.v : s1.v;
        const double ka = jbracket(a) * sg.inv(a);
        double inner = 0.0;
        for (const auto& s2 : S) {
          const double p = (s1.x - s2.x).norm(), bb = (s2.x - y).norm();
          const double w2 = cm ? jbracket(s2.x.norm()) * s2.v : s2.v;
          double t = sg.inv(p) * ka * far_factor(a, bb, cm ? 1 : 2);
          if (near(a, bb)) t += (cm ? std::abs(a - bb) : 1.0) * sg.inv(a) * sg.inv_pair(p, bb);
          inner += w2 * t;
        }
        sum += w1 * inner;
      }
      return sum * h3 * h3;
    }
    case MajorantVariant::I_ab: break;
  }
  return 0.0;
}

}  // namespace wavelab
