#include "wavelab/quadrature.hpp"

#include <queue>

namespace wavelab {

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx k = wgk[7] * fc, g = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const cplx s = f(c - r * xgk[i]) + f(c + r * xgk[i]);
    k += wgk[i] * s;
    if (i % 2 == 1) g += wg[i / 2] * s;
  }
  return {a, b, r * k, std::abs(r * (k - g))};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    const AdaptiveOptions& opt) {
  QuadratureResult res;
  if (a == b) return res;
  std::priority_queue<Segment> heap;
  const int p0 = std::max(1, opt.initial_panels);
  for (int p = 0; p < p0; ++p) heap.push(gk15(f, a + (b - a) * p / p0, a + (b - a) * (p + 1) / p0));
  res.evaluations = 15 * p0;
  auto totals = [&]() {
    auto copy = heap;
    cplx v = 0.0;
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (int(heap.size()) >= opt.max_intervals)
      throw QuadratureError("integrate_adaptive: no convergence after " +
                            std::to_string(heap.size()) + " subintervals (error estimate " +
                            std::to_string(error) + ")");
    const Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    const Segment l = gk15(f, s.a, m), r = gk15(f, m, s.b);
    res.evaluations += 30;
    value += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    if (error < 0.0 || heap.size() % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  res.value = value;
  res.error = error;
  res.intervals = int(heap.size());
  return res;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = 0.5 * (a + b) - 0.5 * (b - a) * x;
    r.nodes[n - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    r.weights[i] = r.weights[n - 1 - i] = 0.5 * (b - a) * w;
  }
  return r;
}

GaussRule composite_gauss_legendre(const std::vector<double>& breaks, int per_panel) {
  GaussRule out{Eigen::VectorXd(0), Eigen::VectorXd(0)};
  if (breaks.size() < 2) return out;
  const Index panels = Index(breaks.size()) - 1;
  out.nodes.resize(panels * per_panel);
  out.weights.resize(panels * per_panel);
  for (Index p = 0; p < panels; ++p) {
    const GaussRule r = gauss_legendre(per_panel, breaks[p], breaks[p + 1]);
    out.nodes.segment(p * per_panel, per_panel) = r.nodes;
    out.weights.segment(p * per_panel, per_panel) = r.weights;
  }
  return out;
}

Eigen::VectorXd fd_weights(const Eigen::VectorXd& x, int m) {
  const Index n = x.size() - 1;
  if (m > n) throw std::invalid_argument("fd_weights: too few points for derivative order");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, m + 1);
  double c1 = 1.0, c4 = x[0];
  c(0, 0) = 1.0;
  for (Index i = 1; i <= n; ++i) {
    const Index mn = std::min<Index>(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (Index j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (Index k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (Index k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

}  // namespace wavelab
