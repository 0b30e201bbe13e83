#include "wavelab/oscillatory.hpp"

#include "wavelab/resolvent.hpp"

#include <algorithm>

namespace wavelab {

cplx sphere_integral(const Eigen::Vector3d& x) {
  const double r = x.norm();
  return 4.0 * pi * (r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r);
}

cplx sphere_quadrature(const Eigen::Vector3d& x, int n_theta, int n_phi) {
  const GaussRule t = gauss_legendre(n_theta, -1.0, 1.0);
  cplx s = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double c = t.nodes[i], st = std::sqrt(1.0 - c * c);
    cplx ring = 0.0;
    for (int k = 0; k < n_phi; ++k) {
      const double ph = 2.0 * pi * k / n_phi;
      const Eigen::Vector3d w(st * std::cos(ph), st * std::sin(ph), c);
      ring += std::exp(cplx(0.0, x.dot(w)));
    }
    s += t.weights[i] * ring * (2.0 * pi / n_phi);
  }
  return s;
}

double DerivativeBounds::total() const {
  return sup_f + *std::max_element(sup_deriv.begin(), sup_deriv.end());
}

Symbol1D::Symbol1D(std::function<cplx(double)> f, std::string name)
    : f_(std::move(f)), name_(std::move(name)) {}

Symbol1D::Symbol1D(std::function<cplx(double)> f, std::function<cplx(double, int)> d, std::string name)
    : f_(std::move(f)), d_(std::move(d)), name_(std::move(name)) {}

cplx Symbol1D::derivative(double q, int m, double step) const {
  static const std::array<Eigen::VectorXd, 5> w = [] {
    std::array<Eigen::VectorXd, 5> out;
    Eigen::VectorXd x(9);
    for (int i = 0; i < 9; ++i) x[i] = i - 4;
    for (int k = 0; k <= 4; ++k) out[k] = fd_weights(x, k);
    return out;
  }();
  if (m < 0 || m > 4) throw std::invalid_argument("Symbol1D::derivative: order must be 0..4");
  if (m == 0) return f_(q);
  if (d_) return d_(q, m);
  const cplx f0 = f_(q);
  cplx s = 0.0;
  for (int i = 0; i < 9; ++i)
    if (i != 4) s += w[m][i] * (f_(q + (i - 4) * step) - f0);
  return s / std::pow(step, m);
}

Symbol1D constant_symbol(cplx c) {
  return Symbol1D([c](double) { return c; }, "constant");
}

Symbol1D exponential_symbol(double rate) {
  return Symbol1D([rate](double q) { return cplx(std::exp(-rate * q)); },
                  "exp(-" + std::to_string(rate) + " q)");
}

Symbol1D chebyshev_symbol(const std::function<cplx(double)>& f, double lo, double hi, int nodes,
                          std::string name) {
  const int N = nodes - 1;
  Eigen::VectorXcd vals(nodes);
  for (int k = 0; k <= N; ++k) {
    const double t = std::cos(pi * k / N);
    vals[k] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
  }
  auto coef = std::make_shared<Eigen::VectorXcd>(nodes);
  for (int j = 0; j <= N; ++j) {
    cplx s = 0.0;
    for (int k = 0; k <= N; ++k) {
      const double wk = (k == 0 || k == N) ? 0.5 : 1.0;
      s += wk * vals[k] * std::cos(pi * j * k / N);
    }
    (*coef)[j] = (j == 0 || j == N ? 1.0 : 2.0) * s / double(N);
  }
  // series of the first four derivatives in t
  auto series = std::make_shared<std::array<Eigen::VectorXcd, 5>>();
  (*series)[0] = *coef;
  for (int m = 1; m <= 4; ++m) {
    const Eigen::VectorXcd& c = (*series)[m - 1];
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(c.size());
    for (Index k = c.size() - 1; k >= 1; --k) d[k - 1] = (k + 1 < d.size() ? d[k + 1] : cplx(0.0)) + 2.0 * double(k) * c[k];
    d[0] *= 0.5;
    (*series)[m] = d;
  }
  auto clenshaw = [lo, hi](const Eigen::VectorXcd& c, double q) {
    const double t = (2.0 * q - lo - hi) / (hi - lo);
    cplx b1 = 0.0, b2 = 0.0;
    for (Index j = c.size() - 1; j >= 1; --j) {
      const cplx b0 = c[j] + 2.0 * t * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return c[0] + t * b1 - b2;
  };
  return Symbol1D([series, clenshaw](double q) { return clenshaw((*series)[0], q); },
                  [series, clenshaw, lo, hi](double q, int m) {
                    return std::pow(2.0 / (hi - lo), m) * clenshaw((*series)[m], q);
                  },
                  std::move(name));
}

Symbol1D resolvent_symbol(const Potential& V, double M, int nodes, double probe_width) {
  const Grid3& g = V.grid();
  ComplexField phi = sample<cplx>(g, [&](const Eigen::Vector3d& x) {
    return std::exp(-x.squaredNorm() / (2.0 * probe_width * probe_width));
  });
  phi = (1.0 / lp_norm(phi, 2.0)) * phi;
  auto pc = std::make_shared<const ContinuousProjection>(continuous_projection(V));
  std::shared_ptr<ResolventContext> ctx;
  auto sample_at = [&](double q) {
    if (!ctx)
      ctx = std::make_shared<ResolventContext>(build_resolvent_context(V, q, BoundaryValue::minus, pc));
    else
      *ctx = rebuild_at(*ctx, q);
    return inner(phi, apply_R1(*ctx, phi));
  };
  return chebyshev_symbol(sample_at, 0.0, 3.0 * M, nodes, "<phi, R1 phi>");
}

DerivativeBounds derivative_bounds(const Symbol1D& f, double M, int samples, double step) {
  DerivativeBounds d;
  d.M = M;
  d.samples = samples;
  const double span = 2.0 * M;
  if (step <= 0.0) step = 0.01 * std::max(span, 1.0);
  for (int i = 0; i < samples; ++i) {
    const double q = span * i / (samples - 1);
    d.sup_f = std::max(d.sup_f, std::abs(f(q)));
    for (int j = 0; j < 4; ++j)
      d.sup_deriv[j] = std::max(d.sup_deriv[j], std::pow(q, j) * std::abs(f.derivative(q, j + 1, step)));
  }
  return d;
}

double c_of_f(const Symbol1D& f, double M, int samples) {
  const double step = 0.01 * std::max(2.0 * M, 1.0);
  const double coarse = derivative_bounds(f, M, samples, step).total();
  const double fine = derivative_bounds(f, M, 2 * samples - 1, 0.5 * step).total();
  if (std::abs(fine - coarse) > 0.1 * std::max(fine, 1e-300))
    throw std::runtime_error("c_of_f: derivative estimate unstable under refinement (" +
                             std::to_string(coarse) + " vs " + std::to_string(fine) + ")");
  return fine;
}

cplx eval_I(const Symbol1D& f, double a, double b, double M, const IntegralOptions& opt) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("eval_I: a and b must be positive");
  const double cf = opt.c_f >= 0.0 ? opt.c_f : c_of_f(f, M);
  const CutoffProfile beta{M};
  const double scale = std::ldexp(1.0, -opt.resolution);
  AdaptiveOptions ao;
  ao.abs_tol = 1e-10 * (1.0 + cf) * scale;
  ao.initial_panels = 4 << opt.resolution;
  ao.max_intervals = 20000;
  const auto r = integrate_adaptive(
      [&](double q) { return q * beta.low(q) * f(q) * std::sin(a * q) * std::exp(cplx(0.0, -b * q)); },
      0.0, M, ao);
  return r.value / (a * b);
}

MajorantVariant parse_majorant(const std::string& s) {
  if (s == "I_ab") return MajorantVariant::I_ab;
  if (s == "maineq1") return MajorantVariant::maineq1;
  if (s == "maineq2") return MajorantVariant::maineq2;
  if (s == "maineq8") return MajorantVariant::maineq8;
  if (s == "cm1cm2") return MajorantVariant::cm1cm2;
  if (s == "cm3cm4") return MajorantVariant::cm3cm4;
  if (s == "cm8") return MajorantVariant::cm8;
  throw std::invalid_argument("unknown majorant variant '" + s + "'");
}

std::string majorant_name(MajorantVariant v) {
  switch (v) {
    case MajorantVariant::I_ab: return "I_ab";
    case MajorantVariant::maineq1: return "maineq1";
    case MajorantVariant::maineq2: return "maineq2";
    case MajorantVariant::maineq8: return "maineq8";
    case MajorantVariant::cm1cm2: return "cm1cm2";
    case MajorantVariant::cm3cm4: return "cm3cm4";
    case MajorantVariant::cm8: return "cm8";
  }
  return "?";
}

double i_bound_majorant(const MajorantParams& p, double C_f) {
  if (p.variant != MajorantVariant::I_ab)
    throw std::invalid_argument("i_bound_majorant: variant must be I_ab");
  const double a = p.a, b = p.b;
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("i_bound_majorant: a, b must be positive");
  if (a + b < 1.0) return C_f / (a * b);
  const double s = jbracket(a + b), d = jbracket(a - b);
  return C_f * (1.0 + 1.0 / b) / (s * s * d * d);
}

}  // namespace wavelab
