#pragma once

#include "wavelab/grid.hpp"
#include "wavelab/potential.hpp"
#include "wavelab/quadrature.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>

namespace wavelab {

// Surface integral of e^{i x.w} over the unit sphere: 4 pi sin|x| / |x|.
cplx sphere_integral(const Eigen::Vector3d& x);

// The same integral by a product rule (Gauss-Legendre in cos(theta) times the
// trapezoid rule in phi) about the z axis.
cplx sphere_quadrature(const Eigen::Vector3d& x, int n_theta = 48, int n_phi = 96);

// sup |f| and sup q^j |f^{(j+1)}| (j = 0..3) over [0, 2M].
struct DerivativeBounds {
  double M = 0.0;
  double sup_f = 0.0;
  std::array<double, 4> sup_deriv{};
  int samples = 0;
  double total() const;  // C(f)
};

// A symbol f(q), q in [0, 2M], four times differentiable.
class Symbol1D {
 public:
  Symbol1D() = default;
  Symbol1D(std::function<cplx(double)> f, std::string name);
  // with exact derivatives d(q, m), m = 1..4
  Symbol1D(std::function<cplx(double)> f, std::function<cplx(double, int)> d, std::string name);

  cplx operator()(double q) const { return f_(q); }
  const std::string& name() const { return name_; }
  // d^m f / dq^m: exact when known, else a 9-point central difference of step `step`.
  cplx derivative(double q, int m, double step) const;
  bool exact_derivatives() const { return bool(d_); }

 private:
  std::function<cplx(double)> f_;
  std::function<cplx(double, int)> d_;
  std::string name_;
};

Symbol1D constant_symbol(cplx c);
Symbol1D exponential_symbol(double rate);
// Chebyshev interpolant of f on [lo, hi] from `nodes` Chebyshev-Lobatto
// samples; derivatives come from the differentiated series, so they never
// sample outside [lo, hi].
Symbol1D chebyshev_symbol(const std::function<cplx(double)>& f, double lo, double hi, int nodes,
                          std::string name);

// q -> <phi, R1(q^2) phi> with phi a unit Gaussian of width `probe_width`
// at the origin, interpolated from `nodes` Lobatto samples on [0, 3M]; the
// wider interval keeps [0, 2M] away from the interpolant's ill-conditioned ends.
Symbol1D resolvent_symbol(const Potential& V, double M, int nodes = 49, double probe_width = 1.0);

// Derivatives by 9-point central differences; step 0 selects max(2M, 1) / 100.
DerivativeBounds derivative_bounds(const Symbol1D& f, double M, int samples = 257, double step = 0.0);

// C(f); throws if doubling the samples and halving the difference step changes
// it by more than 10%.
double c_of_f(const Symbol1D& f, double M, int samples = 257);

struct IntegralOptions {
  int resolution = 0;  // each level halves the tolerance and doubles the panels
  double c_f = -1.0;   // C(f) if already known
};

// I(a,b) = (1/ab) int_0^inf q beta(q <= M) f(q) sin(aq) e^{-ibq} dq.
cplx eval_I(const Symbol1D& f, double a, double b, double M, const IntegralOptions& opt = {});

enum class MajorantVariant { I_ab, maineq1, maineq2, maineq8, cm1cm2, cm3cm4, cm8 };

MajorantVariant parse_majorant(const std::string& s);
std::string majorant_name(MajorantVariant v);

struct MajorantParams {
  double a = 0.0;
  double b = 0.0;
  double M = 1.0;
  MajorantVariant variant = MajorantVariant::I_ab;
};

// [chi(a+b>=1)/<a+b>^2 * 1/<a-b>^2 * (1 + 1/b) + chi(a+b<1)/(ab)] * C_f.
double i_bound_majorant(const MajorantParams& p, double C_f);

}  // namespace wavelab
