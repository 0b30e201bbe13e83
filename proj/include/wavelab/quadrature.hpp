#pragma once

#include "wavelab/grid.hpp"

#include <functional>
#include <stdexcept>

namespace wavelab {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
  int initial_panels = 1;
};

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand.
QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    const AdaptiveOptions& opt = {});

struct GaussRule {
  Eigen::VectorXd nodes, weights;
};

// n-point Gauss-Legendre rule on [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Gauss-Legendre rule with `per_panel` nodes on each of the given panels.
GaussRule composite_gauss_legendre(const std::vector<double>& breaks, int per_panel);

// Weights w with f^{(order)}(0) ~ sum_i w_i f(offsets_i) (Fornberg's algorithm).
Eigen::VectorXd fd_weights(const Eigen::VectorXd& offsets, int order);

}  // namespace wavelab
