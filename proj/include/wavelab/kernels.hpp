#pragma once

#include "wavelab/oscillatory.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/resolvent.hpp"

#include <memory>
#include <string>
#include <vector>

namespace wavelab {

enum class FKernel { F, F1, F2 };

FKernel parse_fkernel(const std::string& s);
std::string fkernel_name(FKernel k);

// Composite Gauss-Legendre rule on [0, M/2] and [M/2, M] (beta(q <= M) vanishes past M).
GaussRule cutoff_q_rule(double M, int nodes_per_panel);

// The kernels
//   F (x,y) = 4 pi int q^2 beta(q<=M) [R0^- V R^- P_c V s_{y,q}](x) dq
//   F1(x,y) = 4 pi int q^2 beta(q<=M) [R0^- V R1(q^2) V s_{y,q}](x) dq
//   F2(x,y) = 4 pi int q^2 beta(q<=M) [R0^- V R0^- P_c V s_{y,q}](x) dq
// with s_{y,q}(z) = sinc(q |z - y|), so that F = F1 + F2.  The q integral uses
// cutoff_q_rule; one resolvent context is built per node.
class FKernelEvaluator {
 public:
  FKernelEvaluator(const Potential& V, double M, int nodes_per_panel = 16,
                   std::shared_ptr<const ContinuousProjection> pc = nullptr,
                   const ResolventOptions& opt = {});

  // x, y are lattice indices (i, j, k).
  cplx operator()(const Eigen::Vector3i& x, const Eigen::Vector3i& y, FKernel which) const;

  const GaussRule& q_rule() const { return rule_; }
  double M() const { return M_; }

 private:
  Grid3 grid_;
  double M_;
  GaussRule rule_;
  std::shared_ptr<const ContinuousProjection> pc_;
  std::vector<ResolventContext> contexts_;
};

cplx eval_F_kernel(const Potential& V, double M, const Eigen::Vector3i& x, const Eigen::Vector3i& y,
                   FKernel which, int nodes_per_panel = 16);

// Right-hand sides of the Osi / Osi2 estimates at (x, y), by grid sums over
// supp V.  Cells where 1/|u| is singular carry the cell average c1/h, and a
// doubly singular 1/|u|^2 cell carries c2/h^2.
double osi_majorant(const Potential& V, const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                    MajorantVariant variant);

}  // namespace wavelab
