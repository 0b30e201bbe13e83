#pragma once

#include "wavelab/bound_states.hpp"
#include "wavelab/free_resolvent.hpp"

#include <Eigen/LU>

#include <cstdint>
#include <memory>

namespace wavelab {

class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolventOptions {
  double support_threshold = 1e-10;  // |V| > threshold * max|V|
  double max_condition = 1e12;
};

// R^{sign}(q^2) through u = R0 f - R0 V u, solved densely on supp V.
struct ResolventContext {
  Grid3 grid;
  double q = 0.0;
  BoundaryValue sign = BoundaryValue::minus;
  std::shared_ptr<const FreeResolvent> free;
  std::shared_ptr<const ContinuousProjection> projection;
  std::vector<Index> support;
  Eigen::VectorXd v_support;
  Eigen::MatrixXcd g_ss;  // h^3 K(x_a - x_b) on the support
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  double condition = 1.0;

  Index support_size() const { return Index(support.size()); }
  // (I + G V)^{-1} b on the support.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  Eigen::VectorXcd restrict(const ComplexField& f) const;
  ComplexField embed(const Eigen::VectorXcd& s) const;
};

ResolventContext build_resolvent_context(const Potential& V, double q, BoundaryValue s,
                                         std::shared_ptr<const ContinuousProjection> pc = nullptr,
                                         const ResolventOptions& opt = {});

// Same support and projection as `like`, different q (reuses nothing else).
ResolventContext rebuild_at(const ResolventContext& like, double q, const ResolventOptions& opt = {});

ComplexField apply_perturbed_resolvent(const ResolventContext& ctx, const ComplexField& f);

// R1 f = R^-(q^2) P_c f - R0^-(q^2) P_c f.
ComplexField apply_R1(const ResolventContext& ctx, const ComplexField& f);

// ||u + R0 V u - R0 f||_2 / ||R0 f||_2 with the full potential field.
double lippmann_schwinger_residual(const ResolventContext& ctx, const Potential& V,
                                   const ComplexField& f, const ComplexField& u);

enum class ProbeNorm { l1_to_linf, weighted_l2 };

struct DerivativeProbeOptions {
  double h_q = 0.0;  // 0 selects min(q/16, 0.01)
  int ensemble = 8;
  std::uint64_t seed = 11;
  ProbeNorm norm = ProbeNorm::l1_to_linf;
  ResolventOptions resolvent;
};

struct DerivativeProbeResult {
  double ratio = 0.0;  // max over the ensemble
  double h_q = 0.0;
  std::vector<double> samples;
};

// ||q^{j-1} d^j/dq^j R1(q^2)|| from L^1_delta to L^inf (or L^2_delta to
// L^2_{-delta}) estimated by central differences on a probing ensemble.
DerivativeProbeResult resolvent_derivative_probe(const Potential& V, double q, int j,
                                                 std::shared_ptr<const ContinuousProjection> pc,
                                                 const DerivativeProbeOptions& opt = {});

}  // namespace wavelab
