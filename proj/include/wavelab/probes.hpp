#pragma once

#include "wavelab/waveop.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wavelab {

// Random test fields: sums of Gaussian wave packets sampled through their
// closed-form transforms on the dual lattice, normalized in the source norm.
// band > 0 multiplies the transform by beta(|k| <= band M); with band <= 1/2
// the fields lie where beta(|k| <= M) is identically 1.  Filtered fields keep
// percent-level tails at the box boundary on desk grids, so they need a
// relaxed boundary_tol.
struct EnsembleSpec {
  std::uint64_t seed = 1;
  int count = 50;
  double source_p = 2.0;
  double source_delta = 0.0;  // weight <x>^delta in the source norm
  int packets = 3;
  double center_radius = 3.0;
  double width_min = 1.5, width_max = 2.5;
  double momentum_fraction = 0.5;  // |k0| <= fraction * M
  double band = 0.0;
  double boundary_tol = 1e-3;
};

struct ProbeEnsemble {
  EnsembleSpec spec;
  Grid3 grid;
  double M = 0.0;
  std::vector<ComplexField> fields;
};

// Member i depends only on (seed, i), so a larger count extends a smaller one.
ComplexField ensemble_member(const Grid3& grid, double M, const EnsembleSpec& spec, int i);
ProbeEnsemble make_ensemble(const Grid3& grid, double M, const EnsembleSpec& spec);

struct ProbeReport {
  std::string name;
  std::string route;
  std::string norm;  // e.g. "L^2 -> L^2"
  EnsembleSpec ensemble;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> metrics;
  double tolerance = 0.0;
  bool passed = false;
  std::string message;

  std::vector<double> column(const std::string& name) const;
};

class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using BatchOperator = std::function<std::vector<ComplexField>(const std::vector<ComplexField>&)>;

struct NormPair {
  double source_p = 2.0;
  double source_delta = 0.0;
  double target_p = 2.0;
};
std::string norm_descriptor(const NormPair& n);

struct RatioProbeOptions {
  int growth_factor = 10;
  double growth_tol = 0.25;
  std::size_t chunk = 100;
};

// ||op psi||_target / ||psi||_source over the ensemble and over an ensemble
// growth_factor times larger (same seed); one report per norm pair.
// Column layout: sample_index, ratio.
std::vector<ProbeReport> ratio_probe(const BatchOperator& op, const std::string& name, const std::string& route,
                                     const Grid3& grid, double M, const EnsembleSpec& spec,
                                     const std::vector<NormPair>& norms, const RatioProbeOptions& opt = {});

std::vector<ProbeReport> lp_ratio_probe(const BatchOperator& op, const std::string& route, const Grid3& grid,
                                        double M, const EnsembleSpec& spec,
                                        const std::vector<double>& ps = {1.0, 2.0, 4.0, inf},
                                        const RatioProbeOptions& opt = {});

struct AdjointProbeOptions {
  RatioProbeOptions ratio;
  int pairs = 10;
  double identity_tol = 1e-8;
  double duality_factor = 2.0;
};

// beta Omega_+^* ratios for p in {1, inf}, the bilinear identity
// <Omega_+ beta psi, phi> = <psi, beta Omega_+^* phi> on random pairs and the
// comparison of the p = 1 adjoint maximum with the p = inf forward maximum
// (recorded as duality_ratio; it does not affect the status).
std::vector<ProbeReport> adjoint_probe(const StationaryWaveOperator& op, const EnsembleSpec& spec,
                                       const AdjointProbeOptions& opt = {});

// max lhs / majorant; throws ProbeError when a majorant vanishes under a
// positive lhs.
double fit_constant(const std::vector<std::pair<double, double>>& samples);

// Pairwise ||A psi - B psi||_2 / ||psi||_2. Columns: sample_index, then one
// distance column per pair.
ProbeReport route_agreement(const std::vector<const WaveOperatorRoute*>& routes, const ProbeEnsemble& ensemble,
                            double tolerance = 5e-2);

// Copies every metric m of `refined` into `base` as refined_m, and for each
// max_distance* metric adds <name>_decreased = 1 or 0.
void record_refinement(ProbeReport& base, const ProbeReport& refined);

// ||Omega_+ beta psi||_2 / ||beta psi||_2 and the intertwining residual
// ||H Omega_+ beta psi - Omega_+ beta H0 psi||_2 / (M^2 ||beta psi||_2).
ProbeReport isometry_probe(const WaveOperatorRoute& op, const Potential& V, const ProbeEnsemble& ensemble,
                           double isometry_tol = 1e-2, double intertwining_tol = 5e-2);

// max_j |<phi_j, Omega_+ beta psi>| / ||psi||_2 over the bound states of H.
ProbeReport range_orthogonality_probe(const WaveOperatorRoute& op, const ProbeEnsemble& ensemble,
                                      double tolerance = 1e-6);

// Relative L^2 distance between commutator_x evaluated by two routes.
ProbeReport commutator_agreement(const WaveOperatorRoute& a, const WaveOperatorRoute& b,
                                 const ProbeEnsemble& ensemble, double tolerance = 1e-1);

}  // namespace wavelab
