#pragma once

#include "wavelab/potential.hpp"

#include <cstdint>
#include <vector>

namespace wavelab {

struct EigenOptions {
  double eps_bs = 1e-6;        // eigenvalues in (-eps_bs, 0) are threshold anomalies
  double tol = 1e-9;           // relative eigen-residual target
  double outer_fraction = 0.25;  // max mass fraction in |x|_inf > L/2 for a bound state
  int block = 8;
  int degree = 40;
  int max_iter = 300;
  std::uint64_t seed = 7;
};

struct BoundStates {
  Grid3 grid;
  std::vector<double> energies;
  std::vector<ComplexField> states;  // orthonormal in the grid inner product
  std::vector<double> residuals;     // ||H phi - E phi||_2 for unit phi
  std::vector<double> discarded;     // negative but delocalized box modes
  int iterations = 0;
};

// H = -Delta + V on the periodic grid (spectral Laplacian).
ComplexField apply_hamiltonian(const Potential& V, const ComplexField& f);

// Eigenpairs of H below -eps_bs that are localized away from the box boundary,
// by Chebyshev-filtered subspace iteration.
BoundStates compute_bound_states(const Potential& V, const EigenOptions& opt = {});

// P_c = I - sum_j <phi_j, .> phi_j.
class ContinuousProjection {
 public:
  ContinuousProjection() = default;
  explicit ContinuousProjection(BoundStates b) : bound_(std::move(b)) {}

  ComplexField apply(const ComplexField& f) const;
  bool is_identity() const { return bound_.states.empty(); }
  const BoundStates& bound_states() const { return bound_; }

 private:
  BoundStates bound_;
};

ContinuousProjection continuous_projection(const Potential& V, const EigenOptions& opt = {});

}  // namespace wavelab
