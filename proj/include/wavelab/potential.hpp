#pragma once

#include "wavelab/grid.hpp"

#include <string>

namespace wavelab {

enum class PotentialFamily { gaussian, yukawa_regularized, compact_bump };

PotentialFamily parse_family(const std::string& name);
std::string family_name(PotentialFamily f);

// Integrals of 1/|u| and 1/|u|^2 over the unit cube centred at the origin.
constexpr double cube_inv_dist = 2.380077363979553506643817;
constexpr double cube_inv_dist_sq = 7.674124222443732023552317;

// Closed-form radial profile V(r) of a family.
double potential_profile(PotentialFamily f, double coupling, double width, double r);

struct Potential {
  RealField field;
  PotentialFamily family = PotentialFamily::gaussian;
  double coupling = 0.0;
  double width = 1.0;
  double delta = 5.0;
  // max over the grid of <x>^{2 delta} |V(x)|.
  double linf_2delta = 0.0;

  const Grid3& grid() const { return field.grid; }
  double operator()(double r) const { return potential_profile(family, coupling, width, r); }
  // Radius outside which V vanishes identically (infinity unless compact).
  double support_radius() const;
  bool is_zero() const { return coupling == 0.0; }
};

Potential sample_potential(PotentialFamily family, double coupling, double width,
                           const Grid3& grid, double delta = 5.0);

// sup over grid points |x| <= 4 of  int <x-k>^delta |V(x-k)| / |k| d^3k,
// with the k = 0 cell replaced by its exact cell average.
double kato_norm(const Potential& V, double delta);
double kato_norm(const RealField& V, double delta);

// Grid sum  h^3 sum_y g(y) w(x - y)  for every x, with w(d) = 1/|d| and the
// d = 0 cell averaged; g must be negligible at the box boundary.
RealField newton_sum(const RealField& g);

double l1_weighted_norm(const Potential& V, double delta);
double linf_weighted_norm(const Potential& V, double delta);

}  // namespace wavelab
