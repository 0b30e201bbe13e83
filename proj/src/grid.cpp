#include "wavelab/grid.hpp"

namespace wavelab {

Grid3 make_grid(int n, double L) {
  if (n < 8 || n > 256 || (n & (n - 1)) != 0)
    throw std::invalid_argument("make_grid: n must be a power of two in [8, 256], got " +
                                std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("make_grid: L must be positive");
  Grid3 g;
  g.n = n;
  g.L = L;
  g.h = 2.0 * L / n;
  return g;
}

double CutoffProfile::smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace wavelab
