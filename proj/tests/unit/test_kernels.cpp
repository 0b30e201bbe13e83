#include <doctest.h>

#include "helpers.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/kernels.hpp"

#include <random>

using namespace wavelab;

namespace {

const Grid3& small_grid() {
  static const Grid3 g = make_grid(16, 8.0);
  return g;
}

const Potential& bump() {
  static const Potential V = sample_potential(PotentialFamily::compact_bump, -0.5, 1.0, small_grid());
  return V;
}

Eigen::Vector3d at(const Grid3& g, const Eigen::Vector3i& i) {
  return {g.coord(i[0]), g.coord(i[1]), g.coord(i[2])};
}

std::vector<std::pair<Eigen::Vector3i, Eigen::Vector3i>> random_pairs(int count, int lo, int hi,
                                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<std::pair<Eigen::Vector3i, Eigen::Vector3i>> out;
  for (int i = 0; i < count; ++i)
    out.push_back({{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}});
  return out;
}

}  // namespace

TEST_CASE("kernel names round trip") {
  for (auto k : {FKernel::F, FKernel::F1, FKernel::F2}) CHECK(parse_fkernel(fkernel_name(k)) == k);
  CHECK_THROWS_AS(parse_fkernel("F3"), std::invalid_argument);
}

TEST_CASE("cutoff q rule integrates polynomials on [0, M]") {
  const GaussRule r = cutoff_q_rule(1.5, 8);
  CHECK(r.nodes.size() == 16);
  CHECK(r.weights.sum() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(r.weights.dot(r.nodes.array().pow(7).matrix()) == doctest::Approx(std::pow(1.5, 8) / 8).epsilon(1e-13));
  CHECK_THROWS_AS(cutoff_q_rule(0.0, 8), std::invalid_argument);
}

TEST_CASE("zero potential gives zero kernels and majorants") {
  const Potential V0 = sample_potential(PotentialFamily::gaussian, 0.0, 1.0, small_grid());
  const Eigen::Vector3i x(8, 8, 8), y(5, 9, 10);
  for (auto k : {FKernel::F, FKernel::F1, FKernel::F2}) CHECK(eval_F_kernel(V0, 1.0, x, y, k) == cplx(0.0));
  for (auto v : {MajorantVariant::maineq1, MajorantVariant::maineq2, MajorantVariant::maineq8,
                 MajorantVariant::cm1cm2, MajorantVariant::cm3cm4, MajorantVariant::cm8})
    CHECK(osi_majorant(V0, at(small_grid(), x), at(small_grid(), y), v) == 0.0);
  CHECK_THROWS_AS(osi_majorant(bump(), {0, 0, 0}, {1, 0, 0}, MajorantVariant::I_ab),
                  std::invalid_argument);
}

TEST_CASE("maineq2 for a single-cell potential is one summand") {
  const Grid3& g = small_grid();
  Potential V;
  V.field = RealField(g);
  V.coupling = 1.0;
  V.field[g.index(8, 8, 8)] = -0.75;  // the cell at the origin
  const Eigen::Vector3d x(2, 0, 0), y(0, 3, 0);
  // k = x: |k| = 2, |x - k - y| = 3
  const double hand = 0.75 * (std::sqrt(5.0) / 2.0 * (1.0 / 25.0) * (1.0 / 2.0) + 1.0 / 6.0);
  CHECK(osi_majorant(V, x, y, MajorantVariant::maineq2) == doctest::Approx(hand).epsilon(1e-14));
  // x = y = origin: doubly singular cell
  CHECK(osi_majorant(V, {0, 0, 0}, {0, 0, 0}, MajorantVariant::maineq2) ==
        doctest::Approx(0.75 * cube_inv_dist_sq).epsilon(1e-14));
  // cm4 vanishes on |x| = |y| away from the far branch
  const double far_only = 0.75 * std::sqrt(5.0) / 2.0 * (1.0 / 25.0) * (1.0 / std::sqrt(2.0));
  CHECK(osi_majorant(V, x, y, MajorantVariant::cm3cm4) == doctest::Approx(far_only * 1.0 + 0.75 * 1.0 / 6.0 * 1.0).epsilon(1e-14));
}

TEST_CASE("majorants are nonnegative, finite and scale quadratically in V") {
  const Potential& V = bump();
  Potential V2 = V;
  V2.field = 2.0 * V.field;
  const Eigen::Vector3d x(1, 0, -2), y(0, 2, 1);
  for (auto v : {MajorantVariant::maineq1, MajorantVariant::maineq8, MajorantVariant::cm1cm2,
                 MajorantVariant::cm8}) {
    const double m1 = osi_majorant(V, x, y, v), m2 = osi_majorant(V2, x, y, v);
    CHECK(std::isfinite(m1));
    CHECK(m1 > 0.0);
    CHECK(m2 == doctest::Approx(4.0 * m1).epsilon(1e-12));
  }
  for (auto v : {MajorantVariant::maineq2, MajorantVariant::cm3cm4})
    CHECK(osi_majorant(V2, x, y, v) == doctest::Approx(2.0 * osi_majorant(V, x, y, v)).epsilon(1e-12));
}

TEST_CASE("maineq1 majorant is integrable in y") {
  // same potential and spacing, box side doubled: the y sum barely moves
  auto y_sum = [](int n, double L) {
    const Grid3 g = make_grid(n, L);
    const Potential V = sample_potential(PotentialFamily::compact_bump, -0.5, 1.0, g);
    double s = 0.0;
    for (Index i = 0; i < g.size(); ++i)
      s += osi_majorant(V, {1, 0, 0}, g.point(i), MajorantVariant::maineq1);
    return s * g.cell_volume();
  };
  const double s8 = y_sum(16, 8.0), s16 = y_sum(32, 16.0);
  CHECK(std::isfinite(s16));
  CHECK(std::abs(s16 - s8) <= 0.1 * s16);
}

TEST_CASE("F2 agrees with a full-field evaluation") {
  const Grid3& g = small_grid();
  const Potential& V = bump();
  const double M = 1.0;
  FKernelEvaluator ev(V, M, 8);
  const CutoffProfile beta{M};
  const Eigen::Vector3i x(9, 7, 8), y(6, 10, 8);
  const Eigen::Vector3d yp = at(g, y);
  auto integrand = [&](double q, bool full) {
    ComplexField s = sample<cplx>(g, [&](const Eigen::Vector3d& z) {
      const double r = q * (z - yp).norm();
      return r < 1e-8 ? 1.0 : std::sin(r) / r;
    });
    ComplexField u = apply_free_resolvent(multiply(V.field, s), q, BoundaryValue::minus);
    if (full) {
      const ResolventContext ctx = build_resolvent_context(V, q, BoundaryValue::minus);
      u = apply_perturbed_resolvent(ctx, multiply(V.field, s));
    }
    const ComplexField o = apply_free_resolvent(multiply(V.field, u), q, BoundaryValue::minus);
    return 4.0 * pi * q * q * beta.low(q) * o[g.index(x[0], x[1], x[2])];
  };
  const GaussRule r = ev.q_rule();
  cplx f2 = 0.0, f = 0.0;
  for (Index i = 0; i < r.nodes.size(); ++i) {
    f2 += r.weights[i] * integrand(r.nodes[i], false);
    f += r.weights[i] * integrand(r.nodes[i], true);
  }
  CHECK(std::abs(ev(x, y, FKernel::F2) - f2) <= 1e-10 * std::abs(f2));
  CHECK(std::abs(ev(x, y, FKernel::F) - f) <= 1e-10 * std::abs(f));
}

TEST_CASE("F equals F1 + F2 under independent q rules") {
  const Potential& V = bump();
  FKernelEvaluator fine(V, 1.0, 16), coarse(V, 1.0, 12);
  for (const auto& [x, y] : random_pairs(6, 3, 12, 41)) {
    const cplx F = fine(x, y, FKernel::F);
    const cplx S = coarse(x, y, FKernel::F1) + coarse(x, y, FKernel::F2);
    CHECK(std::abs(F - S) <= 1e-3 * std::abs(F));
  }
}

TEST_CASE("F kernel converges in the q rule") {
  const Potential& V = bump();
  FKernelEvaluator a(V, 1.0, 12), b(V, 1.0, 24);
  const Eigen::Vector3i x(10, 8, 6), y(7, 7, 9);
  for (auto k : {FKernel::F, FKernel::F1, FKernel::F2}) {
    const cplx va = a(x, y, k), vb = b(x, y, k);
    CHECK(std::abs(va - vb) <= 1e-5 * std::abs(vb));
  }
}

TEST_CASE("F1 is dominated by a fitted multiple of maineq1") {
  const Grid3& g = small_grid();
  const Potential& V = bump();
  FKernelEvaluator ev(V, 1.0, 12);
  double K = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (const auto& [x, y] : random_pairs(10, 2, 13, 43)) {
    const double lhs = std::abs(ev(x, y, FKernel::F1));
    const double maj = osi_majorant(V, at(g, x), at(g, y), MajorantVariant::maineq1);
    REQUIRE(maj > 0.0);
    samples.push_back({lhs, maj});
    K = std::max(K, lhs / maj);
  }
  CHECK(std::isfinite(K));
  CHECK(K > 0.0);
  for (const auto& [lhs, maj] : samples) CHECK(lhs <= K * maj);
}

TEST_CASE("F kernel rejects off-grid indices") {
  FKernelEvaluator ev(bump(), 1.0, 4);
  CHECK_THROWS_AS(ev({16, 0, 0}, {0, 0, 0}, FKernel::F), std::out_of_range);
}
