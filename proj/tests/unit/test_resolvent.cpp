#include "helpers.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/resolvent.hpp"

#include <doctest.h>

using namespace wavelab;
using namespace wavelab::testing;

namespace {
const Grid3 desk = make_grid(32, 16.0);

Potential gaussian(double lambda, double w = 1.0) {
  return sample_potential(PotentialFamily::gaussian, lambda, w, desk);
}

ComplexField smooth_input(std::uint64_t seed) {
  const ComplexField r = random_field(desk, seed);
  ComplexField env = gaussian_field(desk, 2.5, {0.5, -0.3, 0.2});
  return lowpass_filter(multiply(RealField(desk, env.values.real()), r),
                        CutoffProfile{1.5});
}
}  // namespace

TEST_CASE("zero potential context reproduces the free resolvent") {
  const Potential Z = gaussian(0.0);
  const ResolventContext ctx = build_resolvent_context(Z, 0.7, BoundaryValue::minus);
  const ComplexField f = smooth_input(1);
  const ComplexField a = apply_perturbed_resolvent(ctx, f);
  const ComplexField b = apply_free_resolvent(f, 0.7, BoundaryValue::minus);
  CHECK((a.values - b.values).norm() == 0.0);
  CHECK(apply_R1(ctx, f).values.norm() == 0.0);
}

TEST_CASE("Lippmann-Schwinger residual and linearity") {
  const Potential V = gaussian(-0.5);
  const ResolventContext ctx = build_resolvent_context(V, 0.6, BoundaryValue::minus);
  const ComplexField f1 = smooth_input(2), f2 = smooth_input(3);
  const ComplexField u1 = apply_perturbed_resolvent(ctx, f1);
  CHECK(lippmann_schwinger_residual(ctx, V, f1, u1) <= 1e-8);
  const ComplexField u12 = apply_perturbed_resolvent(ctx, f1 + f2);
  CHECK(rel_diff(u12, u1 + apply_perturbed_resolvent(ctx, f2)) <= 1e-12);
  // factorization round trip
  const Eigen::VectorXcd b = ctx.restrict(f1);
  Eigen::MatrixXcd A = ctx.g_ss * ctx.v_support.cast<cplx>().asDiagonal();
  A.diagonal().array() += 1.0;
  CHECK((A * ctx.solve(b) - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("second resolvent identity") {
  const Potential V = gaussian(-0.5);
  const ResolventContext ctx = build_resolvent_context(V, 0.9, BoundaryValue::minus);
  const ComplexField f = smooth_input(4);
  const ComplexField rf = apply_perturbed_resolvent(ctx, f);
  const ComplexField r0f = apply_free_resolvent(f, 0.9, BoundaryValue::minus);
  const ComplexField r0vrf = apply_free_resolvent(multiply(V.field, rf), 0.9, BoundaryValue::minus);
  CHECK((rf - r0f + r0vrf).values.norm() <= 1e-8 * f.values.norm());
  CHECK(rel_diff(apply_R1(ctx, f), rf - r0f) <= 1e-12);
}

TEST_CASE("boundary values are conjugate for real data") {
  const Potential V = gaussian(-0.5);
  const ComplexField f = to_complex(RealField(desk, smooth_input(5).values.real()));
  const ComplexField a = apply_perturbed_resolvent(build_resolvent_context(V, 0.8, BoundaryValue::minus), f);
  const ComplexField b = apply_perturbed_resolvent(build_resolvent_context(V, 0.8, BoundaryValue::plus), f);
  CHECK((a.values - b.values.conjugate()).norm() <= 1e-10 * a.values.norm());
}

TEST_CASE("Born order of the perturbed resolvent") {
  const ComplexField f = smooth_input(6);
  const Potential unit = gaussian(1.0);
  const double q = 0.7;
  const ComplexField r0f = apply_free_resolvent(f, q, BoundaryValue::minus);
  const ComplexField r0vr0f = apply_free_resolvent(multiply(unit.field, r0f), q, BoundaryValue::minus);
  auto defect = [&](double lambda) {
    const ResolventContext ctx = build_resolvent_context(gaussian(lambda), q, BoundaryValue::minus);
    return (apply_perturbed_resolvent(ctx, f) - r0f + lambda * r0vr0f).values.norm();
  };
  const double ratio = defect(0.1) / defect(0.05);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
  auto defect_r1 = [&](double lambda) {
    const ResolventContext ctx = build_resolvent_context(gaussian(lambda), q, BoundaryValue::minus);
    return (apply_R1(ctx, f) + lambda * r0vr0f).values.norm();
  };
  const double r1 = defect_r1(0.1) / defect_r1(0.05);
  CHECK(r1 >= 3.0);
  CHECK(r1 <= 5.0);
}

TEST_CASE("condition estimate finite for the default attractive Gaussian") {
  const Potential V = gaussian(-0.5);
  for (double q : {0.1, 0.5, 1.0}) {
    const ResolventContext ctx = build_resolvent_context(V, q, BoundaryValue::minus);
    CHECK(std::isfinite(ctx.condition));
    CHECK(ctx.condition < 1e12);
  }
}

TEST_CASE("continuous projection without bound states") {
  const ContinuousProjection P = continuous_projection(gaussian(0.0));
  CHECK(P.is_identity());
  const ContinuousProjection Q = continuous_projection(gaussian(-0.5));
  CHECK(Q.is_identity());  // below the binding threshold
  CHECK(Q.bound_states().discarded.size() <= 1);
}

TEST_CASE("bound states of a deep well") {
  const Potential V = gaussian(-4.0, 1.0);
  const BoundStates b = compute_bound_states(V);
  REQUIRE(b.states.size() >= 1);
  CHECK(b.energies.front() < -0.5);
  for (std::size_t i = 0; i < b.states.size(); ++i) {
    CHECK(b.residuals[i] <= 1e-6);
    const ComplexField r = apply_hamiltonian(V, b.states[i]) - b.energies[i] * b.states[i];
    CHECK(lp_norm(r, 2) <= 1e-6);
    for (std::size_t k = 0; k < b.states.size(); ++k)
      CHECK(std::abs(inner(b.states[i], b.states[k]) - (i == k ? 1.0 : 0.0)) <= 1e-10);
  }
  const ContinuousProjection P(b);
  for (const auto& phi : b.states) CHECK(lp_norm(P.apply(phi), 2) <= 1e-8);
  const ComplexField f = smooth_input(7);
  const ComplexField pf = P.apply(f);
  CHECK(rel_diff(P.apply(pf), pf) <= 1e-10);
  const ComplexField comm = P.apply(apply_hamiltonian(V, f)) - apply_hamiltonian(V, pf);
  CHECK(lp_norm(comm, 2) <= 1e-6 * lp_norm(f, 2));
}

TEST_CASE("derivative probe") {
  const Potential Z = gaussian(0.0);
  CHECK(resolvent_derivative_probe(Z, 0.5, 2, nullptr).ratio == 0.0);
  const Potential V = gaussian(-0.5);
  CHECK_THROWS_AS(resolvent_derivative_probe(V, 0.5, 1, nullptr, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(resolvent_derivative_probe(V, 0.5, 5, nullptr), std::invalid_argument);
  DerivativeProbeOptions o;
  o.ensemble = 4;
  const double a = resolvent_derivative_probe(V, 0.5, 1, nullptr, o).ratio;
  o.h_q = 0.005;
  const double b = resolvent_derivative_probe(V, 0.5, 1, nullptr, o).ratio;
  CHECK(a > 0);
  CHECK(std::abs(a / b - 1) <= 0.2);
}
