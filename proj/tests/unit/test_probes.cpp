#include "helpers.hpp"
#include "wavelab/fft.hpp"
#include "wavelab/probes.hpp"
#include "wavelab/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace wavelab;

namespace {
const Grid3 desk = make_grid(32, 16.0);

BatchOperator identity_op() {
  return [](const std::vector<ComplexField>& f) { return f; };
}

// Packets scaled to fit the small box.
const Grid3 small = make_grid(32, 8.0);
EnsembleSpec small_spec(int count) {
  EnsembleSpec s;
  s.count = count;
  s.center_radius = 1.0;
  s.width_min = 1.0;
  s.width_max = 1.3;
  return s;
}
}  // namespace

TEST_CASE("fit_constant examples") {
  CHECK(fit_constant({}) == 0.0);
  CHECK(fit_constant({{0.0, 1.0}, {0.0, 0.0}}) == 0.0);
  CHECK(fit_constant({{2.0, 4.0}}) == 0.5);
  CHECK_THROWS_AS(fit_constant({{1.0, 0.0}}), ProbeError);
  CHECK_THROWS_AS(fit_constant({{-1.0, 1.0}}), ProbeError);
}

TEST_CASE("fit_constant dominates every sample") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 500; ++i) s.emplace_back(u(rng), 1e-3 + u(rng));
  const double K = fit_constant(s);
  bool attained = false;
  for (const auto& [l, m] : s) {
    CHECK(l / m <= K);
    attained = attained || l / m == K;
  }
  CHECK(attained);
}

TEST_CASE("ensemble fields have unit source norm and decay at the boundary") {
  for (double p : {1.0, 2.0, inf}) {
    EnsembleSpec s;
    s.count = 4;
    s.source_p = p;
    const ProbeEnsemble e = make_ensemble(desk, 1.0, s);
    REQUIRE(e.fields.size() == 4);
    for (const auto& f : e.fields) {
      CHECK(std::abs(lp_norm(f, p) - 1.0) <= 1e-12);
      CHECK(boundary_ratio(f) <= s.boundary_tol);
    }
  }
  EnsembleSpec w;
  w.count = 2;
  w.source_delta = 1.0;
  for (const auto& f : make_ensemble(desk, 1.0, w).fields) CHECK(std::abs(weighted_lp_norm(f, 2.0, 1.0) - 1.0) <= 1e-12);
}

TEST_CASE("ensemble is deterministic and extends by prefix") {
  EnsembleSpec s;
  s.count = 3;
  const ProbeEnsemble a = make_ensemble(desk, 1.0, s);
  s.count = 5;
  const ProbeEnsemble b = make_ensemble(desk, 1.0, s);
  for (int i = 0; i < 3; ++i) CHECK(a.fields[i].values == b.fields[i].values);
  s.seed = 2;
  CHECK(make_ensemble(desk, 1.0, s).fields[0].values != a.fields[0].values);
}

TEST_CASE("ensemble spectrum is confined to the band") {
  for (double band : {1.0, 0.5}) {
    EnsembleSpec s;
    s.count = 2;
    s.band = band;
    s.boundary_tol = 1.0;
    for (const auto& f : make_ensemble(desk, 1.0, s).fields) {
      const ComplexField hat = continuum_transform(f);
      double outside = 0.0;
      for (Index i = 0; i < desk.size(); ++i)
        if (desk.wavevector(i).norm() >= band) outside = std::max(outside, std::abs(hat[i]));
      CHECK(outside <= 1e-12 * hat.values.cwiseAbs().maxCoeff());
      // beta(|k| <= M) is the identity on the half band
      if (band == 0.5) CHECK(testing::rel_diff(lowpass_filter(f, CutoffProfile{1.0}), f) <= 1e-13);
    }
  }
}

TEST_CASE("ensemble rejects fields that reach the boundary") {
  EnsembleSpec s;
  s.count = 1;
  CHECK_THROWS_AS(make_ensemble(make_grid(16, 6.0), 1.0, s), ProbeError);
}

TEST_CASE("identity operator gives unit ratios") {
  RatioProbeOptions o;
  o.growth_factor = 3;
  const auto reports = lp_ratio_probe(identity_op(), "identity", small, 1.0, small_spec(4), {1.0, 2.0, 4.0, inf}, o);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) {
    CHECK(r.rows.size() == 12);
    for (double v : r.column("ratio")) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.metrics.at("growth") == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.passed);
    CHECK(r.metrics.at("max_ratio") >= r.metrics.at("median_ratio"));
    CHECK(r.metrics.at("median_ratio") >= 0.0);
  }
}

TEST_CASE("lowpass filter contracts L2") {
  const BatchOperator op = [](const std::vector<ComplexField>& f) {
    std::vector<ComplexField> out;
    for (const auto& x : f) out.push_back(lowpass_filter(x, CutoffProfile{0.6}));
    return out;
  };
  RatioProbeOptions o;
  o.growth_factor = 2;
  const auto r = lp_ratio_probe(op, "lowpass", small, 1.0, small_spec(5), {2.0}, o).front();
  for (double v : r.column("ratio")) CHECK(v <= 1.0 + 1e-14);
  CHECK(r.metrics.at("max_ratio") < 1.0);
}

TEST_CASE("ratio probes report failures as errors") {
  const BatchOperator nan_op = [](const std::vector<ComplexField>& f) {
    std::vector<ComplexField> out = f;
    out.back()[0] = cplx(std::nan(""), 0.0);
    return out;
  };
  const BatchOperator throwing = [](const std::vector<ComplexField>&) -> std::vector<ComplexField> {
    throw std::runtime_error("route broke");
  };
  RatioProbeOptions o;
  o.growth_factor = 1;
  CHECK_THROWS_AS(lp_ratio_probe(nan_op, "nan", small, 1.0, small_spec(2), {2.0}, o), ProbeError);
  try {
    lp_ratio_probe(throwing, "throw", small, 1.0, small_spec(2), {2.0}, o);
    FAIL("expected ProbeError");
  } catch (const ProbeError& e) {
    CHECK(std::string(e.what()).find("samples 0..1") != std::string::npos);
    CHECK(std::string(e.what()).find("route broke") != std::string::npos);
  }
}

TEST_CASE("growth above tolerance fails the report") {
  // ratio = 1 + sample index: the enlarged maximum is far above the base one
  int calls = 0;
  const BatchOperator op = [&](const std::vector<ComplexField>& f) {
    std::vector<ComplexField> out;
    for (const auto& x : f) out.push_back(double(1 + calls++) * x);
    return out;
  };
  RatioProbeOptions o;
  o.chunk = 1;
  const auto r = lp_ratio_probe(op, "growing", small, 1.0, small_spec(2), {2.0}, o).front();
  CHECK(r.metrics.at("max_ratio") == doctest::Approx(2.0));
  CHECK(r.metrics.at("max_ratio_enlarged") == doctest::Approx(20.0));
  CHECK_FALSE(r.passed);
}

TEST_CASE("route agreement with the zero potential") {
  const Potential V0 = sample_potential(PotentialFamily::gaussian, 0.0, 1.0, desk);
  StationaryWaveOperator st(V0, 1.0);
  TimeLimitWaveOperator tl(V0, 1.0);
  KernelSplitWaveOperator ks(V0, 1.0);
  EnsembleSpec s;
  s.count = 3;
  const ProbeEnsemble e = make_ensemble(desk, 1.0, s);
  const ProbeReport same = route_agreement({&st, &st}, e);
  CHECK(same.metrics.at("max_distance") == 0.0);
  const ProbeReport r = route_agreement({&st, &tl, &ks}, e);
  CHECK(r.columns.size() == 4);
  CHECK(r.metrics.at("max_distance") <= 1e-10);
  CHECK(r.passed);
  CHECK_THROWS_AS(route_agreement({&st}, e), std::invalid_argument);
}

TEST_CASE("record_refinement flags decreasing distances") {
  ProbeReport a, b;
  a.metrics = {{"max_distance", 0.02}, {"max_distance_x_y", 0.02}, {"max_distance_x_z", 0.01}};
  b.metrics = {{"max_distance", 0.015}, {"max_distance_x_y", 0.005}, {"max_distance_x_z", 0.015}};
  record_refinement(a, b);
  CHECK(a.metrics.at("refined_max_distance") == 0.015);
  CHECK(a.metrics.at("max_distance_x_y_decreased") == 1.0);
  CHECK(a.metrics.at("max_distance_x_z_decreased") == 0.0);
}

TEST_CASE("adjoint probe with the zero potential on the pass band") {
  const Potential V0 = sample_potential(PotentialFamily::gaussian, 0.0, 1.0, desk);
  StationaryWaveOperator st(V0, 1.0);
  EnsembleSpec s;
  s.count = 3;
  s.band = 0.5;
  s.boundary_tol = 1.0;
  AdjointProbeOptions o;
  o.ratio.growth_factor = 2;
  o.pairs = 3;
  const auto reports = adjoint_probe(st, s, o);
  REQUIRE(reports.size() == 3);
  for (int k = 0; k < 2; ++k)
    for (double v : reports[k].column("ratio")) CHECK(std::abs(v - 1.0) <= 1e-12);
  CHECK(reports[0].metrics.at("duality_ratio") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reports[2].name == "adjoint_identity");
  CHECK(reports[2].metrics.at("max_relative_error") <= 1e-12);
  for (const auto& r : reports) CHECK(r.passed);
}

TEST_CASE("adjoint identity with a potential") {
  const Potential V = sample_potential(PotentialFamily::compact_bump, -0.5, 1.0, small);
  StationaryWaveOperator st(V, 1.0);
  AdjointProbeOptions o;
  o.ratio.growth_factor = 1;
  o.pairs = 4;
  const auto reports = adjoint_probe(st, small_spec(4), o);
  CHECK(reports[2].metrics.at("max_relative_error") <= 1e-8);
  CHECK(reports[2].passed);
}

TEST_CASE("isometry probe with the zero potential") {
  const Potential V0 = sample_potential(PotentialFamily::gaussian, 0.0, 1.0, desk);
  StationaryWaveOperator st(V0, 1.0);
  EnsembleSpec s;
  s.count = 3;
  const ProbeReport r = isometry_probe(st, V0, make_ensemble(desk, 1.0, s));
  CHECK(r.metrics.at("max_isometry_defect") <= 1e-12);
  CHECK(r.metrics.at("max_intertwining_residual") <= 1e-12);
  CHECK(r.passed);
}

TEST_CASE("csv output is deterministic") {
  ProbeReport r;
  r.name = "t";
  r.columns = {"sample_index", "ratio"};
  r.rows = {{0, 0.1}, {1, 1.0 / 3.0}};
  const std::string csv = probe_csv(r);
  CHECK(csv == "sample_index,ratio\n0,0.10000000000000001\n1,0.33333333333333331\n");
  CHECK(probe_csv(r) == csv);
}

TEST_CASE("report json carries the schema fields") {
  ProbeReport r;
  r.name = "p";
  r.columns = {"sample_index", "ratio"};
  r.rows = {{0, 1.0}};
  r.metrics = {{"max_ratio", 1.0}, {"growth", inf}};
  r.passed = true;
  const auto dir = std::filesystem::temp_directory_path() / "wavelab_report_test";
  std::filesystem::remove_all(dir);
  const ReportFiles f = write_report(dir, "unit", {{"k", 1}}, {r});
  std::ifstream in(f.json);
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("schema_version") == report_schema_version);
  CHECK(j.at("scenario") == "unit");
  CHECK(j.at("probes").size() == 1);
  CHECK(j.at("probes")[0].at("status") == "pass");
  CHECK(j.at("probes")[0].at("metrics").at("growth") == "inf");
  CHECK(std::filesystem::exists(dir / j.at("probes")[0].at("samples_csv_path").get<std::string>()));
  std::filesystem::remove_all(dir);
}
