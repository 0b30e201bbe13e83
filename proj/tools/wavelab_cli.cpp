#include "wavelab/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace wavelab;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int refine = 0;
};

const std::map<std::string, std::vector<std::string>> subcommands{
    {"verify-sphere", {"sphere"}},
    {"resolvent-check", {"resolvent"}},
    {"oscint-bound", {"oscint_bound"}},
    {"waveop-compare", {"route_agreement", "isometry", "range_orthogonality"}},
    {"lp-probe", {"lp_ratio"}},
    {"adjoint-probe", {"adjoint"}},
    {"commutator-probe", {"commutator"}},
    {"run", {}},
};

int execute(const std::string& sub, const Common& o) {
  ScenarioConfig c = o.config.empty() ? ScenarioConfig{} : load_config(o.config);
  if (o.seed_set) c.seed = o.seed;
  c = refined(c, o.refine);
  validate(c);
  std::vector<std::string> probes = subcommands.at(sub);
  if (sub == "run") probes = c.probes;
  const std::filesystem::path out = o.out.empty() ? std::filesystem::path(c.output) : std::filesystem::path(o.out);
  const ScenarioResult r = run_scenario(c, probes, out);
  for (const auto& p : r.reports)
    std::cout << (p.passed ? "pass  " : "FAIL  ") << p.name << (p.norm.empty() ? "" : " [" + p.norm + "]")
              << (p.message.empty() ? "" : "  " + p.message) << "\n";
  std::cout << "report: " << r.files.json.string() << "\n";
  return r.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelab: low-frequency wave operator laboratory"};
  app.require_subcommand(1);
  Common o;
  std::string chosen;
  for (const auto& [name, probes] : subcommands) {
    (void)probes;
    CLI::App* s = app.add_subcommand(name, "run the " + name + " probe set");
    s->add_option("--config", o.config, "scenario file");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--seed", o.seed, "RNG seed")->each([&](const std::string&) { o.seed_set = true; });
    s->add_option("--refine", o.refine, "double the resolutions k times")->check(CLI::NonNegativeNumber);
    s->callback([&, n = name] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return execute(chosen, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
