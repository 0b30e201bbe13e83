#include "wavelab/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace wavelab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinity.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string probe_csv(const ProbeReport& r) {
  std::string s;
  for (std::size_t j = 0; j < r.columns.size(); ++j) s += (j ? "," : "") + r.columns[j];
  s += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) s += ",";
      s += j == 0 && r.columns[0] == "sample_index" ? std::to_string(long(row[j])) : fmt(row[j]);
    }
    s += "\n";
  }
  return s;
}

void write_probe_csv(const std::filesystem::path& path, const ProbeReport& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << probe_csv(r);
}

nlohmann::json probe_json(const ProbeReport& r, const std::string& csv_path) {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) m[k] = number(v);
  const EnsembleSpec& e = r.ensemble;
  return {{"name", r.name},
          {"status", r.passed ? "pass" : "fail"},
          {"route", r.route},
          {"norm", r.norm},
          {"tolerance", number(r.tolerance)},
          {"message", r.message},
          {"ensemble",
           {{"seed", e.seed},
            {"count", e.count},
            {"source_p", number(e.source_p)},
            {"source_delta", e.source_delta},
            {"packets", e.packets}}},
          {"metrics", m},
          {"samples_csv_path", csv_path}};
}

ReportFiles write_report(const std::filesystem::path& dir, const std::string& scenario,
                         const nlohmann::json& config, const std::vector<ProbeReport>& probes) {
  std::filesystem::create_directories(dir);
  ReportFiles files;
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const std::string name = probes[k].name + "_" + std::to_string(k) + ".csv";
    write_probe_csv(dir / name, probes[k]);
    files.csv.push_back(dir / name);
    arr.push_back(probe_json(probes[k], name));
    all = all && probes[k].passed;
  }
  const nlohmann::json doc = {{"schema_version", report_schema_version},
                              {"scenario", scenario},
                              {"config", config},
                              {"metadata", {{"generated_utc", utc_now()}}},
                              {"passed", all},
                              {"probes", arr}};
  files.json = dir / "report.json";
  std::ofstream out(files.json);
  if (!out) throw std::runtime_error("cannot write " + files.json.string());
  out << doc.dump(2) << "\n";
  return files;
}

}  // namespace wavelab
