#pragma once

#include "wavelab/probes.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace wavelab {

constexpr int report_schema_version = 1;

// CSV body: header row of column names, then one row per sample with %.17g
// values; identical inputs give identical bytes.
std::string probe_csv(const ProbeReport& r);
void write_probe_csv(const std::filesystem::path& path, const ProbeReport& r);

nlohmann::json probe_json(const ProbeReport& r, const std::string& csv_path);

struct ReportFiles {
  std::filesystem::path json;
  std::vector<std::filesystem::path> csv;
};

// Writes <dir>/<name>_<k>.csv for each probe and <dir>/report.json with
// { schema_version, scenario, config, metadata, probes: [...], passed }.
ReportFiles write_report(const std::filesystem::path& dir, const std::string& scenario,
                         const nlohmann::json& config, const std::vector<ProbeReport>& probes);

}  // namespace wavelab
