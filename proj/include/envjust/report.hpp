#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "envjust/sweep.hpp"

namespace envjust {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const ScalingReport& r);
ScalingReport report_from_json(const nlohmann::json& j);

/// Per-epsilon table, one row per run.
std::string runs_csv(const ScalingReport& r);
/// Plot-ready long table: one row per (epsilon, sample time).
std::string samples_csv(const ScalingReport& r);
/// Human-readable verdict summary.
std::string summary_text(const ScalingReport& r);

struct ReportPaths {
  std::filesystem::path runsCsv, samplesCsv, json, log;
};

/// Writes runs.csv, samples.csv, summary.json and a log line block into `dir`.
ReportPaths emit_report(const ScalingReport& r, const std::filesystem::path& dir);

ScalingReport load_report(const std::filesystem::path& json);

void write_text(const std::filesystem::path& p, const std::string& text, bool append = false);

}  // namespace envjust
