#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "tegra/config.hpp"
#include "tegra/engine.hpp"

namespace tegra {

/// A finished run plus everything derived from it for export.
struct RunArtifact {
  std::string label;
  SimConfig config;
  SimReport report;
  Time window = 0;
  std::vector<std::vector<double>> series;     // per channel
  std::vector<double> channel_utilization;     // whole run, per channel
  double mean_vertex_utilization = 0;
  double mean_edge_utilization = 0;
};

RunArtifact make_artifact(std::string label, const SimConfig& config, SimReport report);

/// The scalars a comparison needs; also what import_summary reads back.
struct RunSummary {
  std::string label;
  Time runtime = 0;
  std::uint64_t graph_digest = 0;
  std::string workload;
  VertexId source = 0;
  double mean_vertex_utilization = 0;
  double mean_edge_utilization = 0;
};

RunSummary summarize(const RunArtifact& artifact);

/// Report document; key names are stable (see README).
nlohmann::json report_json(const RunArtifact& artifact);

/// Writes report.json, channels/<name>.csv, fabric_links.csv and, when
/// enabled, distances.csv under `dir`. Throws IoError.
void export_run(const RunArtifact& artifact, const std::filesystem::path& dir);

nlohmann::json read_report(const std::filesystem::path& report_path);
RunSummary summary_from_report(const nlohmann::json& report);

/// Six-decimal fixed formatting used by every CSV.
std::string format_fixed(double value);

struct ComparisonRow {
  std::string label;
  Time runtime = 0;
  double normalized_performance = 0;
  double mean_vertex_utilization = 0;
  double mean_edge_utilization = 0;
};

struct ComparisonTable {
  std::string baseline;
  std::vector<ComparisonRow> rows;

  const ComparisonRow& row(std::string_view label) const;
  std::string to_csv() const;
};

/// Normalized performance = baseline runtime / runtime, rows in input order.
/// Throws MismatchedWorkload when runs used different graphs or workloads,
/// ConfigError when the baseline label is absent.
ComparisonTable compare(std::span<const RunSummary> runs, std::string_view baseline);

}  // namespace tegra
