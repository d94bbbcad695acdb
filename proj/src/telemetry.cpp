#include "tegra/telemetry.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tegra/error.hpp"

namespace tegra {

using Json = nlohmann::json;

namespace {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string_view role_name(ChannelRole role) { return role == ChannelRole::Vertex ? "vertex" : "edge"; }

}  // namespace

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

RunArtifact make_artifact(std::string label, const SimConfig& config, SimReport report) {
  RunArtifact a;
  a.label = std::move(label);
  a.config = config;
  a.report = std::move(report);
  const Time runtime = a.report.runtime;
  a.window = config.telemetry_window > 0 ? config.telemetry_window : runtime / 100.0;

  std::vector<double> vertex_utils, edge_utils;
  for (const ChannelReport& ch : a.report.channels) {
    const double u = runtime > 0 ? utilization(ch.stats, 0.0, runtime) : 0.0;
    a.channel_utilization.push_back(u);
    (ch.role == ChannelRole::Vertex ? vertex_utils : edge_utils).push_back(u);
    a.series.push_back(runtime > 0 && a.window > 0 ? utilization_series(ch.stats, a.window, runtime)
                                                   : std::vector<double>{});
  }
  a.mean_vertex_utilization = mean(vertex_utils);
  a.mean_edge_utilization = mean(edge_utils);
  return a;
}

RunSummary summarize(const RunArtifact& a) {
  return {a.label,
          a.report.runtime,
          a.report.graph_digest,
          std::string(to_string(a.config.workload)),
          a.config.source,
          a.mean_vertex_utilization,
          a.mean_edge_utilization};
}

Json report_json(const RunArtifact& a) {
  const SimReport& r = a.report;
  Json j;
  j["label"] = a.label;
  j["config"] = config_to_json(a.config);
  j["runtime_ns"] = r.runtime;
  j["events_executed"] = r.events_executed;
  j["graph"] = {{"digest", r.graph_digest},
                {"vertices", r.distances.size()},
                {"workload", std::string(to_string(a.config.workload))},
                {"source", a.config.source}};
  j["distance_digest"] = r.distance_digest;
  std::uint64_t reachable = 0;
  for (Distance d : r.distances) reachable += d != kInfinity ? 1 : 0;
  j["reachable_vertices"] = reachable;

  CoreCounters total;
  Json cores = Json::array();
  for (std::size_t c = 0; c < r.cores.size(); ++c) {
    const CoreCounters& k = r.cores[c];
    cores.push_back({{"core", c},
                     {"consumed", k.consumed},
                     {"accepted", k.accepted},
                     {"rejected", k.rejected},
                     {"generated", k.generated},
                     {"entries_processed", k.entries_processed},
                     {"vertex_reads", k.vertex_reads},
                     {"vertex_writes", k.vertex_writes},
                     {"edge_bytes_requested", k.edge_bytes_requested},
                     {"edge_bursts", k.edge_bursts},
                     {"spills", k.spills},
                     {"refills", k.refills},
                     {"send_stalls", k.send_stalls}});
    total.consumed += k.consumed;
    total.accepted += k.accepted;
    total.rejected += k.rejected;
    total.generated += k.generated;
    total.accepted_out_degree += k.accepted_out_degree;
    total.edge_bytes_requested += k.edge_bytes_requested;
    total.edge_burst_bytes += k.edge_burst_bytes;
    total.spills += k.spills;
    total.refills += k.refills;
  }
  j["cores"] = std::move(cores);

  std::uint64_t bytes_read = 0, bytes_written = 0;
  Json channels = Json::array();
  for (std::size_t i = 0; i < r.channels.size(); ++i) {
    const ChannelReport& ch = r.channels[i];
    bytes_read += ch.stats.bytes_read;
    bytes_written += ch.stats.bytes_written;
    channels.push_back({{"name", ch.name},
                        {"role", std::string(role_name(ch.role))},
                        {"kind", std::string(to_string(ch.config.kind))},
                        {"extra_latency_ns", ch.config.extra_latency},
                        {"bytes_read", ch.stats.bytes_read},
                        {"bytes_written", ch.stats.bytes_written},
                        {"requested_read", ch.stats.requested_read},
                        {"requested_written", ch.stats.requested_written},
                        {"requests", ch.stats.request_count},
                        {"beats", ch.stats.beat_count},
                        {"busy_ns", ch.stats.busy_time()},
                        {"utilization", a.channel_utilization[i]},
                        {"queue_wait_histogram", ch.stats.queue_wait_histogram},
                        {"series_file", "channels/" + ch.name + ".csv"}});
  }
  j["channels"] = std::move(channels);

  j["totals"] = {{"messages_sent", r.fabric.sent},
                 {"messages_delivered", r.fabric.delivered},
                 {"messages_consumed", total.consumed},
                 {"messages_generated", total.generated},
                 {"accepted", total.accepted},
                 {"rejected", total.rejected},
                 {"accepted_out_degree", total.accepted_out_degree},
                 {"edge_bytes_requested", total.edge_bytes_requested},
                 {"edge_burst_bytes", total.edge_burst_bytes},
                 {"spills", total.spills},
                 {"refills", total.refills},
                 {"bytes_read", bytes_read},
                 {"bytes_written", bytes_written}};

  std::uint32_t high_water = 0;
  Time blocked = 0;
  for (auto h : r.fabric.high_water) high_water = std::max(high_water, h);
  for (auto b : r.fabric.blocked_time) blocked += b;
  j["fabric"] = {{"sent", r.fabric.sent},
                 {"delivered", r.fabric.delivered},
                 {"blocked_sends", r.fabric.blocked_sends},
                 {"blocked_time_ns", blocked},
                 {"max_high_water", high_water},
                 {"high_water", r.fabric.high_water},
                 {"links_file", "fabric_links.csv"}};

  j["telemetry"] = {{"window_ns", a.window},
                    {"windows", a.series.empty() ? 0 : a.series.front().size()},
                    {"mean_vertex_utilization", a.mean_vertex_utilization},
                    {"mean_edge_utilization", a.mean_edge_utilization}};
  return j;
}

void export_run(const RunArtifact& a, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "channels", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  write_file(dir / "report.json", report_json(a).dump(2) + "\n");

  for (std::size_t i = 0; i < a.report.channels.size(); ++i) {
    std::string csv = "window_index,utilization\n";
    for (std::size_t k = 0; k < a.series[i].size(); ++k) {
      csv += std::to_string(k) + "," + format_fixed(a.series[i][k]) + "\n";
    }
    write_file(dir / "channels" / (a.report.channels[i].name + ".csv"), csv);
  }

  const FabricCounters& f = a.report.fabric;
  std::string links = "src,dst,count\n";
  for (std::uint32_t s = 0; s < f.num_cores; ++s) {
    for (std::uint32_t d = 0; d < f.num_cores; ++d) {
      links += std::to_string(s) + "," + std::to_string(d) + "," + std::to_string(f.link(s, d)) + "\n";
    }
  }
  write_file(dir / "fabric_links.csv", links);

  if (a.config.export_distances) {
    std::string csv = "vertex,distance\n";
    for (std::size_t v = 0; v < a.report.distances.size(); ++v) {
      const Distance d = a.report.distances[v];
      csv += std::to_string(v) + "," + (d == kInfinity ? std::string("inf") : std::to_string(d)) + "\n";
    }
    write_file(dir / "distances.csv", csv);
  }
}

Json read_report(const std::filesystem::path& report_path) {
  std::ifstream in(report_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + report_path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, report_path.string() + ": " + e.what());
  }
}

RunSummary summary_from_report(const Json& j) {
  try {
    RunSummary s;
    s.label = j.at("label").get<std::string>();
    s.runtime = j.at("runtime_ns").get<double>();
    s.graph_digest = j.at("graph").at("digest").get<std::uint64_t>();
    s.workload = j.at("graph").at("workload").get<std::string>();
    s.source = j.at("graph").at("source").get<VertexId>();
    s.mean_vertex_utilization = j.at("telemetry").at("mean_vertex_utilization").get<double>();
    s.mean_edge_utilization = j.at("telemetry").at("mean_edge_utilization").get<double>();
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report document: ") + e.what());
  }
}

const ComparisonRow& ComparisonTable::row(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return r;
  }
  throw Error(ErrorCode::ConfigError, "no comparison row '" + std::string(label) + "'");
}

std::string ComparisonTable::to_csv() const {
  std::string csv =
      "label,runtime_ns,normalized_performance,mean_vertex_utilization,mean_edge_utilization\n";
  for (const auto& r : rows) {
    csv += r.label + "," + format_fixed(r.runtime) + "," + format_fixed(r.normalized_performance) +
           "," + format_fixed(r.mean_vertex_utilization) + "," +
           format_fixed(r.mean_edge_utilization) + "\n";
  }
  return csv;
}

ComparisonTable compare(std::span<const RunSummary> runs, std::string_view baseline) {
  const RunSummary* base = nullptr;
  for (const auto& r : runs) {
    if (r.label == baseline) base = &r;
  }
  if (!base) throw Error(ErrorCode::ConfigError, "baseline '" + std::string(baseline) + "' not among runs");
  for (const auto& r : runs) {
    if (r.graph_digest != base->graph_digest || r.workload != base->workload ||
        r.source != base->source) {
      throw Error(ErrorCode::MismatchedWorkload,
                  "run '" + r.label + "' used a different graph or workload than '" +
                      base->label + "'");
    }
  }
  ComparisonTable table;
  table.baseline = std::string(baseline);
  for (const auto& r : runs) {
    double norm;
    if (r.runtime == base->runtime) {
      norm = 1.0;
    } else if (r.runtime == 0) {
      norm = std::numeric_limits<double>::infinity();
    } else {
      norm = base->runtime / r.runtime;
    }
    table.rows.push_back(
        {r.label, r.runtime, norm, r.mean_vertex_utilization, r.mean_edge_utilization});
  }
  return table;
}

}  // namespace tegra
