#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tegra/config.hpp"
#include "tegra/engine.hpp"
#include "tegra/graph.hpp"
#include "tegra/telemetry.hpp"

namespace tegra::test {

inline std::shared_ptr<const CsrGraph> share(CsrGraph g) {
  return std::make_shared<const CsrGraph>(std::move(g));
}

inline SimConfig config_for(TopologyPreset topology, std::uint32_t cores) {
  SimConfig cfg;
  cfg.topology = topology;
  cfg.num_cores = cores;
  return cfg;
}

inline SimReport simulate(const std::shared_ptr<const CsrGraph>& g, const SimConfig& cfg) {
  return build_system(g, cfg)->run();
}

// Every exact bookkeeping identity a finished run must satisfy. Returns a
// description of each one that does not hold.
inline std::vector<std::string> conservation_violations(const CsrGraph& g, const SimConfig& cfg,
                                                        const RunArtifact& a) {
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  const SimReport& r = a.report;
  CoreCounters sum;
  for (const auto& k : r.cores) {
    sum.consumed += k.consumed;
    sum.accepted += k.accepted;
    sum.rejected += k.rejected;
    sum.generated += k.generated;
    sum.accepted_out_degree += k.accepted_out_degree;
    sum.popped_out_degree += k.popped_out_degree;
    sum.edge_bytes_requested += k.edge_bytes_requested;
    sum.edge_burst_bytes += k.edge_burst_bytes;
    sum.spills += k.spills;
    sum.refills += k.refills;
  }
  expect(r.fabric.sent == r.fabric.delivered, "sent != delivered");
  expect(r.fabric.delivered == sum.consumed, "delivered != consumed");
  expect(sum.accepted + sum.rejected == sum.consumed, "accepted + rejected != consumed");
  expect(sum.generated == sum.accepted_out_degree + g.degree(cfg.source),
         "generated != out-degree over accepted updates (plus the source)");
  expect(sum.generated == sum.popped_out_degree, "generated != out-degree of processed entries");
  expect(sum.generated == r.fabric.sent, "generated != sent");
  expect(sum.spills == sum.refills, "spills != refills");

  std::uint64_t link_total = 0;
  for (auto c : r.fabric.link_counts) link_total += c;
  expect(link_total == r.fabric.sent, "link counts do not sum to sent");

  expect(sum.edge_bytes_requested == kEdgeBytes * sum.generated, "edge bytes != 8 x edges traversed");
  std::uint64_t edge_read = 0, edge_transferred = 0, vertex_read = 0, vertex_written = 0;
  std::uint64_t record_reads = 0, record_writes = 0;
  for (const auto& k : r.cores) {
    record_reads += k.vertex_reads + k.refills;
    record_writes += k.vertex_writes + k.spills;
  }
  const bool private_vertices = cfg.topology != TopologyPreset::AllDisaggregated;
  for (std::size_t i = 0; i < r.channels.size(); ++i) {
    const auto& ch = r.channels[i];
    if (ch.role == ChannelRole::Edge) {
      edge_read += ch.stats.requested_read;
      edge_transferred += ch.stats.bytes_read;
      expect(ch.stats.bytes_written == 0, ch.name + " has edge writes");
      continue;
    }
    vertex_read += ch.stats.requested_read;
    vertex_written += ch.stats.requested_written;
    if (!private_vertices) continue;
    // Private vertex channel c belongs to core c.
    const CoreCounters& k = r.cores.at(i);
    expect(ch.stats.requested_read == kVertexRecordBytes * (k.vertex_reads + k.refills),
           ch.name + " read bytes != 16 x (vertex reads + refills)");
    expect(ch.stats.requested_written == kVertexRecordBytes * (k.vertex_writes + k.spills),
           ch.name + " written bytes != 16 x (vertex writes + spills)");
  }
  for (std::size_t c = 0; c < r.cores.size(); ++c) {
    const CoreCounters& k = r.cores[c];
    expect(k.vertex_reads == k.consumed, "core " + std::to_string(c) + " vertex reads != consumed");
    expect(k.vertex_writes == k.accepted, "core " + std::to_string(c) + " vertex writes != accepted");
  }
  expect(vertex_read == kVertexRecordBytes * record_reads,
         "vertex channel reads != 16 x (vertex reads + refills)");
  expect(vertex_written == kVertexRecordBytes * record_writes,
         "vertex channel writes != 16 x (vertex writes + spills)");
  expect(edge_read == sum.edge_burst_bytes, "edge channel reads != issued burst bytes");
  expect(edge_transferred == sum.edge_burst_bytes, "edge bursts not granularity aligned");

  for (std::size_t i = 0; i < a.series.size(); ++i) {
    for (double u : a.series[i]) {
      expect(u >= 0.0 && u <= 1.0, r.channels[i].name + " window utilization outside [0,1]");
    }
  }
  return bad;
}

}  // namespace tegra::test
