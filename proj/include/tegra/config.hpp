#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "tegra/fabric.hpp"
#include "tegra/graph.hpp"
#include "tegra/memory.hpp"
#include "tegra/processing_element.hpp"

namespace tegra {

enum class TopologyPreset { Accelerator, AllDisaggregated, Tegra };
enum class GraphSourceKind { Rmat, Uniform, File };

std::string_view to_string(TopologyPreset preset);
std::string_view to_string(GraphSourceKind kind);
std::string_view to_string(PartitionScheme scheme);

/// Throws ConfigError naming `field` when the text is not a known value.
TopologyPreset parse_topology(std::string_view text, std::string_view field = "system.topology");

struct GraphSpec {
  GraphSourceKind kind = GraphSourceKind::Rmat;
  std::filesystem::path path;
  EdgeListFormat format = EdgeListFormat::Binary;
  unsigned scale = 16;
  unsigned edge_factor = 16;
  std::array<double, 4> rmat_probs{0.57, 0.19, 0.19, 0.05};
  bool scramble_ids = true;
  std::uint64_t uniform_vertices = 1024;
  std::uint64_t uniform_edges = 16384;
  std::uint64_t seed = 1;
};

struct SimConfig {
  GraphSpec graph;

  TopologyPreset topology = TopologyPreset::Tegra;
  std::uint32_t num_cores = 32;
  PartitionScheme partition = PartitionScheme::Modulo;
  Time disaggregation_latency = 150.0;
  std::uint32_t edge_pool_channels = 0;  // 0: one DDR4 channel per 8 cores
  std::uint64_t edge_interleave = 256;

  ChannelConfig hbm2 = ChannelConfig::hbm2();
  ChannelConfig ddr4 = ChannelConfig::ddr4();

  FabricConfig fabric;

  WorkloadKind workload = WorkloadKind::SSSP;
  VertexId source = 0;

  Time consume_cost = 1.0;
  Time generate_cost = 1.0;
  std::uint32_t active_list_capacity = 64;
  std::uint32_t max_outstanding_bursts = 8;

  Time telemetry_window = 0.0;  // 0: runtime / 100
  bool export_distances = false;

  std::uint32_t effective_edge_pool_channels() const {
    return edge_pool_channels != 0 ? edge_pool_channels : (num_cores + 7) / 8;
  }

  /// Throws ConfigError with the offending field path.
  void validate() const;
};

/// Parses the structured-text (YAML) config document over the defaults and
/// validates the result.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Fully commented template whose values are the defaults.
std::string default_config_template();

/// Canonical echo of every field, using the config document's key names.
nlohmann::json config_to_json(const SimConfig& cfg);

/// Applies "section.key=value" with the same rules as the config file.
void apply_override(SimConfig& cfg, std::string_view assignment);

}  // namespace tegra
