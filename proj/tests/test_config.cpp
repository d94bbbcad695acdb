#include "doctest.h"

#include "tegra/config.hpp"
#include "tegra/error.hpp"

using namespace tegra;

namespace {

std::string error_text(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError for: " << yaml);
  return {};
}

}  // namespace

TEST_CASE("template parses back to the defaults") {
  const SimConfig parsed = parse_config(default_config_template());
  CHECK(config_to_json(parsed) == config_to_json(SimConfig{}));
}

TEST_CASE("empty document is the defaults") {
  CHECK(config_to_json(parse_config("")) == config_to_json(SimConfig{}));
}

TEST_CASE("fields are read from their sections") {
  auto cfg = parse_config(
      "system:\n  topology: accelerator\n  cores: 48\n"
      "memory:\n  ddr4:\n    bandwidth: 25.6\n"
      "fabric:\n  queue_capacity: 2\n"
      "workload:\n  kind: bfs\n  source: 3\n");
  CHECK(cfg.topology == TopologyPreset::Accelerator);
  CHECK(cfg.num_cores == 48);
  CHECK(cfg.ddr4.bandwidth == 25.6);
  CHECK(cfg.fabric.queue_capacity == 2);
  CHECK(cfg.workload == WorkloadKind::BFS);
  CHECK(cfg.source == 3);
}

TEST_CASE("errors name the offending field") {
  CHECK(error_text("system:\n  topology: mesh\n").find("system.topology") != std::string::npos);
  CHECK(error_text("system:\n  cores: lots\n").find("system.cores") != std::string::npos);
  CHECK(error_text("system:\n  colors: 3\n").find("system.colors") != std::string::npos);
  CHECK(error_text("fabric:\n  queue_capacity: 0\n").find("fabric.queue_capacity") !=
        std::string::npos);
  CHECK(error_text("memory:\n  hbm2:\n    granularity: 48\n").find("memory.hbm2.granularity") !=
        std::string::npos);
}

TEST_CASE("overrides use the same keys") {
  SimConfig cfg;
  apply_override(cfg, "system.cores=64");
  apply_override(cfg, "system.topology=all_disaggregated");
  apply_override(cfg, "graph.rmat_probs=[0.25,0.25,0.25,0.25]");
  CHECK(cfg.num_cores == 64);
  CHECK(cfg.topology == TopologyPreset::AllDisaggregated);
  CHECK(cfg.graph.rmat_probs[3] == 0.25);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "system.cores=-1"), Error);
}

TEST_CASE("edge pool defaults to one channel per eight cores") {
  SimConfig cfg;
  cfg.num_cores = 32;
  CHECK(cfg.effective_edge_pool_channels() == 4);
  cfg.num_cores = 33;
  CHECK(cfg.effective_edge_pool_channels() == 5);
  cfg.edge_pool_channels = 2;
  CHECK(cfg.effective_edge_pool_channels() == 2);
}
