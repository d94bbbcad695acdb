#include "tegra/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "tegra/error.hpp"

namespace tegra {

std::string_view to_string(TopologyPreset preset) {
  switch (preset) {
    case TopologyPreset::Accelerator: return "accelerator";
    case TopologyPreset::AllDisaggregated: return "all_disaggregated";
    case TopologyPreset::Tegra: return "tegra";
  }
  return "unknown";
}

std::string_view to_string(GraphSourceKind kind) {
  switch (kind) {
    case GraphSourceKind::Rmat: return "rmat";
    case GraphSourceKind::Uniform: return "uniform";
    case GraphSourceKind::File: return "file";
  }
  return "unknown";
}

std::string_view to_string(PartitionScheme scheme) {
  return scheme == PartitionScheme::Modulo ? "modulo" : "range";
}

namespace {

[[noreturn]] void config_error(std::string_view field, const std::string& why) {
  throw Error(ErrorCode::ConfigError, std::string(field) + ": " + why);
}

std::string scalar_text(std::string_view field, const YAML::Node& node) {
  if (!node.IsScalar()) config_error(field, "expected a scalar value");
  return node.Scalar();
}

template <typename T>
T as_number(std::string_view field, const YAML::Node& node) {
  const std::string text = scalar_text(field, node);
  if constexpr (std::is_unsigned_v<T>) {
    if (!text.empty() && text.front() == '-') config_error(field, "expected a non-negative integer, got '" + text + "'");
  }
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_error(field, "cannot parse '" + text + "' as a number");
  }
}

bool as_bool(std::string_view field, const YAML::Node& node) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    config_error(field, "expected true or false, got '" + scalar_text(field, node) + "'");
  }
}

template <typename Enum>
Enum as_enum(std::string_view field, const YAML::Node& node,
             std::initializer_list<std::pair<std::string_view, Enum>> names) {
  const std::string text = scalar_text(field, node);
  std::string options;
  for (const auto& [name, value] : names) {
    if (text == name) return value;
    options += options.empty() ? "" : ", ";
    options += name;
  }
  config_error(field, "unknown value '" + text + "' (expected one of: " + options + ")");
}

using Json = nlohmann::json;

struct Field {
  std::string_view key;
  std::function<void(SimConfig&, const YAML::Node&)> set;
  std::function<Json(const SimConfig&)> get;
};

#define TEGRA_NUMBER_FIELD(KEY, MEMBER)                                                   \
  Field {                                                                                 \
    KEY, [](SimConfig& c, const YAML::Node& n) {                                          \
      c.MEMBER = as_number<std::remove_cvref_t<decltype(c.MEMBER)>>(KEY, n);              \
    },                                                                                    \
        [](const SimConfig& c) { return Json(c.MEMBER); }                                 \
  }

void set_channel_kind_fields(std::vector<Field>& fields, std::string_view prefix,
                             ChannelConfig SimConfig::*member);

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f = {
        {"graph.source",
         [](SimConfig& c, const YAML::Node& n) {
           c.graph.kind = as_enum<GraphSourceKind>("graph.source", n,
                                                   {{"rmat", GraphSourceKind::Rmat},
                                                    {"uniform", GraphSourceKind::Uniform},
                                                    {"file", GraphSourceKind::File}});
         },
         [](const SimConfig& c) { return Json(std::string(to_string(c.graph.kind))); }},
        {"graph.path",
         [](SimConfig& c, const YAML::Node& n) { c.graph.path = scalar_text("graph.path", n); },
         [](const SimConfig& c) { return Json(c.graph.path.string()); }},
        {"graph.format",
         [](SimConfig& c, const YAML::Node& n) {
           c.graph.format = as_enum<EdgeListFormat>(
               "graph.format", n,
               {{"binary", EdgeListFormat::Binary}, {"text", EdgeListFormat::PlainText}});
         },
         [](const SimConfig& c) {
           return Json(c.graph.format == EdgeListFormat::Binary ? "binary" : "text");
         }},
        TEGRA_NUMBER_FIELD("graph.scale", graph.scale),
        TEGRA_NUMBER_FIELD("graph.edge_factor", graph.edge_factor),
        {"graph.rmat_probs",
         [](SimConfig& c, const YAML::Node& n) {
           if (!n.IsSequence() || n.size() != 4) {
             config_error("graph.rmat_probs", "expected a list of four probabilities");
           }
           for (std::size_t i = 0; i < 4; ++i) {
             c.graph.rmat_probs[i] = as_number<double>("graph.rmat_probs", n[i]);
           }
         },
         [](const SimConfig& c) { return Json(c.graph.rmat_probs); }},
        {"graph.scramble_ids",
         [](SimConfig& c, const YAML::Node& n) {
           c.graph.scramble_ids = as_bool("graph.scramble_ids", n);
         },
         [](const SimConfig& c) { return Json(c.graph.scramble_ids); }},
        TEGRA_NUMBER_FIELD("graph.uniform_vertices", graph.uniform_vertices),
        TEGRA_NUMBER_FIELD("graph.uniform_edges", graph.uniform_edges),
        TEGRA_NUMBER_FIELD("graph.seed", graph.seed),
        {"system.topology",
         [](SimConfig& c, const YAML::Node& n) {
           c.topology = parse_topology(scalar_text("system.topology", n));
         },
         [](const SimConfig& c) { return Json(std::string(to_string(c.topology))); }},
        TEGRA_NUMBER_FIELD("system.cores", num_cores),
        {"system.partition",
         [](SimConfig& c, const YAML::Node& n) {
           c.partition = as_enum<PartitionScheme>(
               "system.partition", n,
               {{"modulo", PartitionScheme::Modulo}, {"range", PartitionScheme::Range}});
         },
         [](const SimConfig& c) { return Json(std::string(to_string(c.partition))); }},
        TEGRA_NUMBER_FIELD("system.disaggregation_latency", disaggregation_latency),
        TEGRA_NUMBER_FIELD("system.edge_pool_channels", edge_pool_channels),
        TEGRA_NUMBER_FIELD("system.edge_interleave", edge_interleave),
    };
    set_channel_kind_fields(f, "memory.hbm2", &SimConfig::hbm2);
    set_channel_kind_fields(f, "memory.ddr4", &SimConfig::ddr4);
    std::vector<Field> rest = {
        TEGRA_NUMBER_FIELD("fabric.hop_latency", fabric.hop_latency),
        TEGRA_NUMBER_FIELD("fabric.queue_capacity", fabric.queue_capacity),
        TEGRA_NUMBER_FIELD("fabric.injection_rate", fabric.injection_rate),
        {"workload.kind",
         [](SimConfig& c, const YAML::Node& n) {
           c.workload = as_enum<WorkloadKind>(
               "workload.kind", n, {{"sssp", WorkloadKind::SSSP}, {"bfs", WorkloadKind::BFS}});
         },
         [](const SimConfig& c) { return Json(std::string(to_string(c.workload))); }},
        TEGRA_NUMBER_FIELD("workload.source", source),
        TEGRA_NUMBER_FIELD("core.consume_cost", consume_cost),
        TEGRA_NUMBER_FIELD("core.generate_cost", generate_cost),
        TEGRA_NUMBER_FIELD("core.active_list_capacity", active_list_capacity),
        TEGRA_NUMBER_FIELD("core.max_outstanding_bursts", max_outstanding_bursts),
        TEGRA_NUMBER_FIELD("telemetry.window", telemetry_window),
        {"telemetry.export_distances",
         [](SimConfig& c, const YAML::Node& n) {
           c.export_distances = as_bool("telemetry.export_distances", n);
         },
         [](const SimConfig& c) { return Json(c.export_distances); }},
    };
    f.insert(f.end(), rest.begin(), rest.end());
    return f;
  }();
  return table;
}

// Channel blocks are keyed dynamically, so their key strings need stable storage.
void set_channel_kind_fields(std::vector<Field>& fields, std::string_view prefix,
                             ChannelConfig SimConfig::*member) {
  static std::set<std::string> keys;
  auto key = [&](std::string_view leaf) -> std::string_view {
    return *keys.insert(std::string(prefix) + "." + std::string(leaf)).first;
  };
  auto number = [&](std::string_view leaf, auto ChannelConfig::*field) {
    std::string_view k = key(leaf);
    fields.push_back(
        {k,
         [k, member, field](SimConfig& c, const YAML::Node& n) {
           using T = std::remove_cvref_t<decltype(c.*member.*field)>;
           (c.*member).*field = as_number<T>(k, n);
         },
         [member, field](const SimConfig& c) { return Json((c.*member).*field); }});
  };
  number("bandwidth", &ChannelConfig::bandwidth);
  number("base_latency", &ChannelConfig::base_latency);
  number("granularity", &ChannelConfig::access_granularity);
  number("capacity", &ChannelConfig::capacity);
  number("pseudo_channels", &ChannelConfig::pseudo_channels);
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

void apply_node(SimConfig& cfg, const YAML::Node& node, const std::string& prefix) {
  if (!node.IsMap()) config_error(prefix.empty() ? "<root>" : prefix, "expected a section");
  for (const auto& kv : node) {
    const std::string name = kv.first.as<std::string>();
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (const Field* f = find_field(key)) {
      f->set(cfg, kv.second);
    } else if (kv.second.IsMap()) {
      apply_node(cfg, kv.second, key);
    } else {
      config_error(key, "unknown key");
    }
  }
}

}  // namespace

TopologyPreset parse_topology(std::string_view text, std::string_view field) {
  YAML::Node n(std::string{text});
  return as_enum<TopologyPreset>(field, n,
                                 {{"accelerator", TopologyPreset::Accelerator},
                                  {"all_disaggregated", TopologyPreset::AllDisaggregated},
                                  {"tegra", TopologyPreset::Tegra}});
}

void SimConfig::validate() const {
  if (num_cores == 0) config_error("system.cores", "must be >= 1");
  if (graph.kind == GraphSourceKind::File && graph.path.empty()) {
    config_error("graph.path", "required when graph.source is file");
  }
  if (graph.kind == GraphSourceKind::Rmat && graph.scale > 24) {
    config_error("graph.scale", "must be <= 24");
  }
  if (graph.kind == GraphSourceKind::Uniform && graph.uniform_vertices == 0) {
    config_error("graph.uniform_vertices", "must be >= 1");
  }
  if (!(disaggregation_latency >= 0)) config_error("system.disaggregation_latency", "must be >= 0");
  if (edge_interleave == 0 || (edge_interleave & (edge_interleave - 1)) != 0) {
    config_error("system.edge_interleave", "must be a power of two");
  }
  hbm2.validate("memory.hbm2");
  ddr4.validate("memory.ddr4");
  if (edge_interleave % ddr4.access_granularity != 0) {
    config_error("system.edge_interleave", "must be a multiple of memory.ddr4.granularity");
  }
  fabric.validate("fabric");
  if (!(consume_cost >= 0)) config_error("core.consume_cost", "must be >= 0");
  if (!(generate_cost > 0)) config_error("core.generate_cost", "must be > 0");
  if (active_list_capacity == 0) config_error("core.active_list_capacity", "must be >= 1");
  if (max_outstanding_bursts == 0) config_error("core.max_outstanding_bursts", "must be >= 1");
  if (!(telemetry_window >= 0)) config_error("telemetry.window", "must be >= 0");
}

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
  if (!root.IsNull()) apply_node(cfg, root, "");
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(SimConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    config_error(assignment, "override must look like section.key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const Field* f = find_field(key);
  if (!f) config_error(key, "unknown key");
  YAML::Node value;
  try {
    value = YAML::Load(std::string(assignment.substr(eq + 1)));
  } catch (const YAML::Exception& e) {
    config_error(key, std::string("malformed value: ") + e.what());
  }
  f->set(cfg, value);
}

Json config_to_json(const SimConfig& cfg) {
  Json out = Json::object();
  for (const Field& f : fields()) {
    out[Json::json_pointer("/" + [&] {
      std::string p(f.key);
      for (char& ch : p) {
        if (ch == '.') ch = '/';
      }
      return p;
    }())] = f.get(cfg);
  }
  return out;
}

std::string default_config_template() {
  return R"(# Simulator experiment configuration. Every value shown is the default.

graph:
  source: rmat              # rmat | uniform | file
  path: ""                  # edge-list file when source is file
  format: binary            # binary (TGRA) | text ("src dst [weight]" lines)
  scale: 16                 # rmat: 2^scale vertices (<= 24)
  edge_factor: 16           # rmat: edges per vertex
  rmat_probs: [0.57, 0.19, 0.19, 0.05]
  scramble_ids: true        # rmat: relabel vertices with a seeded bijection
  uniform_vertices: 1024    # uniform: vertex count
  uniform_edges: 16384      # uniform: edge count
  seed: 1                   # generator seed (--seed overrides)

system:
  topology: tegra           # accelerator | all_disaggregated | tegra
  cores: 32
  partition: modulo         # modulo | range
  disaggregation_latency: 150   # ns added to every disaggregated channel
  edge_pool_channels: 0     # shared DDR4 edge pool size; 0 = one per 8 cores
  edge_interleave: 256      # bytes per channel before the edge pool wraps

memory:
  hbm2:                     # one stack per core, holds vertex records
    bandwidth: 32           # bytes/ns per pseudo-channel
    base_latency: 30        # ns
    granularity: 32         # bytes per burst
    capacity: 4294967296    # bytes per stack
    pseudo_channels: 8
  ddr4:                     # edge memory
    bandwidth: 19.2
    base_latency: 50
    granularity: 64
    capacity: 17179869184
    pseudo_channels: 1

fabric:
  hop_latency: 50           # ns, any source to any destination
  queue_capacity: 1024      # messages per core queue
  injection_rate: 1         # messages per ns per source port

workload:
  kind: sssp                # sssp | bfs
  source: 0

core:
  consume_cost: 1           # ns per consumed message
  generate_cost: 1          # ns per generated message
  active_list_capacity: 64  # hardware entries before spilling to memory
  max_outstanding_bursts: 8 # edge bursts in flight per generator

telemetry:
  window: 0                 # ns per utilization sample; 0 = runtime / 100
  export_distances: false   # write the full distance vector
)";
}

}  // namespace tegra
