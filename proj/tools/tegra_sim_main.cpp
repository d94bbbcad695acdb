#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "tegra/config.hpp"
#include "tegra/engine.hpp"
#include "tegra/error.hpp"
#include "tegra/telemetry.hpp"

namespace {

using tegra::Error;
using tegra::ErrorCode;
using tegra::SimConfig;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir = "tegra-out";
  bool quiet = false;
};

// Flags shared by run and sweep. Each one is rewritten as a config override
// so that flag and file go through the same validation.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> topology;
  std::optional<std::uint32_t> cores;
  std::optional<unsigned> scale;
  std::optional<unsigned> edge_factor;
  std::optional<std::string> graph_path;
  std::optional<std::string> workload;
  std::optional<std::uint32_t> source;
  std::optional<double> window;

  // Sweep owns --cores as an axis, so it attaches without the scalar flag.
  void attach(CLI::App& cmd, bool scalar_cores) {
    cmd.add_option("-c,--config", config_path, "YAML config file")->check(CLI::ExistingFile);
    cmd.add_option("--set", sets, "Override a config field, e.g. --set fabric.hop_latency=40");
    cmd.add_option("--topology", topology, "system.topology");
    if (scalar_cores) cmd.add_option("--cores", cores, "system.cores");
    cmd.add_option("--scale", scale, "graph.scale");
    cmd.add_option("--edge-factor", edge_factor, "graph.edge_factor");
    cmd.add_option("--graph", graph_path, "graph.path (binary edge list; sets graph.source=file)");
    cmd.add_option("--workload", workload, "workload.kind (sssp or bfs)");
    cmd.add_option("--source", source, "workload.source");
    cmd.add_option("--window", window, "telemetry.window in ns");
  }

  SimConfig build(const GlobalOptions& g) const {
    SimConfig cfg = config_path.empty() ? SimConfig{} : tegra::load_config(config_path);
    auto set = [&](const std::string& key, const std::string& value) {
      tegra::apply_override(cfg, key + "=" + value);
    };
    if (g.seed) set("graph.seed", std::to_string(*g.seed));
    if (topology) set("system.topology", *topology);
    if (cores) set("system.cores", std::to_string(*cores));
    if (scale) set("graph.scale", std::to_string(*scale));
    if (edge_factor) set("graph.edge_factor", std::to_string(*edge_factor));
    if (graph_path) {
      set("graph.source", "file");
      set("graph.path", *graph_path);
    }
    if (workload) set("workload.kind", *workload);
    if (source) set("workload.source", std::to_string(*source));
    if (window) set("telemetry.window", std::to_string(*window));
    for (const auto& s : sets) tegra::apply_override(cfg, s);
    cfg.validate();
    return cfg;
  }
};

std::string default_label(const SimConfig& cfg) {
  return std::string(tegra::to_string(cfg.topology)) + "-" + std::to_string(cfg.num_cores) + "c";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::string summary_line(const tegra::RunArtifact& a) {
  std::ostringstream s;
  s << a.label << ": runtime_ns=" << tegra::format_fixed(a.report.runtime)
    << " mean_vertex_utilization=" << tegra::format_fixed(a.mean_vertex_utilization)
    << " mean_edge_utilization=" << tegra::format_fixed(a.mean_edge_utilization)
    << " messages=" << a.report.fabric.sent;
  return s.str();
}

// Returns true when the simulated distances equal the reference solver's.
bool check_oracle(const tegra::CsrGraph& g, const SimConfig& cfg, const tegra::SimReport& r,
                  std::string& detail) {
  const auto expected = tegra::reference_distances(g, cfg.source, cfg.workload);
  for (std::size_t v = 0; v < expected.size(); ++v) {
    if (expected[v] != r.distances[v]) {
      detail = "vertex " + std::to_string(v) + ": simulated " + std::to_string(r.distances[v]) +
               ", reference " + std::to_string(expected[v]);
      return false;
    }
  }
  return true;
}

int cmd_gen(const GlobalOptions& g, unsigned scale, unsigned edge_factor, bool uniform,
            std::uint64_t uniform_vertices, bool no_scramble, const std::string& output) {
  tegra::GraphSpec spec;
  spec.scale = scale;
  spec.edge_factor = edge_factor;
  spec.seed = g.seed.value_or(1);
  spec.scramble_ids = !no_scramble;
  if (uniform) {
    spec.kind = tegra::GraphSourceKind::Uniform;
    spec.uniform_vertices = uniform_vertices;
    spec.uniform_edges = uniform_vertices * edge_factor;
  }
  const auto graph = tegra::make_graph(spec);
  std::filesystem::path path = output;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  tegra::save_edge_list(path, *graph);
  if (!g.quiet) {
    std::cout << path.string() << ": vertices=" << graph->num_vertices()
              << " edges=" << graph->num_edges() << "\n";
  }
  return kExitOk;
}

int cmd_run(const GlobalOptions& g, const ConfigOptions& opts, std::string label, bool oracle) {
  const SimConfig cfg = opts.build(g);
  if (label.empty()) label = default_label(cfg);
  const auto graph = tegra::make_graph(cfg.graph);
  auto system = tegra::build_system(graph, cfg);
  auto artifact = tegra::make_artifact(label, cfg, system->run());
  const auto dir = std::filesystem::path(g.out_dir) / label;
  tegra::export_run(artifact, dir);
  if (!g.quiet) std::cout << summary_line(artifact) << "\n";
  if (oracle) {
    std::string detail;
    if (!check_oracle(*graph, cfg, artifact.report, detail)) {
      std::cerr << "oracle mismatch: " << detail << "\n";
      return kExitRuntime;
    }
    if (!g.quiet) std::cout << "oracle: distances match the reference solver\n";
  }
  return kExitOk;
}

struct SweepPoint {
  std::string label;
  SimConfig cfg;
};

unsigned sweep_threads(std::size_t points, unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("TEGRA_SIM_THREADS")) {
    try {
      const unsigned long v = std::stoul(cap);
      if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "TEGRA_SIM_THREADS: expected a positive integer");
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(points, 1)));
}

int cmd_sweep(const GlobalOptions& g, const ConfigOptions& opts, std::vector<std::uint32_t> cores,
              std::vector<std::string> topologies, std::vector<unsigned> scales,
              std::string baseline, unsigned requested_threads, bool oracle) {
  const SimConfig base = opts.build(g);
  if (cores.empty()) cores = {base.num_cores};
  if (topologies.empty()) topologies = {std::string(tegra::to_string(base.topology))};
  const bool scale_axis = !scales.empty();
  if (!scale_axis) scales = {base.graph.scale};
  if (scale_axis && base.graph.kind != tegra::GraphSourceKind::Rmat) {
    throw Error(ErrorCode::ConfigError, "--scales: requires graph.source rmat");
  }

  // The whole cross-product is validated before anything runs.
  std::vector<SweepPoint> points;
  for (unsigned s : scales) {
    for (const auto& t : topologies) {
      for (std::uint32_t c : cores) {
        SimConfig cfg = base;
        cfg.topology = tegra::parse_topology(t, "--topologies");
        cfg.num_cores = c;
        cfg.graph.scale = s;
        cfg.validate();
        std::string label = default_label(cfg);
        if (scale_axis) label += "-s" + std::to_string(s);
        if (std::any_of(points.begin(), points.end(),
                        [&](const SweepPoint& p) { return p.label == label; })) {
          throw Error(ErrorCode::ConfigError, "sweep: duplicate point " + label);
        }
        points.push_back({std::move(label), std::move(cfg)});
      }
    }
  }
  if (!baseline.empty() &&
      std::none_of(points.begin(), points.end(),
                   [&](const SweepPoint& p) { return p.label == baseline; })) {
    throw Error(ErrorCode::ConfigError, "--baseline: no sweep point labelled '" + baseline + "'");
  }

  // One graph per scale, shared read-only by every point on that scale.
  std::map<unsigned, std::shared_ptr<const tegra::CsrGraph>> graphs;
  for (unsigned s : scales) {
    tegra::GraphSpec spec = base.graph;
    spec.scale = s;
    graphs[s] = tegra::make_graph(spec);
  }

  const unsigned threads = sweep_threads(points.size(), requested_threads);
  std::vector<std::optional<tegra::RunSummary>> summaries(points.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex io;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      const SweepPoint& p = points[i];
      try {
        const auto& graph = graphs.at(p.cfg.graph.scale);
        auto system = tegra::build_system(graph, p.cfg);
        auto artifact = tegra::make_artifact(p.label, p.cfg, system->run());
        tegra::export_run(artifact, std::filesystem::path(g.out_dir) / p.label);
        std::string detail;
        if (oracle && !check_oracle(*graph, p.cfg, artifact.report, detail)) {
          throw std::runtime_error("oracle mismatch at " + detail);
        }
        summaries[i] = tegra::summarize(artifact);
        if (!g.quiet) {
          std::lock_guard lock(io);
          std::cout << summary_line(artifact) << "\n";
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        if (!failed.exchange(true)) first_error = p.label + ": " + e.what();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();

  if (failed) {
    std::cerr << "sweep aborted: " << first_error << "\n";
    return kExitRuntime;
  }

  // Rows only compare within one graph, so each scale gets its own table.
  for (unsigned s : scales) {
    std::vector<tegra::RunSummary> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].cfg.graph.scale == s) rows.push_back(*summaries[i]);
    }
    std::string base_label = rows.front().label;
    if (!baseline.empty()) {
      const bool here = std::any_of(rows.begin(), rows.end(),
                                    [&](const auto& r) { return r.label == baseline; });
      if (here) {
        base_label = baseline;
      } else if (scale_axis) {
        // Same topology and core count as the named baseline, on this scale.
        const auto cut = baseline.rfind("-s");
        const std::string candidate = baseline.substr(0, cut) + "-s" + std::to_string(s);
        if (std::any_of(rows.begin(), rows.end(),
                        [&](const auto& r) { return r.label == candidate; })) {
          base_label = candidate;
        }
      }
    }
    const auto table = tegra::compare(rows, base_label);
    const std::string name =
        scale_axis && scales.size() > 1 ? "comparison-s" + std::to_string(s) + ".csv"
                                        : "comparison.csv";
    write_text(std::filesystem::path(g.out_dir) / name, table.to_csv());
    if (!g.quiet) {
      std::cout << "\n" << name << " (baseline " << table.baseline << ")\n" << table.to_csv();
    }
  }
  return kExitOk;
}

int cmd_compare(const GlobalOptions& g, const std::vector<std::string>& inputs,
                std::string baseline, const std::string& output) {
  std::vector<tegra::RunSummary> rows;
  for (const auto& in : inputs) {
    std::filesystem::path path = in;
    if (std::filesystem::is_directory(path)) path /= "report.json";
    rows.push_back(tegra::summary_from_report(tegra::read_report(path)));
  }
  if (baseline.empty()) baseline = rows.front().label;
  const auto table = tegra::compare(rows, baseline);
  if (!output.empty()) {
    write_text(output, table.to_csv());
    if (!g.quiet) std::cout << "wrote " << output << "\n";
  } else {
    std::cout << table.to_csv();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of a scale-up graph machine with disaggregated memory",
               "tegra-sim"};
  app.require_subcommand(0, 1);
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Graph generator seed (graph.seed)")->configurable();
  app.add_option("--out-dir", global.out_dir, "Directory for run artifacts")->capture_default_str();
  app.add_flag("--quiet", global.quiet, "Suppress progress output");
  bool print_default = false;
  app.add_flag("--print-default-config", print_default, "Print a commented config template and exit");

  auto* gen = app.add_subcommand("gen", "Generate a graph and write it as a binary edge list");
  gen->fallthrough();
  unsigned gen_scale = 16, gen_edge_factor = 16;
  std::uint64_t gen_vertices = 1024;
  bool gen_uniform = false, gen_no_scramble = false;
  std::string gen_output;
  gen->add_option("--scale", gen_scale, "log2 of the vertex count (RMAT)")->capture_default_str();
  gen->add_option("--edge-factor", gen_edge_factor, "Edges per vertex")->capture_default_str();
  gen->add_flag("--uniform", gen_uniform, "Uniform random endpoints instead of RMAT");
  gen->add_option("--vertices", gen_vertices, "Vertex count for --uniform")->capture_default_str();
  gen->add_flag("--no-scramble", gen_no_scramble, "Keep raw RMAT vertex ids");
  gen->add_option("-o,--output", gen_output, "Output path")->required();

  auto* run = app.add_subcommand("run", "Run one simulation and export its artifacts");
  run->fallthrough();
  ConfigOptions run_opts;
  run_opts.attach(*run, true);
  std::string run_label;
  bool run_oracle = false;
  run->add_option("--label", run_label, "Artifact label (default <topology>-<cores>c)");
  run->add_flag("--check-oracle", run_oracle, "Verify distances against the reference solver");

  auto* sweep = app.add_subcommand("sweep", "Run a cross-product of configurations");
  sweep->fallthrough();
  ConfigOptions sweep_opts;
  sweep_opts.attach(*sweep, false);
  std::vector<std::uint32_t> sweep_cores;
  std::vector<std::string> sweep_topologies;
  std::vector<unsigned> sweep_scales;
  std::string sweep_baseline;
  unsigned sweep_jobs = 0;
  bool sweep_oracle = false;
  sweep->add_option("--cores", sweep_cores, "Core counts to sweep, e.g. 32,48,64")->delimiter(',');
  sweep->add_option("--topologies", sweep_topologies, "Presets to sweep, e.g. accelerator,tegra")->delimiter(',');
  sweep->add_option("--scales", sweep_scales, "RMAT scales to sweep")->delimiter(',');
  sweep->add_option("--baseline", sweep_baseline, "Label every row is normalized to");
  sweep->add_option("-j,--jobs", sweep_jobs, "Worker threads (0: all cores, capped by TEGRA_SIM_THREADS)");
  sweep->add_flag("--check-oracle", sweep_oracle, "Verify every run against the reference solver");

  auto* cmp = app.add_subcommand("compare", "Build a comparison table from exported reports");
  cmp->fallthrough();
  std::vector<std::string> cmp_inputs;
  std::string cmp_baseline, cmp_output;
  cmp->add_option("reports", cmp_inputs, "report.json files or run directories")->required();
  cmp->add_option("--baseline", cmp_baseline, "Baseline label (default: first input)");
  cmp->add_option("-o,--output", cmp_output, "Write the CSV here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (print_default) {
      std::cout << tegra::default_config_template();
      return kExitOk;
    }
    if (*gen) {
      return cmd_gen(global, gen_scale, gen_edge_factor, gen_uniform, gen_vertices,
                     gen_no_scramble, gen_output);
    }
    if (*run) return cmd_run(global, run_opts, run_label, run_oracle);
    if (*sweep) {
      return cmd_sweep(global, sweep_opts, sweep_cores, sweep_topologies, sweep_scales,
                       sweep_baseline, sweep_jobs, sweep_oracle);
    }
    if (*cmp) return cmd_compare(global, cmp_inputs, cmp_baseline, cmp_output);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::BadSource:
      case ErrorCode::BadProbabilities:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
