#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "tegra/config.hpp"
#include "tegra/fabric.hpp"
#include "tegra/graph.hpp"
#include "tegra/layout.hpp"
#include "tegra/memory.hpp"
#include "tegra/processing_element.hpp"

namespace tegra {

enum class EventKind : std::uint8_t { MessageArrival, MemCompletion, ProcessWake };

struct Event {
  Time time = 0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::ProcessWake;
  std::uint32_t core = 0;
  WakeKind wake = WakeKind::Generator;
};

/// Min-heap on (time, sequence). Sequence numbers are assigned at push.
class EventQueue {
 public:
  void push(Time time, EventKind kind, std::uint32_t core, WakeKind wake);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

enum class ChannelRole { Vertex, Edge };

struct ChannelReport {
  std::string name;
  ChannelRole role = ChannelRole::Vertex;
  ChannelConfig config;
  ChannelStats stats;
};

struct SimReport {
  Time runtime = 0;
  std::uint64_t events_executed = 0;
  std::vector<ChannelReport> channels;
  FabricCounters fabric;
  std::vector<CoreCounters> cores;
  std::uint64_t graph_digest = 0;
  std::uint64_t distance_digest = 0;
  std::vector<Distance> distances;
};

std::uint64_t distance_digest(const std::vector<Distance>& distances);

/// The channel inventory and pool wiring for a topology preset.
struct BuiltMemory {
  MemorySystem memory;
  std::vector<ChannelRole> roles;
  MemoryTopology topology;
};

BuiltMemory build_memory(const SimConfig& cfg);

/// One simulated machine: cores, channels, fabric and address map bound to
/// a graph, with the workload initialised. Single-threaded.
class System final : private PeEnvironment {
 public:
  System(std::shared_ptr<const CsrGraph> graph, const SimConfig& cfg);

  System(const System&) = delete;
  System& operator=(const System&) = delete;

  /// Executes the next event. Returns false when none remain.
  bool step();

  /// Runs to quiescence. Throws NoProgress if events run out first.
  SimReport run();

  /// Exhaustive scan of every queue, list and process.
  bool quiescent() const;
  /// Incrementally maintained count of outstanding work items.
  std::uint64_t pending_work() const;

  Time now() const { return now_; }
  const SimConfig& config() const { return cfg_; }
  const CsrGraph& graph() const override { return *graph_; }
  const MemorySystem& memory() const { return memory_; }
  const Fabric& fabric() const { return fabric_; }
  const AddressMap& address_map() const { return map_; }
  const std::vector<ProcessingElement>& cores() const { return cores_; }
  const std::vector<ChannelRole>& channel_roles() const { return roles_; }
  const std::vector<Distance>& distances() const { return distances_; }
  std::size_t pending_events() const { return events_.size(); }

  SimReport report() const;

  /// Called after every executed event (tests use it for invariant scans).
  void set_observer(std::function<void(const System&, const Event&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  std::uint32_t owner(VertexId v) const override { return partition_.owner(v); }
  Distance& distance(VertexId v) override;
  Time access_vertex(std::uint32_t core, VertexId v, bool is_write, Time now) override;
  Time access_overflow(std::uint32_t core, std::uint64_t slot, bool is_write, Time now) override;
  std::uint64_t overflow_capacity(std::uint32_t core) const override;
  EdgeLocation locate_edges(std::uint32_t core, EdgeIndex edge_offset) const override;
  Time read_edge_burst(std::uint32_t pool, std::uint64_t address, Time now) override;
  std::optional<Time> send(std::uint32_t src, std::uint32_t dst, Message msg, Time now) override;
  RecvResult recv(std::uint32_t core, Time now) override;
  void schedule(Time at, std::uint32_t core, WakeKind kind) override;

  Time pool_access(std::uint32_t pool, std::uint64_t address, std::uint64_t size, bool is_write,
                   Time now);

  std::shared_ptr<const CsrGraph> graph_;
  SimConfig cfg_;
  Partition partition_;
  MemorySystem memory_;
  std::vector<ChannelRole> roles_;
  AddressMap map_;
  Fabric fabric_;
  std::vector<ProcessingElement> cores_;
  std::vector<Distance> distances_;
  EventQueue events_;
  Time now_ = 0;
  Time last_event_ = 0;
  std::uint64_t executed_ = 0;
  std::function<void(const System&, const Event&)> observer_;
};

/// Builds and validates; throws ConfigError or BadSource.
std::unique_ptr<System> build_system(std::shared_ptr<const CsrGraph> graph, const SimConfig& cfg);

/// Materialises the graph named by the config.
std::shared_ptr<const CsrGraph> make_graph(const GraphSpec& spec);

}  // namespace tegra
