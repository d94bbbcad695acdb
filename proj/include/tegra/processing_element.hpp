#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "tegra/fabric.hpp"
#include "tegra/graph.hpp"
#include "tegra/memory.hpp"

namespace tegra {

enum class WorkloadKind { SSSP, BFS };

std::string_view to_string(WorkloadKind kind);

/// Relaxation rules. BFS is SSSP with every weight read as 1.
struct Workload {
  WorkloadKind kind = WorkloadKind::SSSP;

  static bool accept(std::uint32_t candidate, Distance stored) { return candidate < stored; }

  /// Throws ArithmeticOverflow if the result does not fit below the sentinel.
  Distance propagate(Distance distance, std::uint32_t weight) const;
};

/// Work handed from consumer to generator; captured at acceptance time.
struct ActiveEntry {
  EdgeIndex edge_offset = 0;
  std::uint64_t edge_count = 0;
  Distance distance = 0;

  friend bool operator==(const ActiveEntry&, const ActiveEntry&) = default;
};

/// Hardware FIFO of bounded capacity backed by an unbounded overflow region.
/// Pushes never block: once the hardware part is full (or anything is
/// already spilled) entries go to overflow. Refills move the oldest spilled
/// entry into the hardware part, so pops see global push order.
class ActiveList {
 public:
  explicit ActiveList(std::size_t hw_capacity);

  struct PushResult {
    bool spilled = false;
    std::uint64_t slot = 0;  // overflow ring slot, valid when spilled
  };

  PushResult push(const ActiveEntry& entry);

  bool empty() const { return hw_.empty() && overflow_.empty(); }
  std::size_t size() const { return hw_.size() + overflow_.size(); }
  std::size_t hw_size() const { return hw_.size(); }
  std::size_t overflow_size() const { return overflow_.size(); }
  std::size_t hw_capacity() const { return hw_capacity_; }

  /// Time at which the head entry is usable (refilled entries arrive late).
  Time front_ready() const { return hw_.front().ready; }
  ActiveEntry pop();

  bool can_refill() const { return !overflow_.empty() && hw_.size() < hw_capacity_; }
  /// Ring slot of the entry the next refill reads.
  std::uint64_t refill_slot() const { return refills_; }
  void refill(Time ready);

  std::uint64_t spills() const { return spills_; }
  std::uint64_t refills() const { return refills_; }

 private:
  struct Slot {
    ActiveEntry entry;
    Time ready;
  };
  std::size_t hw_capacity_;
  std::deque<Slot> hw_;
  std::deque<ActiveEntry> overflow_;
  std::uint64_t spills_ = 0;
  std::uint64_t refills_ = 0;
};

enum class ProcessStatus { Idle, Running, StalledOnMemory, StalledOnSend };

std::string_view to_string(ProcessStatus status);

/// What a scheduled wake-up should do when it fires.
enum class WakeKind : std::uint8_t {
  ConsumerPoll,
  ConsumerReadDone,
  Generator,
  Posted,  // completion of a write or refill nobody waits on
};

struct CoreCounters {
  std::uint64_t consumed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t generated = 0;
  std::uint64_t accepted_out_degree = 0;
  std::uint64_t preloaded = 0;
  std::uint64_t entries_processed = 0;
  std::uint64_t popped_out_degree = 0;
  std::uint64_t vertex_reads = 0;
  std::uint64_t vertex_writes = 0;
  std::uint64_t edge_bytes_requested = 0;
  std::uint64_t edge_bursts = 0;
  std::uint64_t edge_burst_bytes = 0;
  std::uint64_t spills = 0;
  std::uint64_t refills = 0;
  std::uint64_t send_stalls = 0;
};

/// Location of one entry's edges in its edge pool.
struct EdgeLocation {
  std::uint32_t pool = 0;
  std::uint64_t address = 0;      // byte address of the first edge
  std::uint64_t granularity = 0;  // burst size of the pool's channels
};

/// Services a core needs from the surrounding system.
class PeEnvironment {
 public:
  virtual ~PeEnvironment() = default;

  virtual const CsrGraph& graph() const = 0;
  virtual std::uint32_t owner(VertexId v) const = 0;
  virtual Distance& distance(VertexId v) = 0;

  /// Each returns the completion time of the access.
  virtual Time access_vertex(std::uint32_t core, VertexId v, bool is_write, Time now) = 0;
  virtual Time access_overflow(std::uint32_t core, std::uint64_t slot, bool is_write, Time now) = 0;
  virtual std::uint64_t overflow_capacity(std::uint32_t core) const = 0;
  virtual EdgeLocation locate_edges(std::uint32_t core, EdgeIndex edge_offset) const = 0;
  virtual Time read_edge_burst(std::uint32_t pool, std::uint64_t address, Time now) = 0;

  virtual std::optional<Time> send(std::uint32_t src, std::uint32_t dst, Message msg, Time now) = 0;
  virtual RecvResult recv(std::uint32_t core, Time now) = 0;

  virtual void schedule(Time at, std::uint32_t core, WakeKind kind) = 0;
};

struct PeParams {
  Workload workload;
  Time consume_cost = 1.0;
  Time generate_cost = 1.0;
  std::uint32_t active_list_capacity = 64;
  std::uint32_t max_outstanding_bursts = 8;
};

/// One core: a message consumer and a message generator sharing an active
/// list. Both are event-driven state machines; the environment owns time.
class ProcessingElement {
 public:
  ProcessingElement(std::uint32_t id, PeParams params);

  std::uint32_t id() const { return id_; }

  /// Seeds the active list without memory traffic (initial workload state).
  void preload(const ActiveEntry& entry);
  /// Wakes the generator if the active list holds work.
  void start(PeEnvironment& env, Time now);

  void on_message_arrival(PeEnvironment& env, Time now);
  void consumer_poll(PeEnvironment& env, Time now);
  void consumer_read_done(PeEnvironment& env, Time now);
  void generator_step(PeEnvironment& env, Time now);
  void on_unblocked(PeEnvironment& env, Time now);

  ProcessStatus consumer_status() const { return consumer_; }
  ProcessStatus generator_status() const { return generator_; }
  bool has_pending_message() const { return pending_.has_value(); }
  bool has_current_entry() const { return current_.has_value(); }
  const ActiveList& active_list() const { return active_; }
  const CoreCounters& counters() const { return counters_; }

  /// Both processes idle and no local work held.
  bool quiescent() const;

 private:
  struct Stream {
    ActiveEntry entry;
    EdgeLocation where;
    std::uint64_t first_burst_address = 0;
    std::uint64_t total_bursts = 0;
    std::uint64_t next_edge = 0;
    std::uint64_t bursts_issued = 0;
    std::uint64_t burst_base = 0;     // burst index of done.front()
    std::deque<Time> done;
  };

  void start_stream(PeEnvironment& env, const ActiveEntry& entry, Time now);
  void wake_generator(PeEnvironment& env, Time now);

  std::uint32_t id_;
  PeParams params_;
  ActiveList active_;
  ProcessStatus consumer_ = ProcessStatus::Idle;
  ProcessStatus generator_ = ProcessStatus::Idle;
  std::optional<Message> pending_;
  std::optional<Stream> current_;
  CoreCounters counters_;
};

/// Dijkstra reference solution; infinity for unreachable vertices.
std::vector<Distance> reference_distances(const CsrGraph& g, VertexId source, WorkloadKind kind);

}  // namespace tegra
