#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "tegra/graph.hpp"
#include "tegra/memory.hpp"

namespace tegra {

/// Vertex update carried by the fabric: target vertex and candidate value.
struct Message {
  VertexId dest_vertex = 0;
  std::uint32_t value = 0;

  std::array<std::uint8_t, 8> to_bytes() const;
  static Message from_bytes(const std::array<std::uint8_t, 8>& bytes);

  friend bool operator==(const Message&, const Message&) = default;
};

static_assert(sizeof(Message) == 8);

struct FabricConfig {
  Time hop_latency = 50.0;
  std::uint32_t queue_capacity = 1024;
  double injection_rate = 1.0;  // messages per ns per source port

  void validate(std::string_view field_prefix) const;
};

struct FabricCounters {
  std::uint32_t num_cores = 0;
  std::vector<std::uint64_t> link_counts;  // row-major [src][dst]
  std::vector<Time> blocked_time;          // per sender
  std::vector<std::uint32_t> high_water;   // per destination queue
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t blocked_sends = 0;

  std::uint64_t link(std::uint32_t src, std::uint32_t dst) const {
    return link_counts[std::size_t{src} * num_cores + dst];
  }
};

/// Sender whose held message was injected when a slot freed.
struct Unblocked {
  std::uint32_t sender = 0;
  Time arrival = 0;
};

struct RecvResult {
  std::optional<Message> message;
  std::optional<Unblocked> unblocked;
};

/// All-to-all crossbar of per-core bounded FIFO queues. A slot in the
/// destination queue is reserved when a message is injected, so occupancy
/// counts in-flight messages and never exceeds capacity. A send into a full
/// queue is held by the fabric (never dropped) and injected when the owner
/// pops.
class Fabric {
 public:
  Fabric(std::uint32_t num_cores, FabricConfig config);

  /// Returns the arrival time, or nullopt if the sender is now blocked. A
  /// blocked sender must not send again until reported in RecvResult.
  std::optional<Time> send(std::uint32_t src, std::uint32_t dst, Message msg, Time now);

  /// Pops the head message if it has arrived by `now`.
  RecvResult recv(std::uint32_t core, Time now);

  /// No message queued, in flight, or held for this core.
  bool idle(std::uint32_t core) const;
  std::optional<Time> next_arrival(std::uint32_t core) const;
  std::uint32_t occupancy(std::uint32_t core) const;
  std::size_t blocked_senders(std::uint32_t core) const { return queues_[core].waiters.size(); }

  std::uint32_t num_cores() const { return num_cores_; }
  const FabricConfig& config() const { return config_; }
  const FabricCounters& counters() const { return counters_; }

 private:
  struct Slot {
    Time arrival;
    std::uint64_t seq;
    Message msg;
    bool operator>(const Slot& o) const {
      return arrival != o.arrival ? arrival > o.arrival : seq > o.seq;
    }
  };
  struct Waiter {
    std::uint32_t sender;
    Message msg;
    Time since;
  };
  struct Queue {
    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> slots;
    std::deque<Waiter> waiters;
  };

  Time inject(std::uint32_t src, std::uint32_t dst, Message msg, Time now);

  std::uint32_t num_cores_;
  FabricConfig config_;
  std::vector<Queue> queues_;
  std::vector<Time> port_free_;
  FabricCounters counters_;
  std::uint64_t seq_ = 0;
};

}  // namespace tegra
