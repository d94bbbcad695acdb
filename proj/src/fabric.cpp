#include "tegra/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tegra/error.hpp"

namespace tegra {

std::array<std::uint8_t, 8> Message::to_bytes() const {
  std::array<std::uint8_t, 8> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = static_cast<std::uint8_t>(dest_vertex >> (8 * i));
    out[4 + i] = static_cast<std::uint8_t>(value >> (8 * i));
  }
  return out;
}

Message Message::from_bytes(const std::array<std::uint8_t, 8>& bytes) {
  Message m;
  for (int i = 0; i < 4; ++i) {
    m.dest_vertex |= std::uint32_t{bytes[i]} << (8 * i);
    m.value |= std::uint32_t{bytes[4 + i]} << (8 * i);
  }
  return m;
}

void FabricConfig::validate(std::string_view field_prefix) const {
  auto fail = [&](std::string_view field) {
    throw Error(ErrorCode::ConfigError,
                std::string(field_prefix) + "." + std::string(field) + ": must be > 0");
  };
  if (!(hop_latency > 0) || !std::isfinite(hop_latency)) fail("hop_latency");
  if (queue_capacity == 0) fail("queue_capacity");
  if (!(injection_rate > 0) || !std::isfinite(injection_rate)) fail("injection_rate");
}

Fabric::Fabric(std::uint32_t num_cores, FabricConfig config)
    : num_cores_(num_cores), config_(config), queues_(num_cores), port_free_(num_cores, 0.0) {
  config_.validate("fabric");
  counters_.num_cores = num_cores;
  counters_.link_counts.assign(std::size_t{num_cores} * num_cores, 0);
  counters_.blocked_time.assign(num_cores, 0.0);
  counters_.high_water.assign(num_cores, 0);
}

Time Fabric::inject(std::uint32_t src, std::uint32_t dst, Message msg, Time now) {
  const Time depart = std::max(now, port_free_[src]);
  port_free_[src] = depart + 1.0 / config_.injection_rate;
  const Time arrival = depart + config_.hop_latency;
  Queue& q = queues_[dst];
  q.slots.push({arrival, seq_++, msg});
  counters_.high_water[dst] =
      std::max(counters_.high_water[dst], static_cast<std::uint32_t>(q.slots.size()));
  return arrival;
}

std::optional<Time> Fabric::send(std::uint32_t src, std::uint32_t dst, Message msg, Time now) {
  ++counters_.sent;
  ++counters_.link_counts[std::size_t{src} * num_cores_ + dst];
  Queue& q = queues_[dst];
  if (q.slots.size() >= config_.queue_capacity) {
    ++counters_.blocked_sends;
    q.waiters.push_back({src, msg, now});
    return std::nullopt;
  }
  return inject(src, dst, msg, now);
}

RecvResult Fabric::recv(std::uint32_t core, Time now) {
  RecvResult result;
  Queue& q = queues_[core];
  if (q.slots.empty() || q.slots.top().arrival > now) return result;
  result.message = q.slots.top().msg;
  q.slots.pop();
  ++counters_.delivered;
  if (!q.waiters.empty()) {
    Waiter w = q.waiters.front();
    q.waiters.pop_front();
    counters_.blocked_time[w.sender] += now - w.since;
    result.unblocked = Unblocked{w.sender, inject(w.sender, core, w.msg, now)};
  }
  return result;
}

bool Fabric::idle(std::uint32_t core) const {
  return queues_[core].slots.empty() && queues_[core].waiters.empty();
}

std::optional<Time> Fabric::next_arrival(std::uint32_t core) const {
  if (queues_[core].slots.empty()) return std::nullopt;
  return queues_[core].slots.top().arrival;
}

std::uint32_t Fabric::occupancy(std::uint32_t core) const {
  return static_cast<std::uint32_t>(queues_[core].slots.size());
}

}  // namespace tegra
