#include "tegra/processing_element.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <queue>
#include <string>

#include "tegra/error.hpp"

namespace tegra {

std::string_view to_string(WorkloadKind kind) { return kind == WorkloadKind::SSSP ? "sssp" : "bfs"; }

std::string_view to_string(ProcessStatus status) {
  switch (status) {
    case ProcessStatus::Idle: return "idle";
    case ProcessStatus::Running: return "running";
    case ProcessStatus::StalledOnMemory: return "stalled_on_memory";
    case ProcessStatus::StalledOnSend: return "stalled_on_send";
  }
  return "unknown";
}

Distance Workload::propagate(Distance distance, std::uint32_t weight) const {
  const std::uint64_t w = kind == WorkloadKind::BFS ? 1 : weight;
  const std::uint64_t sum = std::uint64_t{distance} + w;
  if (sum >= kInfinity) {
    throw Error(ErrorCode::ArithmeticOverflow,
                std::to_string(distance) + " + " + std::to_string(w) + " exceeds 32-bit range");
  }
  return static_cast<Distance>(sum);
}

ActiveList::ActiveList(std::size_t hw_capacity) : hw_capacity_(hw_capacity) {
  if (hw_capacity == 0) throw Error(ErrorCode::ConfigError, "active list capacity must be >= 1");
}

ActiveList::PushResult ActiveList::push(const ActiveEntry& entry) {
  if (overflow_.empty() && hw_.size() < hw_capacity_) {
    hw_.push_back({entry, 0.0});
    return {};
  }
  overflow_.push_back(entry);
  return {true, spills_++};
}

ActiveEntry ActiveList::pop() {
  assert(!hw_.empty());
  ActiveEntry e = hw_.front().entry;
  hw_.pop_front();
  return e;
}

void ActiveList::refill(Time ready) {
  assert(can_refill());
  hw_.push_back({overflow_.front(), ready});
  overflow_.pop_front();
  ++refills_;
}

ProcessingElement::ProcessingElement(std::uint32_t id, PeParams params)
    : id_(id), params_(params), active_(params.active_list_capacity) {
  if (params_.max_outstanding_bursts == 0) {
    throw Error(ErrorCode::ConfigError, "core.max_outstanding_bursts must be >= 1");
  }
}

void ProcessingElement::preload(const ActiveEntry& entry) {
  active_.push(entry);
  ++counters_.preloaded;
}

void ProcessingElement::start(PeEnvironment& env, Time now) {
  if (!active_.empty() && generator_ == ProcessStatus::Idle) wake_generator(env, now);
}

bool ProcessingElement::quiescent() const {
  return consumer_ == ProcessStatus::Idle && generator_ == ProcessStatus::Idle && !pending_ &&
         !current_ && active_.empty();
}

void ProcessingElement::on_message_arrival(PeEnvironment& env, Time now) {
  if (consumer_ == ProcessStatus::Idle) consumer_poll(env, now);
}

void ProcessingElement::consumer_poll(PeEnvironment& env, Time now) {
  RecvResult r = env.recv(id_, now);
  if (!r.message) {
    consumer_ = ProcessStatus::Idle;
    return;
  }
  ++counters_.consumed;
  pending_ = *r.message;
  consumer_ = ProcessStatus::StalledOnMemory;
  ++counters_.vertex_reads;
  env.schedule(env.access_vertex(id_, pending_->dest_vertex, false, now), id_,
               WakeKind::ConsumerReadDone);
}

void ProcessingElement::consumer_read_done(PeEnvironment& env, Time now) {
  assert(pending_);
  const Message msg = *pending_;
  pending_.reset();
  Distance& stored = env.distance(msg.dest_vertex);
  if (Workload::accept(msg.value, stored)) {
    stored = msg.value;
    ++counters_.accepted;
    ++counters_.vertex_writes;
    env.schedule(env.access_vertex(id_, msg.dest_vertex, true, now), id_, WakeKind::Posted);

    const CsrGraph& g = env.graph();
    ActiveEntry entry{g.edge_offset(msg.dest_vertex), g.degree(msg.dest_vertex), msg.value};
    counters_.accepted_out_degree += entry.edge_count;
    auto pushed = active_.push(entry);
    if (pushed.spilled) {
      if (active_.overflow_size() > env.overflow_capacity(id_)) {
        throw Error(ErrorCode::OverflowRegionFull,
                    "core " + std::to_string(id_) + " overflow holds " +
                        std::to_string(active_.overflow_size()) + " entries");
      }
      ++counters_.spills;
      env.schedule(env.access_overflow(id_, pushed.slot, true, now), id_, WakeKind::Posted);
    }
    if (generator_ == ProcessStatus::Idle) wake_generator(env, now);
  } else {
    ++counters_.rejected;
  }
  consumer_ = ProcessStatus::Running;
  env.schedule(now + params_.consume_cost, id_, WakeKind::ConsumerPoll);
}

void ProcessingElement::wake_generator(PeEnvironment& env, Time now) {
  generator_ = ProcessStatus::Running;
  env.schedule(now, id_, WakeKind::Generator);
}

void ProcessingElement::start_stream(PeEnvironment& env, const ActiveEntry& entry, Time now) {
  (void)now;
  Stream s;
  s.entry = entry;
  s.where = env.locate_edges(id_, entry.edge_offset);
  const std::uint64_t g = s.where.granularity;
  const std::uint64_t begin = s.where.address;
  const std::uint64_t end = begin + entry.edge_count * kEdgeBytes;
  s.first_burst_address = begin / g * g;
  s.total_bursts = (end - s.first_burst_address + g - 1) / g;
  counters_.edge_bytes_requested += entry.edge_count * kEdgeBytes;
  current_ = std::move(s);
}

void ProcessingElement::generator_step(PeEnvironment& env, Time now) {
  for (;;) {
    if (!current_) {
      if (active_.empty()) {
        generator_ = ProcessStatus::Idle;
        return;
      }
      assert(active_.hw_size() > 0);
      if (active_.front_ready() > now) {
        generator_ = ProcessStatus::StalledOnMemory;
        env.schedule(active_.front_ready(), id_, WakeKind::Generator);
        return;
      }
      ActiveEntry entry = active_.pop();
      ++counters_.entries_processed;
      counters_.popped_out_degree += entry.edge_count;
      if (active_.can_refill()) {
        Time ready = env.access_overflow(id_, active_.refill_slot(), false, now);
        active_.refill(ready);
        ++counters_.refills;
        env.schedule(ready, id_, WakeKind::Posted);
      }
      if (entry.edge_count == 0) continue;
      start_stream(env, entry, now);
    }

    Stream& s = *current_;
    const std::uint64_t g = s.where.granularity;
    const std::uint64_t edge_address = s.where.address + s.next_edge * kEdgeBytes;
    const std::uint64_t burst = (edge_address - s.first_burst_address) / g;
    const std::uint64_t horizon =
        std::min(s.total_bursts, burst + params_.max_outstanding_bursts);
    while (s.bursts_issued < horizon) {
      s.done.push_back(
          env.read_edge_burst(s.where.pool, s.first_burst_address + s.bursts_issued * g, now));
      ++s.bursts_issued;
      ++counters_.edge_bursts;
      counters_.edge_burst_bytes += g;
    }
    while (s.burst_base < burst) {
      s.done.pop_front();
      ++s.burst_base;
    }
    if (s.done.front() > now) {
      generator_ = ProcessStatus::StalledOnMemory;
      env.schedule(s.done.front(), id_, WakeKind::Generator);
      return;
    }

    const CsrGraph& g_ref = env.graph();
    const EdgeIndex e = s.entry.edge_offset + s.next_edge;
    const VertexId dst = g_ref.dests()[e];
    const Message msg{dst, params_.workload.propagate(s.entry.distance, g_ref.weights()[e])};
    if (++s.next_edge == s.entry.edge_count) current_.reset();
    ++counters_.generated;

    if (!env.send(id_, env.owner(dst), msg, now)) {
      ++counters_.send_stalls;
      generator_ = ProcessStatus::StalledOnSend;
      return;
    }
    generator_ = ProcessStatus::Running;
    env.schedule(now + params_.generate_cost, id_, WakeKind::Generator);
    return;
  }
}

void ProcessingElement::on_unblocked(PeEnvironment& env, Time now) {
  assert(generator_ == ProcessStatus::StalledOnSend);
  generator_ = ProcessStatus::Running;
  env.schedule(now + params_.generate_cost, id_, WakeKind::Generator);
}

std::vector<Distance> reference_distances(const CsrGraph& g, VertexId source, WorkloadKind kind) {
  if (source >= g.num_vertices()) {
    throw Error(ErrorCode::BadSource, "source " + std::to_string(source) + " with " +
                                          std::to_string(g.num_vertices()) + " vertices");
  }
  std::vector<std::uint64_t> dist(g.num_vertices(), std::numeric_limits<std::uint64_t>::max());
  using Item = std::pair<std::uint64_t, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0;
  heap.push({0, source});
  auto dests = g.dests();
  auto weights = g.weights();
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d != dist[v]) continue;
    for (EdgeIndex e = g.edge_offset(v); e < g.edge_offset(v) + g.degree(v); ++e) {
      std::uint64_t nd = d + (kind == WorkloadKind::BFS ? 1 : weights[e]);
      if (nd < dist[dests[e]]) {
        dist[dests[e]] = nd;
        heap.push({nd, dests[e]});
      }
    }
  }
  std::vector<Distance> out(dist.size(), kInfinity);
  for (std::size_t v = 0; v < dist.size(); ++v) {
    if (dist[v] < kInfinity) out[v] = static_cast<Distance>(dist[v]);
  }
  return out;
}

}  // namespace tegra
