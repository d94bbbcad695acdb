#include "tegra/engine.hpp"

#include <cassert>
#include <string>

#include "tegra/error.hpp"
#include "tegra/hash.hpp"

namespace tegra {

void EventQueue::push(Time time, EventKind kind, std::uint32_t core, WakeKind wake) {
  heap_.push(Event{time, next_sequence_++, kind, core, wake});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

std::uint64_t distance_digest(const std::vector<Distance>& distances) {
  Fnv1a h;
  h.add(std::uint64_t{distances.size()});
  for (Distance d : distances) h.add(d);
  return h.value();
}

BuiltMemory build_memory(const SimConfig& cfg) {
  BuiltMemory out;
  const std::uint32_t n = cfg.num_cores;
  const bool remote_vertices = cfg.topology == TopologyPreset::AllDisaggregated;
  const bool remote_edges = cfg.topology != TopologyPreset::Accelerator;

  ChannelConfig vertex_cfg = cfg.hbm2;
  vertex_cfg.kind = MemoryKind::HBM2;
  vertex_cfg.extra_latency = remote_vertices ? cfg.disaggregation_latency : 0.0;
  ChannelConfig edge_cfg = cfg.ddr4;
  edge_cfg.kind = MemoryKind::DDR4;
  edge_cfg.extra_latency = remote_edges ? cfg.disaggregation_latency : 0.0;

  if (remote_vertices) {
    // Every stack joins one pool, striped one beat per pseudo-channel.
    out.topology.vertices_shared = true;
    MemoryPool shared{{}, vertex_cfg.access_granularity * vertex_cfg.pseudo_channels,
                      vertex_cfg.capacity};
    for (std::uint32_t c = 0; c < n; ++c) {
      shared.channels.push_back(out.memory.add_channel(vertex_cfg, "vertex" + std::to_string(c)));
      out.roles.push_back(ChannelRole::Vertex);
    }
    out.topology.pools.push_back(std::move(shared));
    out.topology.vertex_pool.assign(n, 0);
  } else {
    for (std::uint32_t c = 0; c < n; ++c) {
      auto ch = out.memory.add_channel(vertex_cfg, "vertex" + std::to_string(c));
      out.roles.push_back(ChannelRole::Vertex);
      out.topology.pools.push_back({{ch}, vertex_cfg.access_granularity, vertex_cfg.capacity});
      out.topology.vertex_pool.push_back(static_cast<std::uint32_t>(out.topology.pools.size() - 1));
    }
  }

  if (cfg.topology == TopologyPreset::Accelerator) {
    out.topology.edges_per_core = true;
    for (std::uint32_t c = 0; c < n; ++c) {
      auto ch = out.memory.add_channel(edge_cfg, "edge" + std::to_string(c));
      out.roles.push_back(ChannelRole::Edge);
      out.topology.pools.push_back({{ch}, cfg.edge_interleave, edge_cfg.capacity});
      out.topology.edge_pool.push_back(static_cast<std::uint32_t>(out.topology.pools.size() - 1));
    }
  } else {
    MemoryPool shared{{}, cfg.edge_interleave, edge_cfg.capacity};
    for (std::uint32_t k = 0; k < cfg.effective_edge_pool_channels(); ++k) {
      shared.channels.push_back(out.memory.add_channel(edge_cfg, "edge" + std::to_string(k)));
      out.roles.push_back(ChannelRole::Edge);
    }
    out.topology.pools.push_back(std::move(shared));
    out.topology.edge_pool.assign(n, static_cast<std::uint32_t>(out.topology.pools.size() - 1));
  }
  return out;
}

namespace {

PeParams pe_params(const SimConfig& cfg) {
  PeParams p;
  p.workload.kind = cfg.workload;
  p.consume_cost = cfg.consume_cost;
  p.generate_cost = cfg.generate_cost;
  p.active_list_capacity = cfg.active_list_capacity;
  p.max_outstanding_bursts = cfg.max_outstanding_bursts;
  return p;
}

const SimConfig& validated(const SimConfig& cfg, const CsrGraph* g) {
  cfg.validate();
  if (!g) throw Error(ErrorCode::ConfigError, "graph: missing");
  if (cfg.source >= g->num_vertices()) {
    throw Error(ErrorCode::BadSource, "workload.source " + std::to_string(cfg.source) + " with " +
                                          std::to_string(g->num_vertices()) + " vertices");
  }
  return cfg;
}

}  // namespace

System::System(std::shared_ptr<const CsrGraph> graph, const SimConfig& cfg)
    : graph_(std::move(graph)),
      cfg_(validated(cfg, graph_.get())),
      partition_(cfg_.num_cores, graph_->num_vertices(), cfg_.partition),
      map_([&] {
        BuiltMemory built = build_memory(cfg_);
        memory_ = std::move(built.memory);
        roles_ = std::move(built.roles);
        return layout_addresses(*graph_, partition_, built.topology);
      }()),
      fabric_(cfg_.num_cores, cfg_.fabric),
      distances_(graph_->num_vertices(), kInfinity) {
  const PeParams params = pe_params(cfg_);
  cores_.reserve(cfg_.num_cores);
  for (std::uint32_t c = 0; c < cfg_.num_cores; ++c) cores_.emplace_back(c, params);

  distances_[cfg_.source] = 0;
  const auto home = partition_.owner(cfg_.source);
  cores_[home].preload({graph_->edge_offset(cfg_.source), graph_->degree(cfg_.source), 0});
  cores_[home].start(*this, 0.0);
}

Distance& System::distance(VertexId v) { return distances_[v]; }

Time System::pool_access(std::uint32_t pool, std::uint64_t address, std::uint64_t size,
                         bool is_write, Time now) {
  const auto route = map_.pool(pool).route(address);
  return memory_.submit({route.channel, route.local_address, size, is_write, now}, now);
}

Time System::access_vertex(std::uint32_t core, VertexId v, bool is_write, Time now) {
  return pool_access(map_.vertex_pool(core), map_.vertex_address(v), kVertexRecordBytes, is_write,
                     now);
}

Time System::access_overflow(std::uint32_t core, std::uint64_t slot, bool is_write, Time now) {
  return pool_access(map_.vertex_pool(core), map_.overflow_address(core, slot),
                     kVertexRecordBytes, is_write, now);
}

std::uint64_t System::overflow_capacity(std::uint32_t core) const {
  return map_.overflow_entries(core);
}

EdgeLocation System::locate_edges(std::uint32_t core, EdgeIndex edge_offset) const {
  const auto pool = map_.edge_pool(core);
  return {pool, map_.edge_address(edge_offset), cfg_.ddr4.access_granularity};
}

Time System::read_edge_burst(std::uint32_t pool, std::uint64_t address, Time now) {
  return pool_access(pool, address, cfg_.ddr4.access_granularity, false, now);
}

std::optional<Time> System::send(std::uint32_t src, std::uint32_t dst, Message msg, Time now) {
  auto arrival = fabric_.send(src, dst, msg, now);
  if (arrival) events_.push(*arrival, EventKind::MessageArrival, dst, WakeKind::ConsumerPoll);
  return arrival;
}

RecvResult System::recv(std::uint32_t core, Time now) {
  RecvResult r = fabric_.recv(core, now);
  if (r.unblocked) {
    events_.push(r.unblocked->arrival, EventKind::MessageArrival, core, WakeKind::ConsumerPoll);
    cores_[r.unblocked->sender].on_unblocked(*this, now);
  }
  return r;
}

void System::schedule(Time at, std::uint32_t core, WakeKind kind) {
  assert(at >= now_);
  const EventKind ek = (kind == WakeKind::ConsumerReadDone || kind == WakeKind::Posted)
                           ? EventKind::MemCompletion
                           : EventKind::ProcessWake;
  events_.push(at, ek, core, kind);
}

bool System::step() {
  if (events_.empty()) return false;
  const Event ev = events_.pop();
  assert(ev.time >= now_);
  now_ = ev.time;
  last_event_ = ev.time;
  ++executed_;
  ProcessingElement& pe = cores_[ev.core];
  switch (ev.kind) {
    case EventKind::MessageArrival:
      pe.on_message_arrival(*this, now_);
      break;
    case EventKind::MemCompletion:
      if (ev.wake == WakeKind::ConsumerReadDone) pe.consumer_read_done(*this, now_);
      break;
    case EventKind::ProcessWake:
      if (ev.wake == WakeKind::ConsumerPoll) {
        pe.consumer_poll(*this, now_);
      } else {
        pe.generator_step(*this, now_);
      }
      break;
  }
  if (observer_) observer_(*this, ev);
  return true;
}

bool System::quiescent() const {
  if (!events_.empty()) return false;
  for (std::uint32_t c = 0; c < cores_.size(); ++c) {
    if (!fabric_.idle(c) || !cores_[c].quiescent()) return false;
  }
  return true;
}

std::uint64_t System::pending_work() const {
  const FabricCounters& f = fabric_.counters();
  std::uint64_t pending = (f.sent - f.delivered) + events_.size();
  for (const auto& pe : cores_) {
    const CoreCounters& k = pe.counters();
    pending += (k.accepted + k.preloaded - k.entries_processed);
    pending += (k.consumed - k.accepted - k.rejected);
    pending += (k.popped_out_degree - k.generated);
  }
  return pending;
}

SimReport System::run() {
  while (step()) {
  }
  if (!quiescent()) {
    throw Error(ErrorCode::NoProgress,
                "event queue drained at t=" + std::to_string(now_) + " with work outstanding");
  }
  return report();
}

SimReport System::report() const {
  SimReport r;
  r.runtime = last_event_;
  r.events_executed = executed_;
  for (std::uint32_t i = 0; i < memory_.size(); ++i) {
    const Channel& ch = memory_.channel(i);
    r.channels.push_back({memory_.name(i), roles_[i], ch.config(), ch.stats()});
  }
  r.fabric = fabric_.counters();
  for (const auto& pe : cores_) r.cores.push_back(pe.counters());
  r.graph_digest = graph_->digest();
  r.distances = distances_;
  r.distance_digest = distance_digest(distances_);
  return r;
}

std::unique_ptr<System> build_system(std::shared_ptr<const CsrGraph> graph, const SimConfig& cfg) {
  return std::make_unique<System>(std::move(graph), cfg);
}

std::shared_ptr<const CsrGraph> make_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphSourceKind::Rmat: {
      RmatParams p{spec.scale, spec.edge_factor, spec.rmat_probs, spec.seed};
      auto edges = generate_rmat(p);
      if (spec.scramble_ids) scramble_vertex_ids(edges, spec.scale, spec.seed);
      return std::make_shared<const CsrGraph>(build_csr(edges, std::uint64_t{1} << spec.scale));
    }
    case GraphSourceKind::Uniform: {
      auto edges = generate_uniform(spec.uniform_vertices, spec.uniform_edges, spec.seed);
      return std::make_shared<const CsrGraph>(build_csr(edges, spec.uniform_vertices));
    }
    case GraphSourceKind::File:
      return std::make_shared<const CsrGraph>(load_edge_list(spec.path, spec.format));
  }
  throw Error(ErrorCode::ConfigError, "graph.source: unknown");
}

}  // namespace tegra
