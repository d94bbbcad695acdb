#include "doctest.h"

#include <deque>
#include <map>
#include <queue>
#include <random>

#include "tegra/error.hpp"
#include "tegra/processing_element.hpp"

using namespace tegra;

namespace {

// Single-core stand-in for the system: fixed memory latencies, an inbox the
// test fills directly, and a recorded outbox.
class FakeEnv final : public PeEnvironment {
 public:
  explicit FakeEnv(CsrGraph g) : g_(std::move(g)), dist_(g_.num_vertices(), kInfinity) {}

  const CsrGraph& graph() const override { return g_; }
  std::uint32_t owner(VertexId) const override { return 0; }
  Distance& distance(VertexId v) override { return dist_[v]; }

  Time access_vertex(std::uint32_t, VertexId v, bool is_write, Time now) override {
    if (is_write) writes.push_back({v, dist_[v]});
    else ++vertex_reads;
    return now + 30;
  }
  Time access_overflow(std::uint32_t, std::uint64_t, bool is_write, Time now) override {
    (is_write ? overflow_writes : overflow_reads) += kVertexRecordBytes;
    return now + 30;
  }
  std::uint64_t overflow_capacity(std::uint32_t) const override { return 1 << 20; }
  EdgeLocation locate_edges(std::uint32_t, EdgeIndex offset) const override {
    return {0, offset * kEdgeBytes, 64};
  }
  Time read_edge_burst(std::uint32_t, std::uint64_t, Time now) override {
    ++edge_bursts;
    return now + 50;
  }
  std::optional<Time> send(std::uint32_t, std::uint32_t, Message msg, Time now) override {
    if (block_sends) {
      held.push_back(msg);
      return std::nullopt;
    }
    sent.push_back(msg);
    return now + 1;
  }
  RecvResult recv(std::uint32_t, Time now) override {
    RecvResult r;
    if (!inbox.empty() && inbox.front().first <= now) {
      r.message = inbox.front().second;
      inbox.pop_front();
    }
    return r;
  }
  void schedule(Time at, std::uint32_t, WakeKind kind) override {
    wakes.push({at, seq++, kind});
  }

  void drain(ProcessingElement& pe) {
    while (!wakes.empty()) {
      auto [t, s, kind] = wakes.top();
      wakes.pop();
      (void)s;
      now = t;
      switch (kind) {
        case WakeKind::ConsumerPoll: pe.consumer_poll(*this, t); break;
        case WakeKind::ConsumerReadDone: pe.consumer_read_done(*this, t); break;
        case WakeKind::Generator: pe.generator_step(*this, t); break;
        case WakeKind::Posted: break;
      }
    }
  }

  CsrGraph g_;
  std::vector<Distance> dist_;
  std::deque<std::pair<Time, Message>> inbox;
  std::vector<Message> sent, held;
  std::vector<std::pair<VertexId, Distance>> writes;
  bool block_sends = false;
  std::uint64_t vertex_reads = 0, edge_bursts = 0, overflow_writes = 0, overflow_reads = 0;
  Time now = 0;

 private:
  using Wake = std::tuple<Time, std::uint64_t, WakeKind>;
  std::priority_queue<Wake, std::vector<Wake>, std::greater<>> wakes;
  std::uint64_t seq = 0;
};

CsrGraph star(std::uint32_t leaves) {
  EdgeList edges;
  for (VertexId v = 1; v <= leaves; ++v) edges.push_back({0, v, v});
  return build_csr(edges, leaves + 1 + 4);
}

}  // namespace

TEST_CASE("relax rule accepts a strictly smaller value") {
  FakeEnv env(star(4));
  env.dist_[3] = 7;
  ProcessingElement pe(0, {});
  env.inbox.push_back({0, {3, 4}});
  pe.on_message_arrival(env, 0);
  env.drain(pe);
  CHECK(env.dist_[3] == 4);
  CHECK(pe.counters().accepted == 1);
  CHECK(pe.counters().vertex_writes == 1);
  CHECK(pe.counters().entries_processed == 1);  // leaf has no edges
  CHECK(env.writes.size() == 1);
  CHECK(pe.quiescent());
}

TEST_CASE("relax rule rejects an equal or larger value") {
  FakeEnv env(star(4));
  env.dist_[3] = 7;
  ProcessingElement pe(0, {});
  env.inbox.push_back({0, {3, 9}});
  env.inbox.push_back({0, {3, 7}});
  pe.on_message_arrival(env, 0);
  env.drain(pe);
  CHECK(env.dist_[3] == 7);
  CHECK(pe.counters().rejected == 2);
  CHECK(pe.counters().vertex_writes == 0);
  CHECK(pe.active_list().empty());
  CHECK(env.writes.empty());
}

TEST_CASE("generator sends one message per edge") {
  FakeEnv env(star(3));
  ProcessingElement pe(0, {});
  pe.preload({0, 3, 10});
  pe.start(env, 0);
  env.drain(pe);
  REQUIRE(env.sent.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(env.sent[i].dest_vertex == i + 1);
    CHECK(env.sent[i].value == 10 + i + 1);
  }
  CHECK(pe.counters().generated == 3);
  CHECK(pe.counters().edge_bytes_requested == 24);
  CHECK(env.edge_bursts == 1);
}

TEST_CASE("entry without edges sends nothing and reads no edges") {
  FakeEnv env(star(3));
  ProcessingElement pe(0, {});
  pe.preload({3, 0, 5});
  pe.start(env, 0);
  env.drain(pe);
  CHECK(env.sent.empty());
  CHECK(env.edge_bursts == 0);
  CHECK(pe.counters().entries_processed == 1);
}

TEST_CASE("bfs propagates unit steps") {
  Workload bfs{WorkloadKind::BFS};
  CHECK(bfs.propagate(4, 60) == 5);
  Workload sssp{WorkloadKind::SSSP};
  CHECK(sssp.propagate(4, 60) == 64);
  CHECK_THROWS_AS(sssp.propagate(kInfinity - 3, 3), Error);
}

TEST_CASE("blocked send stalls the generator until released") {
  FakeEnv env(star(2));
  ProcessingElement pe(0, {});
  env.block_sends = true;
  pe.preload({0, 2, 0});
  pe.start(env, 0);
  env.drain(pe);
  CHECK(pe.generator_status() == ProcessStatus::StalledOnSend);
  CHECK(env.held.size() == 1);
  CHECK_FALSE(pe.quiescent());
  env.block_sends = false;
  pe.on_unblocked(env, env.now + 5);
  env.drain(pe);
  CHECK(env.sent.size() == 1);
  CHECK(pe.counters().send_stalls == 1);
  CHECK(pe.generator_status() == ProcessStatus::Idle);
}

TEST_CASE("active list spills past hardware capacity and keeps order") {
  ActiveList list(2);
  CHECK_FALSE(list.push({1, 1, 1}).spilled);
  CHECK_FALSE(list.push({2, 1, 1}).spilled);
  CHECK(list.push({3, 1, 1}).spilled);
  CHECK(list.pop().edge_offset == 1);
  REQUIRE(list.can_refill());
  list.refill(0);
  CHECK(list.pop().edge_offset == 2);
  CHECK(list.pop().edge_offset == 3);
  CHECK(list.empty());
  CHECK(list.spills() == list.refills());
}

TEST_CASE("active list pops in unbounded FIFO order") {
  std::mt19937_64 rng(8);
  for (std::size_t h : {1u, 2u, 3u, 8u}) {
    ActiveList list(h);
    std::deque<ActiveEntry> oracle;
    std::uint64_t next = 0;
    for (int step = 0; step < 2000; ++step) {
      const auto op = rng() % 3;
      if (op < 2) {
        ActiveEntry e{next++, 0, 0};
        list.push(e);
        oracle.push_back(e);
      } else if (!oracle.empty()) {
        if (list.hw_size() == 0) {
          REQUIRE(list.can_refill());
          list.refill(0);
        }
        CHECK(list.pop() == oracle.front());
        oracle.pop_front();
        if (list.can_refill()) list.refill(0);
      }
      CHECK(list.hw_size() <= h);
      CHECK(list.size() == oracle.size());
    }
  }
}

TEST_CASE("spill and refill traffic are symmetric") {
  // Vertices 1..8 each fan out to 16 sinks, so the generator falls behind.
  EdgeList edges;
  for (VertexId v = 1; v <= 8; ++v) {
    for (VertexId k = 0; k < 16; ++k) edges.push_back({v, 9 + k, 1});
  }
  FakeEnv env(build_csr(edges, 25));
  PeParams params;
  params.active_list_capacity = 2;
  ProcessingElement pe(0, params);
  for (VertexId v = 1; v <= 8; ++v) env.inbox.push_back({0, {v, 100}});
  pe.on_message_arrival(env, 0);
  env.drain(pe);
  CHECK(pe.counters().spills > 0);
  CHECK(pe.counters().spills == pe.counters().refills);
  CHECK(env.overflow_writes == env.overflow_reads);
  CHECK(env.overflow_writes == kVertexRecordBytes * pe.counters().spills);
  CHECK(pe.counters().entries_processed == 8);
}

TEST_CASE("final distance is the minimum value ever written") {
  std::mt19937_64 rng(12);
  FakeEnv env(star(0));
  const VertexId n = static_cast<VertexId>(env.g_.num_vertices());
  ProcessingElement pe(0, {});
  std::map<VertexId, Distance> lowest;
  for (int i = 0; i < 500; ++i) {
    Message m{static_cast<VertexId>(rng() % n), static_cast<std::uint32_t>(rng() % 1000)};
    env.inbox.push_back({static_cast<Time>(i), m});
  }
  while (!env.inbox.empty()) {
    pe.on_message_arrival(env, env.now + 100);
    env.drain(pe);
  }
  // Replay the write log.
  for (auto [v, d] : env.writes) {
    auto it = lowest.find(v);
    if (it != lowest.end()) CHECK(d < it->second);  // each write strictly improves
    lowest[v] = it == lowest.end() ? d : std::min(it->second, d);
  }
  for (VertexId v = 0; v < n; ++v) {
    const Distance expect = lowest.count(v) ? lowest[v] : kInfinity;
    CHECK(env.dist_[v] == expect);
  }
  CHECK(pe.counters().consumed == 500);
}

TEST_CASE("reference solver") {
  EdgeList edges{{0, 1, 4}, {0, 2, 1}, {2, 1, 2}, {1, 3, 5}};
  auto g = build_csr(edges, 5);
  CHECK(reference_distances(g, 0, WorkloadKind::SSSP) ==
        std::vector<Distance>{0, 3, 1, 8, kInfinity});
  CHECK(reference_distances(g, 0, WorkloadKind::BFS) ==
        std::vector<Distance>{0, 1, 1, 2, kInfinity});
  CHECK_THROWS_AS(reference_distances(g, 5, WorkloadKind::SSSP), Error);
}
