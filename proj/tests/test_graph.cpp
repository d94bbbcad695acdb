#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "tegra/engine.hpp"
#include "tegra/error.hpp"
#include "tegra/graph.hpp"
#include "tegra/layout.hpp"

using namespace tegra;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tegra-graph-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("build_csr small example") {
  EdgeList edges{{0, 1, 5}, {0, 2, 3}, {1, 2, 1}};
  auto g = build_csr(edges, 3);
  CHECK(std::vector<EdgeIndex>(g.offsets().begin(), g.offsets().end()) ==
        std::vector<EdgeIndex>{0, 2, 3, 3});
  CHECK(std::vector<VertexId>(g.dests().begin(), g.dests().end()) == std::vector<VertexId>{1, 2, 2});
  CHECK(std::vector<std::uint32_t>(g.weights().begin(), g.weights().end()) ==
        std::vector<std::uint32_t>{5, 3, 1});
}

TEST_CASE("build_csr empty edge list") {
  auto g = build_csr({}, 4);
  CHECK(g.num_vertices() == 4);
  CHECK(g.num_edges() == 0);
  CHECK(std::all_of(g.offsets().begin(), g.offsets().end(), [](auto o) { return o == 0; }));
}

TEST_CASE("build_csr rejects bad input") {
  EdgeList out_of_range{{0, 3, 1}};
  CHECK(code_of([&] { build_csr(out_of_range, 3); }) == ErrorCode::OutOfRangeVertex);
  EdgeList zero{{0, 1, 0}};
  CHECK(code_of([&] { build_csr(zero, 2); }) == ErrorCode::ZeroWeight);
}

TEST_CASE("build_csr matches an adjacency-map build") {
  std::mt19937_64 rng(42);
  EdgeList edges;
  for (int i = 0; i < 1000; ++i) {
    edges.push_back({static_cast<VertexId>(rng() % 100), static_cast<VertexId>(rng() % 100),
                     static_cast<std::uint32_t>(rng() % 9 + 1)});
  }
  std::map<VertexId, std::multiset<std::pair<VertexId, std::uint32_t>>> oracle;
  for (const auto& e : edges) oracle[e.src].insert({e.dst, e.weight});

  auto g = build_csr(edges, 100);
  CHECK(g.offsets().front() == 0);
  CHECK(g.offsets().back() == g.num_edges());
  for (VertexId v = 0; v < 100; ++v) {
    std::multiset<std::pair<VertexId, std::uint32_t>> got;
    for (EdgeIndex e = g.edge_offset(v); e < g.edge_offset(v) + g.degree(v); ++e) {
      got.insert({g.dests()[e], g.weights()[e]});
    }
    CHECK(got == oracle[v]);
  }
  CHECK(std::is_sorted(g.offsets().begin(), g.offsets().end()));
}

TEST_CASE("load_edge_list plain text") {
  auto p = temp_file("basic.txt");
  write(p, "0 1 5\n1 2 2\n");
  auto g = load_edge_list(p, EdgeListFormat::PlainText);
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);

  write(p, "# comment\n0 1\n");
  g = load_edge_list(p, EdgeListFormat::PlainText);
  CHECK(g.weights()[0] == 1);

  write(p, "# vertices 10\n0 1 4\n");
  CHECK(load_edge_list(p, EdgeListFormat::PlainText).num_vertices() == 10);
}

TEST_CASE("load_edge_list errors") {
  auto p = temp_file("bad.txt");
  write(p, "0 x\n");
  CHECK(code_of([&] { load_edge_list(p, EdgeListFormat::PlainText); }) == ErrorCode::ParseError);
  write(p, "0 1 2 3\n");
  CHECK(code_of([&] { load_edge_list(p, EdgeListFormat::PlainText); }) == ErrorCode::ParseError);
  write(p, "NOPE");
  CHECK(code_of([&] { load_edge_list(p, EdgeListFormat::Binary); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_edge_list(temp_file("missing.bin"), EdgeListFormat::Binary); }) ==
        ErrorCode::IoError);
  write(p, "0 1 0\n");
  CHECK(code_of([&] { load_edge_list(p, EdgeListFormat::PlainText); }) == ErrorCode::ZeroWeight);
}

TEST_CASE("binary round trip preserves the CSR") {
  auto g = build_csr(generate_rmat({8, 4, {0.57, 0.19, 0.19, 0.05}, 3}), 256);
  auto p = temp_file("round.tgra");
  save_edge_list(p, g);
  auto back = load_edge_list(p, EdgeListFormat::Binary);
  CHECK(back == g);
  CHECK(back.digest() == g.digest());
}

TEST_CASE("rmat determinism and count") {
  RmatParams p{4, 8, {0.57, 0.19, 0.19, 0.05}, 7};
  auto a = generate_rmat(p);
  auto b = generate_rmat(p);
  CHECK(a.size() == 128);
  CHECK(a == b);
  for (const auto& e : a) {
    CHECK(e.src < 16);
    CHECK(e.dst < 16);
    CHECK(e.weight >= 1);
    CHECK(e.weight <= 64);
  }
  p.seed = 8;
  CHECK(generate_rmat(p) != a);
}

TEST_CASE("rmat top-level quadrant follows the largest probability") {
  auto edges = generate_rmat({10, 16, {0.57, 0.19, 0.19, 0.05}, 5});
  std::array<std::size_t, 4> quadrant{};
  for (const auto& e : edges) quadrant[(e.src >= 512 ? 2 : 0) + (e.dst >= 512 ? 1 : 0)]++;
  CHECK(quadrant[0] > quadrant[1]);
  CHECK(quadrant[0] > quadrant[2]);
  CHECK(quadrant[1] > quadrant[3]);
}

TEST_CASE("rmat rejects bad probabilities") {
  CHECK(code_of([] { generate_rmat({4, 2, {0.5, 0.5, 0.5, 0.5}, 1}); }) ==
        ErrorCode::BadProbabilities);
  CHECK(code_of([] { generate_rmat({4, 2, {1.2, -0.2, 0.0, 0.0}, 1}); }) ==
        ErrorCode::BadProbabilities);
}

TEST_CASE("scrambling is a bijection that fixes vertex 0") {
  const unsigned scale = 9;
  EdgeList edges;
  for (VertexId v = 0; v < (1u << scale); ++v) edges.push_back({v, v, 1});
  scramble_vertex_ids(edges, scale, 11);
  std::set<VertexId> image;
  for (const auto& e : edges) {
    CHECK(e.src == e.dst);
    CHECK(e.src < (1u << scale));
    image.insert(e.src);
  }
  CHECK(image.size() == (1u << scale));
  CHECK(edges[0].src == 0);
}

TEST_CASE("uniform generator") {
  auto a = generate_uniform(100, 500, 9);
  CHECK(a.size() == 500);
  CHECK(a == generate_uniform(100, 500, 9));
  for (const auto& e : a) CHECK(e.src < 100);
}

TEST_CASE("partition examples") {
  CHECK(assign_core(7, Partition(4, 16, PartitionScheme::Modulo)) == 3);
  CHECK(assign_core(7, Partition(4, 16, PartitionScheme::Range)) == 1);
  Partition m(3, 10);
  CHECK(m.owned_count(0) == 4);
  CHECK(m.owned_count(2) == 3);
  Partition r(4, 10, PartitionScheme::Range);
  std::uint64_t total = 0;
  for (std::uint32_t c = 0; c < 4; ++c) total += r.owned_count(c);
  CHECK(total == 10);
}

TEST_CASE("partition local indices are dense per core") {
  for (auto scheme : {PartitionScheme::Modulo, PartitionScheme::Range}) {
    Partition p(5, 37, scheme);
    std::vector<std::set<std::uint64_t>> seen(5);
    for (VertexId v = 0; v < 37; ++v) seen[p.owner(v)].insert(p.local_index(v));
    for (std::uint32_t c = 0; c < 5; ++c) {
      CHECK(seen[c].size() == p.owned_count(c));
      if (!seen[c].empty()) CHECK(*seen[c].rbegin() == p.owned_count(c) - 1);
    }
  }
}

TEST_CASE("layout maps every record and edge exactly once") {
  auto g = build_csr(generate_uniform(300, 2000, 4), 300);
  for (auto topo : {TopologyPreset::Accelerator, TopologyPreset::Tegra,
                    TopologyPreset::AllDisaggregated}) {
    SimConfig cfg;
    cfg.topology = topo;
    cfg.num_cores = 4;
    Partition p(4, g.num_vertices());
    auto built = build_memory(cfg);
    auto map = layout_addresses(g, p, built.topology);
    CHECK(map.mapped_bytes() == 16 * g.num_vertices() + 8 * g.num_edges());

    auto ranges = map.enumerate();
    std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) {
      return a.pool != b.pool ? a.pool < b.pool : a.address < b.address;
    });
    for (std::size_t i = 1; i < ranges.size(); ++i) {
      if (ranges[i].pool == ranges[i - 1].pool) {
        CHECK(ranges[i - 1].address + ranges[i - 1].size <= ranges[i].address);
      }
    }
    // Overflow rings sit past the vertex records they share a pool with.
    for (std::uint32_t c = 0; c < 4; ++c) {
      if (built.topology.vertices_shared) {
        CHECK(map.overflow_base(c) >= 16 * g.num_vertices());
        if (c > 0) {
          CHECK(map.overflow_base(c) ==
                map.overflow_base(c - 1) + 16 * map.overflow_entries(c - 1));
        }
      } else {
        CHECK(map.overflow_base(c) == 16 * p.owned_count(c));
      }
      CHECK(map.overflow_entries(c) > 0);
    }
  }
}

TEST_CASE("layout reports capacity overflow") {
  auto g = build_csr(generate_uniform(64, 256, 1), 64);
  SimConfig cfg;
  cfg.topology = TopologyPreset::Tegra;
  cfg.num_cores = 1;
  cfg.ddr4.capacity = 1024;  // 256 edges need 2048 B
  auto built = build_memory(cfg);
  CHECK(code_of([&] { layout_addresses(g, Partition(1, 64), built.topology); }) ==
        ErrorCode::CapacityExceeded);
}

TEST_CASE("pool routing interleaves across channels") {
  MemoryPool pool{{0, 1, 2}, 256, 1 << 20};
  CHECK(pool.route(0).channel == 0);
  CHECK(pool.route(255).channel == 0);
  CHECK(pool.route(256).channel == 1);
  CHECK(pool.route(768).channel == 0);
  CHECK(pool.route(768).local_address == 256);
  CHECK(pool.route(1281).channel == 2);
  CHECK(pool.route(1281).local_address == 257);
}
