#pragma once

#include <cstdint>
#include <vector>

#include "tegra/graph.hpp"

namespace tegra {

/// Channels sharing one address space, interleaved round-robin.
struct MemoryPool {
  std::vector<std::uint32_t> channels;
  std::uint64_t interleave = 256;
  std::uint64_t channel_capacity = 0;

  struct Route {
    std::uint32_t channel;
    std::uint64_t local_address;
  };

  Route route(std::uint64_t address) const {
    const std::uint64_t block = address / interleave;
    const std::uint64_t n = channels.size();
    return {channels[block % n], (block / n) * interleave + address % interleave};
  }

  std::uint64_t capacity() const { return channel_capacity * channels.size(); }
};

/// Which pool serves each core's vertices and edges.
struct MemoryTopology {
  std::vector<MemoryPool> pools;
  std::vector<std::uint32_t> vertex_pool;  // per core
  std::vector<std::uint32_t> edge_pool;    // per core
  // true: each core's pool holds only the edges of vertices it owns.
  // false: all cores share one pool holding the whole CSR edge array.
  bool edges_per_core = false;
  // true: one pool holds every vertex record at 16*v, followed by one
  // overflow ring per core. false: each core's pool holds its own records.
  bool vertices_shared = false;
};

struct MappedRange {
  std::uint32_t pool;
  std::uint64_t address;
  std::uint64_t size;
};

/// Byte placement of vertex records (16 B each) and edges (8 B each), plus
/// each core's active list overflow region behind the vertex records.
class AddressMap {
 public:
  std::uint32_t vertex_pool(std::uint32_t core) const { return topology_.vertex_pool[core]; }
  std::uint32_t edge_pool(std::uint32_t core) const { return topology_.edge_pool[core]; }
  const MemoryPool& pool(std::uint32_t index) const { return topology_.pools[index]; }

  std::uint64_t vertex_address(VertexId v) const {
    if (topology_.vertices_shared) return std::uint64_t{v} * kVertexRecordBytes;
    return partition_.local_index(v) * kVertexRecordBytes;
  }

  /// Address of CSR edge `e` within the edge pool of the vertex's owner.
  std::uint64_t edge_address(EdgeIndex e) const;

  std::uint64_t overflow_base(std::uint32_t core) const { return overflow_base_[core]; }
  std::uint64_t overflow_entries(std::uint32_t core) const { return overflow_entries_[core]; }
  std::uint64_t overflow_address(std::uint32_t core, std::uint64_t slot) const {
    return overflow_base_[core] + (slot % overflow_entries_[core]) * kVertexRecordBytes;
  }

  /// Every vertex record and every vertex's edge run, for auditing.
  std::vector<MappedRange> enumerate() const;
  std::uint64_t mapped_bytes() const;

 private:
  friend AddressMap layout_addresses(const CsrGraph&, const Partition&, const MemoryTopology&);

  AddressMap(const CsrGraph& g, const Partition& p, MemoryTopology t)
      : graph_(&g), partition_(p), topology_(std::move(t)) {}

  const CsrGraph* graph_;
  Partition partition_;
  MemoryTopology topology_;
  std::vector<std::uint64_t> edge_base_;  // per vertex, only when edges_per_core
  std::vector<std::uint64_t> overflow_base_;
  std::vector<std::uint64_t> overflow_entries_;
};

/// Throws CapacityExceeded when a pool cannot hold what is placed in it.
/// The graph must outlive the returned map.
AddressMap layout_addresses(const CsrGraph& g, const Partition& p, const MemoryTopology& topology);

}  // namespace tegra
