#include "tegra/layout.hpp"

#include <algorithm>
#include <string>

#include "tegra/error.hpp"

namespace tegra {

std::uint64_t AddressMap::edge_address(EdgeIndex e) const {
  if (!topology_.edges_per_core) return e * kEdgeBytes;
  auto offsets = graph_->offsets();
  auto it = std::upper_bound(offsets.begin(), offsets.end(), e);
  const auto v = static_cast<std::size_t>(it - offsets.begin() - 1);
  return edge_base_[v] + (e - offsets[v]) * kEdgeBytes;
}

std::vector<MappedRange> AddressMap::enumerate() const {
  std::vector<MappedRange> out;
  const auto n = graph_->num_vertices();
  out.reserve(2 * n);
  for (VertexId v = 0; v < n; ++v) {
    const auto core = partition_.owner(v);
    out.push_back({vertex_pool(core), vertex_address(v), kVertexRecordBytes});
  }
  for (VertexId v = 0; v < n; ++v) {
    if (graph_->degree(v) == 0) continue;
    const auto core = partition_.owner(v);
    out.push_back({edge_pool(core), edge_address(graph_->edge_offset(v)),
                   graph_->degree(v) * kEdgeBytes});
  }
  return out;
}

std::uint64_t AddressMap::mapped_bytes() const {
  std::uint64_t total = 0;
  for (const auto& r : enumerate()) total += r.size;
  return total;
}

AddressMap layout_addresses(const CsrGraph& g, const Partition& p, const MemoryTopology& topology) {
  const std::uint32_t cores = p.num_cores();
  if (topology.vertex_pool.size() != cores || topology.edge_pool.size() != cores) {
    throw Error(ErrorCode::ConfigError, "memory topology does not match core count");
  }
  AddressMap map(g, p, topology);

  map.overflow_base_.resize(cores);
  map.overflow_entries_.resize(cores);
  if (topology.vertices_shared) {
    const MemoryPool& pool = topology.pools[topology.vertex_pool[0]];
    const std::uint64_t records = g.num_vertices() * kVertexRecordBytes;
    const std::uint64_t spare = pool.capacity() > records ? pool.capacity() - records : 0;
    const std::uint64_t per_core = spare / cores / kVertexRecordBytes;
    if (per_core == 0) {
      throw Error(ErrorCode::CapacityExceeded,
                  "vertex records need " + std::to_string(records) + " B plus overflow, pool holds " +
                      std::to_string(pool.capacity()) + " B");
    }
    for (std::uint32_t c = 0; c < cores; ++c) {
      map.overflow_base_[c] = records + c * per_core * kVertexRecordBytes;
      map.overflow_entries_[c] = per_core;
    }
  }
  for (std::uint32_t c = 0; c < cores && !topology.vertices_shared; ++c) {
    const MemoryPool& pool = topology.pools[topology.vertex_pool[c]];
    const std::uint64_t records = p.owned_count(c) * kVertexRecordBytes;
    // One spare record keeps the overflow ring non-empty.
    if (records + kVertexRecordBytes > pool.capacity()) {
      throw Error(ErrorCode::CapacityExceeded,
                  "core " + std::to_string(c) + " vertex records need " + std::to_string(records) +
                      " B, pool holds " + std::to_string(pool.capacity()) + " B");
    }
    map.overflow_base_[c] = records;
    map.overflow_entries_[c] = (pool.capacity() - records) / kVertexRecordBytes;
  }

  if (topology.edges_per_core) {
    map.edge_base_.assign(g.num_vertices(), 0);
    std::vector<std::uint64_t> cursor(cores, 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      const auto c = p.owner(v);
      map.edge_base_[v] = cursor[c];
      cursor[c] += g.degree(v) * kEdgeBytes;
    }
    for (std::uint32_t c = 0; c < cores; ++c) {
      const MemoryPool& pool = topology.pools[topology.edge_pool[c]];
      if (cursor[c] > pool.capacity()) {
        throw Error(ErrorCode::CapacityExceeded,
                    "core " + std::to_string(c) + " edges need " + std::to_string(cursor[c]) +
                        " B, pool holds " + std::to_string(pool.capacity()) + " B");
      }
    }
  } else {
    const std::uint64_t bytes = g.num_edges() * kEdgeBytes;
    for (std::uint32_t c = 0; c < cores; ++c) {
      const MemoryPool& pool = topology.pools[topology.edge_pool[c]];
      if (bytes > pool.capacity()) {
        throw Error(ErrorCode::CapacityExceeded,
                    "edge array needs " + std::to_string(bytes) + " B, shared pool holds " +
                        std::to_string(pool.capacity()) + " B");
      }
    }
  }
  return map;
}

}  // namespace tegra
