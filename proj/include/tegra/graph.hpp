#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace tegra {

using VertexId = std::uint32_t;
using EdgeIndex = std::uint64_t;
using Distance = std::uint32_t;

inline constexpr Distance kInfinity = std::numeric_limits<Distance>::max();

// Simulated memory footprint of the CSR structures.
inline constexpr std::uint64_t kVertexRecordBytes = 16;
inline constexpr std::uint64_t kEdgeBytes = 8;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  std::uint32_t weight = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Compressed-sparse-row graph. Immutable once built.
class CsrGraph {
 public:
  CsrGraph() : offsets_{0} {}

  std::uint64_t num_vertices() const { return offsets_.size() - 1; }
  std::uint64_t num_edges() const { return dests_.size(); }

  std::span<const EdgeIndex> offsets() const { return offsets_; }
  std::span<const VertexId> dests() const { return dests_; }
  std::span<const std::uint32_t> weights() const { return weights_; }

  EdgeIndex edge_offset(VertexId v) const { return offsets_[v]; }
  std::uint64_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  // Expands back into (src, dst, weight) triples in CSR order.
  EdgeList to_edges() const;

  // FNV-1a over the CSR arrays; identifies "the same graph" across runs.
  std::uint64_t digest() const;

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;

 private:
  friend CsrGraph build_csr(std::span<const Edge> edges, std::uint64_t num_vertices);

  std::vector<EdgeIndex> offsets_;
  std::vector<VertexId> dests_;
  std::vector<std::uint32_t> weights_;
};

/// Edges of each source are stored contiguously, in input order. Throws
/// OutOfRangeVertex or ZeroWeight.
CsrGraph build_csr(std::span<const Edge> edges, std::uint64_t num_vertices);

enum class EdgeListFormat { PlainText, Binary };

// num_vertices is 1 + max endpoint for text input; the binary header carries it.
CsrGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format);
void save_edge_list(const std::filesystem::path& path, const CsrGraph& g);
void save_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                    std::uint64_t num_vertices);

struct RmatParams {
  unsigned scale = 16;
  unsigned edge_factor = 16;
  std::array<double, 4> probs{0.57, 0.19, 0.19, 0.05};
  std::uint64_t seed = 1;
};

inline constexpr std::uint32_t kMaxGeneratedWeight = 64;

/// 2^scale * edge_factor edges, weights uniform in [1, 64].
EdgeList generate_rmat(const RmatParams& params);

/// Relabels vertices in [0, 2^scale) with a seeded bijection. Raw RMAT
/// concentrates degree in ids with many zero low bits; scrambling breaks the
/// correlation between degree and id-modulo ownership. Id 0 maps to itself.
void scramble_vertex_ids(EdgeList& edges, unsigned scale, std::uint64_t seed);

/// Uniformly random endpoints; weights uniform in [1, 64].
EdgeList generate_uniform(std::uint64_t num_vertices, std::uint64_t num_edges,
                          std::uint64_t seed);

enum class PartitionScheme { Modulo, Range };

class Partition {
 public:
  Partition(std::uint32_t num_cores, std::uint64_t num_vertices,
            PartitionScheme scheme = PartitionScheme::Modulo);

  std::uint32_t num_cores() const { return num_cores_; }
  std::uint64_t num_vertices() const { return num_vertices_; }
  PartitionScheme scheme() const { return scheme_; }

  std::uint32_t owner(VertexId v) const {
    if (scheme_ == PartitionScheme::Modulo) return v % num_cores_;
    return static_cast<std::uint32_t>(v / block_);
  }

  // Position of v among the vertices its owner holds, in ascending id order.
  std::uint64_t local_index(VertexId v) const {
    if (scheme_ == PartitionScheme::Modulo) return v / num_cores_;
    return v % block_;
  }

  std::uint64_t owned_count(std::uint32_t core) const;

 private:
  std::uint32_t num_cores_;
  std::uint64_t num_vertices_;
  PartitionScheme scheme_;
  std::uint64_t block_;
};

inline std::uint32_t assign_core(VertexId v, const Partition& p) { return p.owner(v); }

}  // namespace tegra
