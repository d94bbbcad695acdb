#include "tegra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tegra/error.hpp"
#include "tegra/hash.hpp"

namespace tegra {

CsrGraph build_csr(std::span<const Edge> edges, std::uint64_t num_vertices) {
  if (num_vertices > std::numeric_limits<VertexId>::max()) {
    throw Error(ErrorCode::OutOfRangeVertex, "vertex count exceeds 32-bit ids");
  }
  CsrGraph g;
  g.offsets_.assign(num_vertices + 1, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.src >= num_vertices || e.dst >= num_vertices) {
      throw Error(ErrorCode::OutOfRangeVertex,
                  "edge " + std::to_string(i) + " (" + std::to_string(e.src) + "->" +
                      std::to_string(e.dst) + ") with " + std::to_string(num_vertices) +
                      " vertices");
    }
    if (e.weight == 0) {
      throw Error(ErrorCode::ZeroWeight, "edge " + std::to_string(i));
    }
    ++g.offsets_[e.src + 1];
  }
  for (std::uint64_t v = 0; v < num_vertices; ++v) g.offsets_[v + 1] += g.offsets_[v];

  // Counting sort keeps input order within each source.
  g.dests_.resize(edges.size());
  g.weights_.resize(edges.size());
  std::vector<EdgeIndex> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : edges) {
    EdgeIndex slot = cursor[e.src]++;
    g.dests_[slot] = e.dst;
    g.weights_[slot] = e.weight;
  }
  return g;
}

EdgeList CsrGraph::to_edges() const {
  EdgeList out;
  out.reserve(num_edges());
  for (std::uint64_t v = 0; v < num_vertices(); ++v) {
    for (EdgeIndex e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      out.push_back({static_cast<VertexId>(v), dests_[e], weights_[e]});
    }
  }
  return out;
}

std::uint64_t CsrGraph::digest() const {
  Fnv1a h;
  h.add(num_vertices());
  h.add(num_edges());
  for (EdgeIndex o : offsets_) h.add(o);
  for (VertexId d : dests_) h.add(d);
  for (std::uint32_t w : weights_) h.add(w);
  return h.value();
}

namespace {

constexpr char kMagic[4] = {'T', 'G', 'R', 'A'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::ParseError, path.string() + ": truncated binary edge list");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return static_cast<T>(v);
}

CsrGraph load_text(std::istream& in, const std::filesystem::path& path) {
  EdgeList edges;
  std::uint64_t header_vertices = 0;
  bool has_header = false;
  std::uint64_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      // "# vertices N" pins the vertex count (isolated high ids).
      std::istringstream comment{std::string(body.substr(hash + 1))};
      std::string key;
      std::uint64_t n = 0;
      if (comment >> key >> n && key == "vertices") {
        header_vertices = n;
        has_header = true;
      }
      body = body.substr(0, hash);
    }
    std::istringstream fields{std::string(body)};
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3) fail("expected 'src dst [weight]'");
    std::uint64_t vals[3] = {0, 0, 1};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& t = tokens[i];
      if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        fail("non-numeric field '" + t + "'");
      }
      try {
        vals[i] = std::stoull(t);
      } catch (const std::exception&) {
        fail("field out of range '" + t + "'");
      }
      if (vals[i] > std::numeric_limits<std::uint32_t>::max()) fail("field exceeds 32 bits");
    }
    edges.push_back({static_cast<VertexId>(vals[0]), static_cast<VertexId>(vals[1]),
                     static_cast<std::uint32_t>(vals[2])});
    max_id = std::max({max_id, vals[0], vals[1]});
    any = true;
  }
  std::uint64_t n = has_header ? header_vertices : (any ? max_id + 1 : 0);
  return build_csr(edges, n);
}

CsrGraph load_binary(std::istream& in, const std::filesystem::path& path) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw Error(ErrorCode::ParseError, path.string() + ": bad magic, expected TGRA");
  }
  auto version = get_le<std::uint32_t>(in, path);
  if (version != kBinaryVersion) {
    throw Error(ErrorCode::ParseError,
                path.string() + ": unsupported version " + std::to_string(version));
  }
  auto num_vertices = get_le<std::uint64_t>(in, path);
  auto num_edges = get_le<std::uint64_t>(in, path);
  EdgeList edges;
  edges.reserve(num_edges);
  for (std::uint64_t i = 0; i < num_edges; ++i) {
    Edge e;
    e.src = get_le<std::uint32_t>(in, path);
    e.dst = get_le<std::uint32_t>(in, path);
    e.weight = get_le<std::uint32_t>(in, path);
    edges.push_back(e);
  }
  return build_csr(edges, num_vertices);
}

// 53-bit uniform double in [0, 1); portable, unlike std distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint32_t draw_weight(std::mt19937_64& rng) {
  return static_cast<std::uint32_t>(rng() % kMaxGeneratedWeight) + 1;
}

}  // namespace

CsrGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return format == EdgeListFormat::Binary ? load_binary(in, path) : load_text(in, path);
}

void save_edge_list(const std::filesystem::path& path, std::span<const Edge> edges,
                    std::uint64_t num_vertices) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kBinaryVersion);
  put_le<std::uint64_t>(out, num_vertices);
  put_le<std::uint64_t>(out, edges.size());
  for (const Edge& e : edges) {
    put_le<std::uint32_t>(out, e.src);
    put_le<std::uint32_t>(out, e.dst);
    put_le<std::uint32_t>(out, e.weight);
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void save_edge_list(const std::filesystem::path& path, const CsrGraph& g) {
  save_edge_list(path, g.to_edges(), g.num_vertices());
}

EdgeList generate_rmat(const RmatParams& params) {
  double sum = 0;
  for (double p : params.probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::BadProbabilities, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadProbabilities, "probabilities sum to " + std::to_string(sum));
  }
  if (params.scale > 31) throw Error(ErrorCode::ConfigError, "rmat scale must be <= 31");

  const auto [a, b, c, d] = params.probs;
  const std::uint64_t count = (std::uint64_t{1} << params.scale) * params.edge_factor;
  std::mt19937_64 rng(params.seed);
  EdgeList edges;
  edges.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t src = 0, dst = 0;
    for (unsigned level = 0; level < params.scale; ++level) {
      double r = unit(rng);
      src <<= 1;
      dst <<= 1;
      if (r < a) {
      } else if (r < a + b) {
        dst |= 1;
      } else if (r < a + b + c) {
        src |= 1;
      } else {
        src |= 1;
        dst |= 1;
      }
    }
    (void)d;
    edges.push_back({src, dst, draw_weight(rng)});
  }
  return edges;
}

void scramble_vertex_ids(EdgeList& edges, unsigned scale, std::uint64_t seed) {
  if (scale == 0) return;
  const std::uint64_t mask = (std::uint64_t{1} << scale) - 1;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  // Odd multipliers and right xorshifts are both bijective modulo 2^scale.
  const std::uint64_t m1 = rng() | 1, m2 = rng() | 1, add = rng();
  const unsigned shift = (scale + 1) / 2;
  auto permute = [&](std::uint64_t v) {
    v = (v * m1 + add) & mask;
    v ^= v >> shift;
    v = (v * m2) & mask;
    v ^= v >> shift;
    return v;
  };
  // Keep id 0 (the generator's hub) at 0 so a default source stays meaningful.
  const std::uint64_t pin = permute(0);
  for (Edge& e : edges) {
    e.src = static_cast<VertexId>(permute(e.src) ^ pin);
    e.dst = static_cast<VertexId>(permute(e.dst) ^ pin);
  }
}

EdgeList generate_uniform(std::uint64_t num_vertices, std::uint64_t num_edges,
                          std::uint64_t seed) {
  EdgeList edges;
  if (num_vertices == 0) return edges;
  std::mt19937_64 rng(seed);
  edges.reserve(num_edges);
  for (std::uint64_t i = 0; i < num_edges; ++i) {
    auto src = static_cast<VertexId>(rng() % num_vertices);
    auto dst = static_cast<VertexId>(rng() % num_vertices);
    edges.push_back({src, dst, draw_weight(rng)});
  }
  return edges;
}

Partition::Partition(std::uint32_t num_cores, std::uint64_t num_vertices,
                     PartitionScheme scheme)
    : num_cores_(num_cores), num_vertices_(num_vertices), scheme_(scheme) {
  if (num_cores == 0) throw Error(ErrorCode::ConfigError, "partition needs at least one core");
  block_ = std::max<std::uint64_t>(1, (num_vertices + num_cores - 1) / num_cores);
}

std::uint64_t Partition::owned_count(std::uint32_t core) const {
  if (scheme_ == PartitionScheme::Modulo) {
    return num_vertices_ / num_cores_ + (core < num_vertices_ % num_cores_ ? 1 : 0);
  }
  std::uint64_t begin = std::min(num_vertices_, std::uint64_t{core} * block_);
  std::uint64_t end = std::min(num_vertices_, begin + block_);
  return end - begin;
}

}  // namespace tegra
