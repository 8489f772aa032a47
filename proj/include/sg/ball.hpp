#pragma once
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sg/graph.hpp"

namespace sg {

// metric ball B_c(n) = {v : d(c,v) <= n}, members in BFS order from the
// center. inner boundary = members with a neighbor outside the ball; on this
// graph not every distance-n vertex qualifies (some have all neighbors
// inside), so the flags are computed from the n+1 layer, never assumed.
struct Ball {
  GraphFamily family;
  Vertex center;
  int radius = 0;
  std::vector<Vertex> members;    // BFS order
  std::vector<int32_t> dist;      // parallel to members
  std::vector<uint8_t> inner_bdy; // parallel to members
  std::unordered_map<uint64_t, int32_t, VertexHash> index;

  bool contains(const Vertex& v) const { return index.count(v.key()) > 0; }
  int32_t index_of(const Vertex& v) const {
    auto it = index.find(v.key());
    return it == index.end() ? -1 : it->second;
  }
  bool is_inner_boundary(const Vertex& v) const {
    int32_t i = index_of(v);
    return i >= 0 && inner_bdy[size_t(i)] != 0;
  }
  std::vector<Vertex> boundary_list() const;
  int64_t volume() const { return int64_t(members.size()); }
};

inline constexpr int kMaxBallRadius = 1 << 12;

std::shared_ptr<const Ball> ball(const GraphFamily& g, const Vertex& center,
                                 int radius);

// exact shortest-path length, bidirectional BFS
int64_t distance(const GraphFamily& g, const Vertex& x, const Vertex& y);

// |B_origin(n)|, memoized per family via a resumable BFS
int64_t ball_volume(const GraphFamily& g, int radius);

// min over inner-boundary vertices of d(z, y); whole-graph BFS, so shortcuts
// through the complement count
int distance_to_inner_boundary(const Ball& b, const Vertex& z);
std::vector<int> distances_to_inner_boundary(const Ball& b); // per member

// ===== origin table =====
// resumable BFS from the origin with flat CSR adjacency in index space.
// the hot loops (walks, cluster growth, sandpile sweeps) run on int32
// indices. adjacency rows are complete for dist <= adj_safe_dist.
struct OriginTable {
  GraphFamily family;
  std::vector<Vertex> verts;   // BFS order
  std::vector<int32_t> dist;
  std::vector<int64_t> layer_end; // layer_end[d] = #verts with dist <= d
  std::unordered_map<uint64_t, int32_t, VertexHash> index;
  std::vector<uint32_t> adj_off; // CSR, adj_off.size() == adj_built + 1
  std::vector<int32_t> adj;
  int max_dist = -1;      // BFS complete through this distance
  int64_t adj_built = 0;  // adjacency rows filled for verts[0..adj_built)

  explicit OriginTable(const GraphFamily& g);

  void ensure_radius(int r);     // extend BFS through distance r
  void ensure_adjacency(int r);  // fill CSR for all verts with dist <= r
  int adj_safe_dist() const;     // highest dist with complete CSR rows

  int64_t volume(int r) const { return layer_end[size_t(r)]; }
  int32_t index_of(const Vertex& v) const {
    auto it = index.find(v.key());
    return it == index.end() ? -1 : it->second;
  }
  int degree(int32_t i) const { return int(adj_off[i + 1] - adj_off[i]); }

  // inner-boundary flags of B_origin(n) over indices [0, volume(n));
  // extends BFS to n+1 as needed
  std::vector<uint8_t> boundary_mask(int n);
};

} // namespace sg
