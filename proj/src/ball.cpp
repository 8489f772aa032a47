#include "sg/ball.hpp"

#include <algorithm>
#include <deque>
#include <mutex>

#include "sg/error.hpp"

namespace sg {

std::vector<Vertex> Ball::boundary_list() const {
  std::vector<Vertex> out;
  for (size_t i = 0; i < members.size(); ++i)
    if (inner_bdy[i]) out.push_back(members[i]);
  return out;
}

std::shared_ptr<const Ball> ball(const GraphFamily& g, const Vertex& center,
                                 int radius) {
  if (radius < 0) throw DomainError("ball radius must be >= 0");
  if (radius > kMaxBallRadius)
    throw ResourceError("ball radius " + std::to_string(radius) +
                        " exceeds the cap " + std::to_string(kMaxBallRadius));
  if (!g.is_vertex(center))
    throw DomainError("ball center is not a vertex: " + format_vertex(center));

  auto b = std::make_shared<Ball>();
  b->family = g;
  b->center = center;
  b->radius = radius;

  // BFS one layer past the radius so boundary flags are exact
  std::unordered_map<uint64_t, int32_t, VertexHash> seen; // key -> dist
  std::deque<Vertex> q;
  seen[center.key()] = 0;
  q.push_back(center);
  std::array<Vertex, 6> nb;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    int32_t d = seen[v.key()];
    if (d <= radius) {
      b->members.push_back(v);
      b->dist.push_back(d);
    }
    if (d == radius + 1) continue;
    int cnt = g.neighbors(v, nb);
    for (int i = 0; i < cnt; ++i) {
      if (seen.emplace(nb[i].key(), d + 1).second) q.push_back(nb[i]);
    }
  }
  b->index.reserve(b->members.size() * 2);
  for (size_t i = 0; i < b->members.size(); ++i)
    b->index[b->members[i].key()] = int32_t(i);
  b->inner_bdy.assign(b->members.size(), 0);
  for (size_t i = 0; i < b->members.size(); ++i) {
    if (b->dist[i] < radius) continue; // neighbors can reach at most radius+1
    int cnt = g.neighbors(b->members[i], nb);
    for (int j = 0; j < cnt; ++j)
      if (!b->index.count(nb[j].key())) {
        b->inner_bdy[i] = 1;
        break;
      }
  }
  return b;
}

int64_t distance(const GraphFamily& g, const Vertex& x, const Vertex& y) {
  if (!g.is_vertex(x)) throw DomainError("not a vertex: " + format_vertex(x));
  if (!g.is_vertex(y)) throw DomainError("not a vertex: " + format_vertex(y));
  if (x == y) return 0;
  // bidirectional BFS, alternate expanding the smaller frontier
  std::unordered_map<uint64_t, int32_t, VertexHash> da, db;
  std::vector<Vertex> fa{x}, fb{y};
  da[x.key()] = 0;
  db[y.key()] = 0;
  int ra = 0, rb = 0;
  std::array<Vertex, 6> nb;
  while (!fa.empty() && !fb.empty()) {
    bool grow_a = fa.size() <= fb.size();
    auto& frontier = grow_a ? fa : fb;
    auto& mine = grow_a ? da : db;
    auto& theirs = grow_a ? db : da;
    int& r = grow_a ? ra : rb;
    std::vector<Vertex> next;
    for (const Vertex& v : frontier) {
      int cnt = g.neighbors(v, nb);
      for (int i = 0; i < cnt; ++i) {
        if (mine.count(nb[i].key())) continue;
        auto hit = theirs.find(nb[i].key());
        if (hit != theirs.end()) {
          // shortest path through nb[i]; other candidate meets at this level
          int64_t best = int64_t(r) + 1 + hit->second;
          // a meet one level shallower on the other side may still appear in
          // this frontier sweep, so finish the sweep tracking the min
          for (const Vertex& w : frontier) {
            int cnt2 = g.neighbors(w, nb);
            for (int j = 0; j < cnt2; ++j) {
              auto h2 = theirs.find(nb[j].key());
              if (h2 != theirs.end())
                best = std::min(best, int64_t(r) + 1 + h2->second);
            }
          }
          return best;
        }
        mine[nb[i].key()] = r + 1;
        next.push_back(nb[i]);
      }
    }
    frontier = std::move(next);
    ++r;
    if (ra + rb > 4 * kMaxBallRadius)
      throw ResourceError("distance search exceeded the radius cap");
  }
  throw DomainError("vertices are not connected"); // unreachable on these families
}

// ===== volume memo =====

namespace {
struct VolumeMemo {
  std::mutex mu;
  std::unordered_map<uint64_t, std::unique_ptr<OriginTable>> tables;
};
VolumeMemo& volume_memo() {
  static VolumeMemo m;
  return m;
}
} // namespace

int64_t ball_volume(const GraphFamily& g, int radius) {
  if (radius < 0) throw DomainError("radius must be >= 0");
  if (radius > kMaxBallRadius)
    throw ResourceError("radius " + std::to_string(radius) +
                        " exceeds the cap " + std::to_string(kMaxBallRadius));
  VolumeMemo& memo = volume_memo();
  std::lock_guard<std::mutex> lock(memo.mu);
  auto& slot = memo.tables[g.cache_key()];
  if (!slot) slot = std::make_unique<OriginTable>(g);
  slot->ensure_radius(radius);
  return slot->volume(radius);
}

int distance_to_inner_boundary(const Ball& b, const Vertex& z) {
  if (!b.contains(z))
    throw DomainError("vertex not in ball: " + format_vertex(z));
  // multi-source BFS from the boundary over the whole graph
  std::unordered_map<uint64_t, int32_t, VertexHash> seen;
  std::deque<Vertex> q;
  for (size_t i = 0; i < b.members.size(); ++i)
    if (b.inner_bdy[i]) {
      seen[b.members[i].key()] = 0;
      q.push_back(b.members[i]);
    }
  if (q.empty()) throw DomainError("ball has an empty inner boundary");
  uint64_t target = z.key();
  if (seen.count(target)) return 0;
  std::array<Vertex, 6> nb;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    int32_t d = seen[v.key()];
    int cnt = b.family.neighbors(v, nb);
    for (int i = 0; i < cnt; ++i) {
      if (seen.emplace(nb[i].key(), d + 1).second) {
        if (nb[i].key() == target) return d + 1;
        q.push_back(nb[i]);
      }
    }
  }
  throw DomainError("unreachable inner boundary");
}

std::vector<int> distances_to_inner_boundary(const Ball& b) {
  std::unordered_map<uint64_t, int32_t, VertexHash> seen;
  std::deque<Vertex> q;
  for (size_t i = 0; i < b.members.size(); ++i)
    if (b.inner_bdy[i]) {
      seen[b.members[i].key()] = 0;
      q.push_back(b.members[i]);
    }
  size_t found = 0;
  for (const auto& v : b.members)
    if (seen.count(v.key())) ++found;
  std::array<Vertex, 6> nb;
  while (!q.empty() && found < b.members.size()) {
    Vertex v = q.front();
    q.pop_front();
    int32_t d = seen[v.key()];
    int cnt = b.family.neighbors(v, nb);
    for (int i = 0; i < cnt; ++i) {
      if (seen.emplace(nb[i].key(), d + 1).second) {
        if (b.contains(nb[i])) ++found;
        q.push_back(nb[i]);
      }
    }
  }
  std::vector<int> out(b.members.size(), -1);
  for (size_t i = 0; i < b.members.size(); ++i) {
    auto it = seen.find(b.members[i].key());
    if (it != seen.end()) out[i] = it->second;
  }
  return out;
}

// ===== origin table =====

OriginTable::OriginTable(const GraphFamily& g) : family(g) {
  verts.push_back(origin());
  dist.push_back(0);
  index[origin().key()] = 0;
  layer_end.push_back(1);
  max_dist = 0;
  adj_off.push_back(0);
}

void OriginTable::ensure_radius(int r) {
  if (r > kMaxBallRadius)
    throw ResourceError("origin table radius " + std::to_string(r) +
                        " exceeds the cap");
  std::array<Vertex, 6> nb;
  while (max_dist < r) {
    int64_t lo = max_dist == 0 ? 0 : layer_end[size_t(max_dist) - 1];
    int64_t hi = layer_end[size_t(max_dist)];
    for (int64_t i = lo; i < hi; ++i) {
      Vertex v = verts[size_t(i)]; // copy, push_back may reallocate
      int cnt = family.neighbors(v, nb);
      for (int j = 0; j < cnt; ++j) {
        if (index.emplace(nb[j].key(), int32_t(verts.size())).second) {
          verts.push_back(nb[j]);
          dist.push_back(max_dist + 1);
        }
      }
    }
    layer_end.push_back(int64_t(verts.size()));
    ++max_dist;
  }
}

void OriginTable::ensure_adjacency(int r) {
  ensure_radius(r + 1); // rows complete only when all neighbors are indexed
  int64_t upto = layer_end[size_t(r)];
  std::array<Vertex, 6> nb;
  for (int64_t i = adj_built; i < upto; ++i) {
    int cnt = family.neighbors(verts[size_t(i)], nb);
    for (int j = 0; j < cnt; ++j) {
      auto it = index.find(nb[j].key());
      adj.push_back(it->second);
    }
    adj_off.push_back(uint32_t(adj.size()));
  }
  if (upto > adj_built) adj_built = upto;
}

int OriginTable::adj_safe_dist() const {
  // adjacency rows exist for verts[0..adj_built); find the deepest complete layer
  int d = -1;
  for (size_t k = 0; k < layer_end.size(); ++k)
    if (layer_end[k] <= adj_built) d = int(k);
  return d;
}

std::vector<uint8_t> OriginTable::boundary_mask(int n) {
  // marks sites with an edge leaving B(n). The walk's exit time is the
  // hitting time of this set; interior sites of the outermost layer (on a
  // dyadic ball, everything on the hypotenuse except the far corners)
  // reflect back inside and stay unmarked. Matches the Dirichlet interior.
  ensure_adjacency(n);
  int64_t vol = layer_end[size_t(n)];
  std::vector<uint8_t> mask(size_t(vol), 0);
  int64_t lo = n == 0 ? 0 : layer_end[size_t(n) - 1];
  for (int64_t i = lo; i < vol; ++i) {
    for (uint32_t e = adj_off[size_t(i)]; e < adj_off[size_t(i) + 1]; ++e)
      if (adj[e] >= vol) {
        mask[size_t(i)] = 1;
        break;
      }
  }
  return mask;
}

} // namespace sg
