#include "sg/graph.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "sg/error.hpp"

namespace sg {

GraphFamily GraphFamily::doubled() {
  GraphFamily g;
  g.kind = FamilyKind::DoubledSG;
  g.subdivision = 2;
  g.block_shifts = {{0, 0}, {1, 0}, {0, 1}};
  return g;
}

GraphFamily GraphFamily::one_sided() {
  GraphFamily g = doubled();
  g.kind = FamilyKind::OneSidedSG;
  return g;
}

GraphFamily GraphFamily::nine_copy() {
  GraphFamily g;
  g.kind = FamilyKind::ModifiedNineCopy;
  g.subdivision = 3;
  g.block_shifts = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {0, 2}};
  return g;
}

GraphFamily GraphFamily::custom_copy(int m, std::vector<LatticePoint> shifts) {
  if (m < 2) throw DomainError("subdivision factor must be >= 2");
  bool has_origin = false;
  for (const auto& s : shifts) {
    if (s.a < 0 || s.b < 0 || s.a + s.b > m - 1)
      throw DomainError("block shift must be an upward block position: "
                        "0 <= A, B and A+B <= m-1");
    if (s.a == 0 && s.b == 0) has_origin = true;
  }
  if (!has_origin) throw DomainError("block shifts must include (0,0)");
  GraphFamily g;
  g.kind = FamilyKind::ModifiedNineCopy;
  g.subdivision = m;
  g.block_shifts = std::move(shifts);
  std::sort(g.block_shifts.begin(), g.block_shifts.end(),
            [](const LatticePoint& x, const LatticePoint& y) {
              return x.b != y.b ? x.b < y.b : x.a < y.a;
            });
  g.block_shifts.erase(std::unique(g.block_shifts.begin(), g.block_shifts.end()),
                       g.block_shifts.end());
  return g;
}

const char* GraphFamily::name() const {
  switch (kind) {
    case FamilyKind::DoubledSG: return "doubled";
    case FamilyKind::OneSidedSG: return "one-sided";
    case FamilyKind::ModifiedNineCopy: return "nine-copy";
  }
  return "?";
}

uint64_t GraphFamily::cache_key() const {
  uint64_t h = mix64(uint64_t(kind) * 0x100 + uint64_t(subdivision));
  for (const auto& s : block_shifts)
    h = mix64(h ^ (uint64_t(s.a) << 32 | uint64_t(uint32_t(s.b))));
  return h;
}

bool GraphFamily::cell_kept(int64_t a, int64_t b) const {
  if (a < 0 || b < 0) return false;
  if (subdivision == 2 && block_shifts.size() == 3) return (a & b) == 0;
  const int m = subdivision;
  while (a != 0 || b != 0) {
    int da = int(a % m), db = int(b % m);
    bool ok = false;
    for (const auto& s : block_shifts)
      if (s.a == da && s.b == db) { ok = true; break; }
    if (!ok) return false;
    a /= m;
    b /= m;
  }
  return true;
}

bool GraphFamily::is_vertex(const Vertex& v) const {
  if (v.a < 0 || v.b < 0) return false;
  if (v.side == Side::Left && !doubled_sides()) return false;
  // a lattice point is a vertex iff it is a corner of a retained cell;
  // the candidate cells are (a,b), (a-1,b), (a,b-1)
  if (cell_kept(v.a, v.b)) return true;
  if (v.a >= 1 && cell_kept(v.a - 1, v.b)) return true;
  if (v.b >= 1 && cell_kept(v.a, v.b - 1)) return true;
  return false;
}

int GraphFamily::neighbors(const Vertex& v, std::array<Vertex, 6>& out) const {
  if (!is_vertex(v)) throw DomainError("not a vertex: " + format_vertex(v));
  if (v.is_origin() && doubled_sides()) {
    // cell (0,0) is always retained, so the one-sided origin sees (1,0),(0,1);
    // the glued copy mirrors them
    out[0] = Vertex(Side::Right, 1, 0);
    out[1] = Vertex(Side::Right, 0, 1);
    out[2] = Vertex(Side::Left, 1, 0);
    out[3] = Vertex(Side::Left, 0, 1);
    return 4;
  }
  const int64_t a = v.a, b = v.b;
  const bool c0 = cell_kept(a, b);                // east / north edges
  const bool cw = a >= 1 && cell_kept(a - 1, b);  // west / northwest
  const bool cs = b >= 1 && cell_kept(a, b - 1);  // south / southeast
  int cnt = 0;
  auto push = [&](int64_t na, int64_t nb) {
    // Vertex ctor canonicalizes (0,0) to Side::Right
    out[cnt++] = Vertex(v.side, int32_t(na), int32_t(nb));
  };
  if (c0) push(a + 1, b);      // E
  if (c0) push(a, b + 1);      // N
  if (cw) push(a - 1, b + 1);  // NW
  if (cw) push(a - 1, b);      // W
  if (cs) push(a, b - 1);      // S
  if (cs) push(a + 1, b - 1);  // SE
  return cnt;
}

std::vector<Vertex> GraphFamily::neighbor_list(const Vertex& v) const {
  std::array<Vertex, 6> buf;
  int n = neighbors(v, buf);
  return std::vector<Vertex>(buf.begin(), buf.begin() + n);
}

int GraphFamily::degree(const Vertex& v) const {
  std::array<Vertex, 6> buf;
  return neighbors(v, buf);
}

bool edge_exists(const GraphFamily& g, const Vertex& u, const Vertex& v) {
  if (!g.is_vertex(u) || !g.is_vertex(v)) return false;
  std::array<Vertex, 6> buf;
  int n = g.neighbors(u, buf);
  for (int i = 0; i < n; ++i)
    if (buf[i] == v) return true;
  return false;
}

// ===== literal corner recursion =====

namespace {

uint64_t pack_point(const LatticePoint& p) {
  return (uint64_t(uint32_t(p.a)) << 32) | uint64_t(uint32_t(p.b));
}
LatticePoint unpack_point(uint64_t k) {
  return LatticePoint{int64_t(uint32_t(k >> 32)), int64_t(uint32_t(k))};
}
// edge key with canonical endpoint order
std::pair<uint64_t, uint64_t> edge_key(uint64_t p, uint64_t q) {
  return p < q ? std::make_pair(p, q) : std::make_pair(q, p);
}
struct PairHash {
  size_t operator()(const std::pair<uint64_t, uint64_t>& e) const {
    return size_t(mix64(e.first * 0x9E3779B97F4A7C15ull ^ mix64(e.second)));
  }
};

bool point_less(const LatticePoint& x, const LatticePoint& y) {
  return x.a != y.a ? x.a < y.a : x.b < y.b;
}

} // namespace

LevelGraph recursive_construct(const GraphFamily& g, int level) {
  if (level < 0) throw DomainError("level must be >= 0");
  // memory cap: edge count is |shifts|^level * 3
  double edges_est = 3.0;
  for (int i = 0; i < level; ++i) edges_est *= double(g.block_shifts.size());
  if (edges_est > 8e6)
    throw ResourceError("recursive_construct: level " + std::to_string(level) +
                        " exceeds the edge budget");

  std::unordered_set<uint64_t> verts;
  std::unordered_set<std::pair<uint64_t, uint64_t>, PairHash> edges;
  verts.insert(pack_point({0, 0}));
  verts.insert(pack_point({1, 0}));
  verts.insert(pack_point({0, 1}));
  edges.insert(edge_key(pack_point({0, 0}), pack_point({1, 0})));
  edges.insert(edge_key(pack_point({0, 0}), pack_point({0, 1})));
  edges.insert(edge_key(pack_point({1, 0}), pack_point({0, 1})));

  int64_t scale = 1;
  for (int lev = 0; lev < level; ++lev) {
    std::vector<uint64_t> vsnap(verts.begin(), verts.end());
    std::vector<std::pair<uint64_t, uint64_t>> esnap(edges.begin(), edges.end());
    for (const auto& s : g.block_shifts) {
      if (s.a == 0 && s.b == 0) continue;
      int64_t da = s.a * scale, db = s.b * scale;
      auto shift = [&](uint64_t k) {
        LatticePoint p = unpack_point(k);
        return pack_point({p.a + da, p.b + db});
      };
      for (uint64_t k : vsnap) verts.insert(shift(k));
      for (const auto& e : esnap)
        edges.insert(edge_key(shift(e.first), shift(e.second)));
    }
    scale *= g.subdivision;
  }

  LevelGraph out;
  out.vertices.reserve(verts.size());
  for (uint64_t k : verts) out.vertices.push_back(unpack_point(k));
  std::sort(out.vertices.begin(), out.vertices.end(), point_less);
  out.edges.reserve(edges.size());
  for (const auto& e : edges)
    out.edges.emplace_back(unpack_point(e.first), unpack_point(e.second));
  std::sort(out.edges.begin(), out.edges.end(),
            [](const auto& x, const auto& y) {
              if (point_less(x.first, y.first)) return true;
              if (point_less(y.first, x.first)) return false;
              return point_less(x.second, y.second);
            });
  return out;
}

int64_t oracle_mismatch_count(const GraphFamily& g, int level) {
  LevelGraph lg = recursive_construct(g, level);
  int64_t span = 1;
  for (int i = 0; i < level; ++i) span *= g.subdivision;

  std::unordered_set<uint64_t> vset;
  for (const auto& p : lg.vertices) vset.insert(pack_point(p));
  std::unordered_map<uint64_t, std::vector<uint64_t>> adj;
  for (const auto& e : lg.edges) {
    adj[pack_point(e.first)].push_back(pack_point(e.second));
    adj[pack_point(e.second)].push_back(pack_point(e.first));
  }

  GraphFamily one = g;
  if (one.kind == FamilyKind::DoubledSG) one.kind = FamilyKind::OneSidedSG;

  int64_t mismatches = 0;

  // vertex sets must agree on the level triangle
  for (int64_t b = 0; b <= span; ++b)
    for (int64_t a = 0; a + b <= span; ++a) {
      bool formula = one.is_vertex(Vertex(Side::Right, int32_t(a), int32_t(b)));
      bool recur = vset.count(pack_point({a, b})) > 0;
      if (formula != recur) ++mismatches;
    }

  // adjacency must agree once formula neighbors are clipped to the triangle
  for (const auto& p : lg.vertices) {
    std::vector<uint64_t> want = adj[pack_point(p)];
    std::sort(want.begin(), want.end());
    std::vector<uint64_t> got;
    for (const auto& nb :
         one.neighbor_list(Vertex(Side::Right, int32_t(p.a), int32_t(p.b)))) {
      if (vset.count(pack_point({nb.a, nb.b})))
        got.push_back(pack_point({nb.a, nb.b}));
    }
    std::sort(got.begin(), got.end());
    if (want != got) ++mismatches;
  }
  return mismatches;
}

} // namespace sg
