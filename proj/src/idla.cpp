#include "sg/idla.hpp"

#include <algorithm>
#include <cmath>

#include "sg/error.hpp"

namespace sg {

namespace {

constexpr double kVolumeExponent = 1.584962500721156; // log 3 / log 2
constexpr int64_t kWalkStepCap = 2'000'000'000; // per-walker runaway guard

// dense index-space walker over the origin BFS table. every step starts from
// an occupied vertex, so adjacency two layers past the occupied radius is
// always enough.
struct IdlaEngine {
  OriginTable table;
  std::vector<uint8_t> occ;
  int r_occ = -1;
  int covered = -1;

  explicit IdlaEngine(const GraphFamily& g) : table(g) { ensure(2); }

  void ensure(int need) {
    if (need <= covered) return;
    if (need > kMaxBallRadius)
      throw ResourceError("aggregate radius exceeds the table limit");
    covered = need;
    table.ensure_adjacency(covered);
    occ.resize(table.verts.size(), 0);
  }

  int32_t locate(const Vertex& v) {
    int32_t i = table.index_of(v);
    while (i < 0) {
      if (table.max_dist >= kMaxBallRadius)
        throw DomainError("vertex unreachable: " + format_vertex(v));
      table.ensure_radius(
          std::min(std::max(4, table.max_dist * 2), kMaxBallRadius));
      i = table.index_of(v);
    }
    occ.resize(table.verts.size(), 0);
    return i;
  }

  void mark(int32_t i) {
    occ[size_t(i)] = 1;
    if (table.dist[size_t(i)] > r_occ) {
      r_occ = table.dist[size_t(i)];
      ensure(r_occ + 2);
    }
  }

  int32_t step(RngStream& rs, int32_t pos) const {
    uint32_t lo = table.adj_off[size_t(pos)];
    uint32_t deg = table.adj_off[size_t(pos) + 1] - lo;
    return table.adj[lo + rs.uniform_below(deg)];
  }

  // walk from `start` until the first unoccupied vertex, or until the walker
  // leaves B_origin(absorb) when absorb >= 0. returns the stop index;
  // *paused reports which case fired.
  int32_t walk(RngStream& rs, int32_t start, int64_t absorb,
               bool* paused) const {
    int32_t pos = start;
    for (int64_t t = 0;; ++t) {
      if (absorb >= 0 && table.dist[size_t(pos)] > absorb) {
        *paused = true;
        return pos;
      }
      if (!occ[size_t(pos)]) {
        *paused = false;
        return pos;
      }
      if (t >= kWalkStepCap) throw NumericError("walker exceeded the step cap");
      pos = step(rs, pos);
    }
  }
};

void settle_into(Cluster& c, IdlaEngine& eng, int32_t idx) {
  eng.mark(idx);
  const Vertex& v = eng.table.verts[size_t(idx)];
  c.occupied.insert(v.key());
  c.settle_order.push_back(v);
  ++c.particle_count;
}

} // namespace

// ===== growth =====

Cluster grow(const GraphFamily& g, int64_t particles, uint64_t master_seed) {
  if (particles < 0) throw DomainError("grow: particle count must be >= 0");
  IdlaEngine eng(g);
  Cluster c;
  c.family = g;
  for (int64_t i = 0; i < particles; ++i) {
    RngStream rs = RngStream::from(master_seed, uint64_t(i));
    bool paused = false;
    int32_t idx = eng.walk(rs, 0, -1, &paused);
    settle_into(c, eng, idx);
  }
  return c;
}

StoppedState grow_stopped(const GraphFamily& g, int64_t particles,
                          int absorb_radius, uint64_t master_seed) {
  if (particles < 0) throw DomainError("grow_stopped: particle count must be >= 0");
  if (absorb_radius < 0)
    throw DomainError("grow_stopped: absorb radius must be >= 0");
  IdlaEngine eng(g);
  StoppedState st;
  st.cluster.family = g;
  st.absorb_radius = absorb_radius;
  st.launched = particles;
  for (int64_t i = 0; i < particles; ++i) {
    RngStream rs = RngStream::from(master_seed, uint64_t(i));
    bool paused = false;
    int32_t idx = eng.walk(rs, 0, absorb_radius, &paused);
    if (paused) {
      st.paused.push_back({eng.table.verts[size_t(idx)], rs.key, rs.counter});
    } else {
      settle_into(st.cluster, eng, idx);
    }
  }
  return st;
}

StoppedState grow_stopped_onto_ball(const GraphFamily& g, int n,
                                    int64_t particles, int absorb_radius,
                                    uint64_t master_seed) {
  if (n < 0) throw DomainError("grow_stopped_onto_ball: n must be >= 0");
  if (particles < 0)
    throw DomainError("grow_stopped_onto_ball: particle count must be >= 0");
  if (absorb_radius < n)
    throw DomainError("grow_stopped_onto_ball: absorb radius must be >= n");
  IdlaEngine eng(g);
  eng.ensure(n + 2);
  eng.table.ensure_radius(n);
  StoppedState st;
  st.cluster.family = g;
  st.absorb_radius = absorb_radius;
  st.launched = particles;
  for (int64_t i = 0; i < eng.table.volume(n); ++i) {
    eng.mark(int32_t(i));
    st.cluster.occupied.insert(eng.table.verts[size_t(i)].key());
  }
  for (int64_t i = 0; i < particles; ++i) {
    RngStream rs = RngStream::from(master_seed, uint64_t(i));
    bool paused = false;
    int32_t idx = eng.walk(rs, 0, absorb_radius, &paused);
    if (paused) {
      st.paused.push_back({eng.table.verts[size_t(idx)], rs.key, rs.counter});
    } else {
      settle_into(st.cluster, eng, idx);
    }
  }
  return st;
}

void resume(StoppedState& state, int new_radius) {
  if (new_radius < -1)
    throw DomainError("resume: radius must be >= 0, or -1 for none");
  IdlaEngine eng(state.cluster.family);
  for (uint64_t key : state.cluster.occupied)
    eng.mark(eng.locate(Vertex::from_key(key)));
  std::vector<PausedParticle> still;
  for (const PausedParticle& p : state.paused) {
    RngStream rs;
    rs.key = p.rng_key;
    rs.counter = p.rng_counter;
    int32_t start = eng.locate(p.pos);
    bool paused = false;
    int32_t idx = eng.walk(rs, start, new_radius, &paused);
    if (paused) {
      still.push_back({eng.table.verts[size_t(idx)], rs.key, rs.counter});
    } else {
      settle_into(state.cluster, eng, idx);
    }
  }
  state.paused = std::move(still);
  state.absorb_radius = new_radius;
}

// ===== hit counters =====

MlCounters ml_counters(const GraphFamily& g, int n, const Vertex& z,
                       uint64_t master_seed) {
  if (n < 1) throw DomainError("ml_counters: n must be >= 1");
  if (!g.is_vertex(z)) throw DomainError("ml_counters: z is not a lattice vertex");
  IdlaEngine eng(g);
  eng.ensure(n + 2);
  eng.table.ensure_radius(n + 1);
  std::vector<uint8_t> bmask = eng.table.boundary_mask(n);
  int64_t vol = eng.table.volume(n);
  int32_t z_idx = eng.locate(z);

  MlCounters out;
  Cluster scratch;
  scratch.family = g;
  for (int64_t i = 0; i < vol; ++i) {
    RngStream rs = RngStream::from(master_seed, uint64_t(i));
    int32_t pos = 0;
    int64_t t = 0, hit = -1, settled = -1, exited = -1;
    while (true) {
      if (hit < 0 && pos == z_idx) hit = t;
      if (exited < 0 && (pos >= vol || bmask[size_t(pos)])) exited = t;
      if (settled < 0 && !eng.occ[size_t(pos)]) {
        settled = t;
        settle_into(scratch, eng, pos);
      }
      if (settled >= 0 && exited >= 0) break;
      if (t >= kWalkStepCap) throw NumericError("walker exceeded the step cap");
      pos = eng.step(rs, pos);
      ++t;
    }
    if (hit >= 0 && hit < exited) {
      ++out.m;
      if (settled < hit) ++out.l;
    }
  }
  out.z_in_cluster = eng.occ[size_t(z_idx)] != 0;
  return out;
}

int64_t ltilde_run(const GraphFamily& g, int n, const Vertex& z,
                   uint64_t master_seed) {
  if (n < 1) throw DomainError("ltilde_run: n must be >= 1");
  if (!g.is_vertex(z)) throw DomainError("ltilde_run: z is not a lattice vertex");
  OriginTable table(g);
  table.ensure_adjacency(n);
  std::vector<uint8_t> bmask = table.boundary_mask(n);
  int64_t vol = table.volume(n);
  int32_t z_idx = table.index_of(z);

  int64_t hits = 0;
  for (int64_t y = 0; y < vol; ++y) {
    RngStream rs = RngStream::from(master_seed, uint64_t(y));
    int32_t pos = int32_t(y);
    for (int64_t t = 0;; ++t) {
      if (pos >= vol || bmask[size_t(pos)]) break;
      if (pos == z_idx) {
        ++hits;
        break;
      }
      if (t >= kWalkStepCap) throw NumericError("walker exceeded the step cap");
      uint32_t lo = table.adj_off[size_t(pos)];
      uint32_t deg = table.adj_off[size_t(pos) + 1] - lo;
      pos = table.adj[lo + rs.uniform_below(deg)];
    }
  }
  return hits;
}

// ===== shape statistics =====

RadiusStats radii(const Cluster& c) {
  if (c.particle_count <= 0 || c.occupied.empty())
    throw DomainError("radii: empty aggregate");
  OriginTable table(c.family);
  table.ensure_radius(2);

  RadiusStats out;
  // first gap in BFS order bounds the filled radius
  int64_t i = 0;
  while (true) {
    while (i >= int64_t(table.verts.size())) {
      if (table.max_dist >= kMaxBallRadius)
        throw ResourceError("radii: aggregate exceeds the table limit");
      table.ensure_radius(std::min(table.max_dist * 2 + 2, kMaxBallRadius));
    }
    if (!c.occupied.count(table.verts[size_t(i)].key())) break;
    ++i;
  }
  out.r_in = int64_t(table.dist[size_t(i)]) - 1;

  for (uint64_t key : c.occupied) {
    Vertex v = Vertex::from_key(key);
    int32_t j = table.index_of(v);
    while (j < 0) {
      if (table.max_dist >= kMaxBallRadius)
        throw ResourceError("radii: aggregate exceeds the table limit");
      table.ensure_radius(std::min(table.max_dist * 2 + 2, kMaxBallRadius));
      j = table.index_of(v);
    }
    out.r_out = std::max(out.r_out, int64_t(table.dist[size_t(j)]));
  }

  int nominal = int(std::max<int64_t>(out.r_in, 0));
  while (ball_volume(c.family, nominal + 1) <= c.particle_count) ++nominal;
  out.nominal = nominal;
  out.inner_defect = int64_t(nominal) - out.r_in;
  out.outer_excess = out.r_out - int64_t(nominal);
  out.exact = out.inner_defect == 0 && out.outer_excess == 0;
  return out;
}

// ===== staged pipeline =====

std::vector<int64_t> stopped_pipeline_trace(const GraphFamily& g, int n,
                                            uint64_t master_seed) {
  if (n < 1) throw DomainError("pipeline: n must be >= 1");
  int64_t particles = ball_volume(g, n);
  StoppedState st = grow_stopped(g, particles, n, master_seed);
  std::vector<int64_t> trace;
  trace.push_back(int64_t(st.paused.size()));
  double radius = double(n);
  int stages = 0;
  while (double(st.paused.size()) >
         std::pow(radius, 1.0 / (kVolumeExponent + 1.0))) {
    if (++stages > 1000)
      throw NumericError("pipeline: stage cap reached");
    radius += std::ceil(std::pow(double(st.paused.size()), 1.0 / kVolumeExponent));
    resume(st, int(radius));
    trace.push_back(int64_t(st.paused.size()));
  }
  resume(st, -1);
  return trace;
}

} // namespace sg
