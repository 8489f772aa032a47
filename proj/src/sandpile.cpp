#include "sg/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "sg/error.hpp"

namespace sg {

namespace {

constexpr double kExitExponent = 2.321928094887362; // log 5 / log 2

// excess-to-odometer conversion scales like the exit time of the active
// region, so the sweep cutoff deepens as the pile spreads
double cutoff_for(double tol, int active_radius) {
  double r = double(std::max(active_radius, 1));
  return tol / (2.0 * std::pow(r, kExitExponent));
}

} // namespace

// ===== sand states =====

SandState SandState::point_mass(double m, const Vertex& at) {
  if (!(m >= 0.0)) throw DomainError("point_mass: mass must be >= 0");
  SandState s;
  if (m > 0.0) s.mass[at.key()] = m;
  s.total_mass = m;
  return s;
}

double SandState::mass_at(const Vertex& v) const {
  auto it = mass.find(v.key());
  return it == mass.end() ? 0.0 : it->second;
}

double SandState::odometer_at(const Vertex& v) const {
  auto it = odometer.find(v.key());
  return it == odometer.end() ? 0.0 : it->second;
}

void SandState::add_mass(const Vertex& v, double m) {
  if (!(m >= 0.0)) throw DomainError("add_mass: mass must be >= 0");
  if (m == 0.0) return;
  mass[v.key()] += m;
  total_mass += m;
}

SandState topple(const GraphFamily& g, SandState state, const Vertex& x) {
  if (!g.is_vertex(x)) throw DomainError("topple: not a lattice vertex");
  double e = state.mass_at(x) - 1.0;
  if (e <= 0.0) return state;
  std::array<Vertex, 6> nb;
  int deg = g.neighbors(x, nb);
  double share = e / double(deg);
  state.mass[x.key()] -= e;
  state.odometer[x.key()] += e;
  for (int i = 0; i < deg; ++i) state.mass[nb[size_t(i)].key()] += share;
  return state;
}

// ===== schedules =====

ToppleSchedule ToppleSchedule::parallel_sweep() { return {}; }
ToppleSchedule ToppleSchedule::priority_queue() {
  ToppleSchedule s;
  s.kind = Kind::PriorityQueue;
  return s;
}
ToppleSchedule ToppleSchedule::fixed_cycle_ascending() {
  ToppleSchedule s;
  s.kind = Kind::FixedCycle;
  return s;
}
ToppleSchedule ToppleSchedule::fixed_cycle_descending() {
  ToppleSchedule s;
  s.kind = Kind::FixedCycle;
  s.descending = true;
  return s;
}
ToppleSchedule ToppleSchedule::fixed_cycle(std::vector<Vertex> order) {
  ToppleSchedule s;
  s.kind = Kind::FixedCycle;
  s.cycle = std::move(order);
  return s;
}

std::string ToppleSchedule::name() const {
  switch (kind) {
    case Kind::ParallelSweep: return "parallel";
    case Kind::PriorityQueue: return "priority-queue";
    case Kind::FixedCycle:
      if (!cycle.empty()) return "fixed-cycle";
      return descending ? "cycle-descending" : "cycle-ascending";
  }
  return "unknown";
}

// ===== stabilization =====

namespace {

// dense engine over the origin BFS table. indices [0, limit) have complete
// adjacency rows; topples only happen there, and the window grows two layers
// ahead of the highest unstable vertex.
struct DenseEngine {
  OriginTable table;
  std::vector<double> mass;
  std::vector<double> odo;
  int64_t limit = 0;
  int covered = 0;    // ensure_adjacency done through this radius
  int active = 1;     // highest distance ever seen unstable
  double tol;
  double cutoff;
  int64_t rounds = 0;
  int64_t round_cap;

  DenseEngine(const GraphFamily& g, const SandState& mass0, double tol_,
                int64_t cap)
      : table(g), tol(tol_), round_cap(cap) {
    if (!(tol > 0.0)) throw DomainError("stabilize: tol must be > 0");
    int far = 0;
    for (const auto& [key, m] : mass0.mass) {
      Vertex v = Vertex::from_key(key);
      if (!g.is_vertex(v))
        throw DomainError("stabilize: mass on " + format_vertex(v) +
                          " which is not a lattice vertex");
      far = std::max(far, locate(v));
      (void)m;
    }
    grow(far);
    for (const auto& [key, m] : mass0.mass)
      mass[size_t(table.index_of(Vertex::from_key(key)))] = m;
    cutoff = cutoff_for(tol, active);
  }

  // BFS distance of v from the origin, extending the table as needed
  int locate(const Vertex& v) {
    int32_t i = table.index_of(v);
    while (i < 0) {
      if (table.max_dist >= kMaxBallRadius)
        throw DomainError("stabilize: support too far from the origin");
      table.ensure_radius(std::min(std::max(4, table.max_dist * 2),
                                   kMaxBallRadius));
      i = table.index_of(v);
    }
    return table.dist[size_t(i)];
  }

  void grow(int need) {
    if (need + 2 <= covered && !mass.empty()) return;
    covered = std::max(covered, need + 2);
    table.ensure_adjacency(covered);
    limit = table.volume(covered);
    mass.resize(table.verts.size(), 0.0);
    odo.resize(table.verts.size(), 0.0);
  }

  void note_unstable(int d) {
    if (d > active) {
      active = d;
      cutoff = std::min(cutoff, cutoff_for(tol, active));
      if (d + 2 > covered) grow(d);
    }
  }

  // scan everything (writes can land one layer past the window); returns the
  // largest excess and records how far instability reaches
  double max_excess() {
    double worst = 0.0;
    int far = 0;
    for (size_t i = 0; i < mass.size(); ++i) {
      double e = mass[i] - 1.0;
      if (e > worst) worst = e;
      if (e > 0.0 && table.dist[i] > far) far = table.dist[i];
    }
    if (worst > 0.0) note_unstable(far);
    return worst;
  }

  void bump_rounds(const char* what) {
    if (++rounds > round_cap)
      throw NumericError(std::string("stabilize: ") + what +
                         " cap reached before the pile settled");
  }

  void apply_at(int64_t i) {
    double e = mass[size_t(i)] - 1.0;
    if (e <= 0.0) return;
    uint32_t lo = table.adj_off[size_t(i)], hi = table.adj_off[size_t(i) + 1];
    double share = e / double(hi - lo);
    mass[size_t(i)] = 1.0;
    odo[size_t(i)] += e;
    for (uint32_t a = lo; a < hi; ++a)
      mass[size_t(table.adj[a])] += share;
  }

  void run_jacobi() {
    std::vector<double> emit;
    while (max_excess() > cutoff) {
      bump_rounds("round");
      emit.assign(size_t(limit), 0.0);
      for (int64_t i = 0; i < limit; ++i) {
        double e = mass[size_t(i)] - 1.0;
        if (e > 0.0) emit[size_t(i)] = e;
      }
      for (int64_t i = 0; i < limit; ++i) {
        double e = emit[size_t(i)];
        if (e <= 0.0) continue;
        uint32_t lo = table.adj_off[size_t(i)], hi = table.adj_off[size_t(i) + 1];
        double share = e / double(hi - lo);
        mass[size_t(i)] -= e;
        odo[size_t(i)] += e;
        for (uint32_t a = lo; a < hi; ++a)
          mass[size_t(table.adj[a])] += share;
      }
    }
  }

  void run_cycle(bool descending) {
    while (max_excess() > cutoff) {
      bump_rounds("round");
      if (descending) {
        for (int64_t i = limit - 1; i >= 0; --i) apply_at(i);
      } else {
        for (int64_t i = 0; i < limit; ++i) apply_at(i);
      }
    }
  }

  void run_cycle_explicit(const std::vector<Vertex>& cycle) {
    std::vector<int32_t> order;
    order.reserve(cycle.size());
    int far = 0;
    for (const Vertex& v : cycle) {
      if (!table.family.is_vertex(v))
        throw DomainError("stabilize: cycle vertex " + format_vertex(v) +
                          " is not a lattice vertex");
      far = std::max(far, locate(v));
      order.push_back(table.index_of(v));
    }
    grow(far);
    while (max_excess() > cutoff) {
      bump_rounds("round");
      for (int32_t i : order) apply_at(i);
    }
  }

  void run_priority_queue() {
    using Entry = std::pair<double, int32_t>;
    std::priority_queue<Entry> pq;
    while (true) {
      double worst = max_excess();
      if (worst <= cutoff) break;
      for (size_t i = 0; i < mass.size(); ++i)
        if (mass[i] - 1.0 > cutoff) pq.emplace(mass[i] - 1.0, int32_t(i));
      while (!pq.empty()) {
        auto [stored, i] = pq.top();
        pq.pop();
        double e = mass[size_t(i)] - 1.0;
        if (e <= cutoff) continue;
        if (e < stored * 0.5) { // stale entry, requeue at its current size
          pq.emplace(e, i);
          continue;
        }
        note_unstable(table.dist[size_t(i)]);
        bump_rounds("topple");
        apply_at(i);
        uint32_t lo = table.adj_off[size_t(i)], hi = table.adj_off[size_t(i) + 1];
        for (uint32_t a = lo; a < hi; ++a) {
          int32_t j = table.adj[a];
          if (mass[size_t(j)] - 1.0 > cutoff) pq.emplace(mass[size_t(j)] - 1.0, j);
        }
      }
    }
  }

  SandState extract(double total) const {
    SandState out;
    out.total_mass = total;
    for (size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] != 0.0) out.mass[table.verts[i].key()] = mass[i];
      if (odo[i] > 0.0) out.odometer[table.verts[i].key()] = odo[i];
    }
    return out;
  }
};

} // namespace

SandState stabilize(const GraphFamily& g, const SandState& mass0,
                    const ToppleSchedule& schedule, double tol,
                    int64_t round_cap) {
  DenseEngine eng(g, mass0, tol, round_cap);
  switch (schedule.kind) {
    case ToppleSchedule::Kind::ParallelSweep:
      eng.run_jacobi();
      break;
    case ToppleSchedule::Kind::PriorityQueue:
      eng.run_priority_queue();
      break;
    case ToppleSchedule::Kind::FixedCycle:
      if (!schedule.cycle.empty())
        eng.run_cycle_explicit(schedule.cycle);
      else
        eng.run_cycle(schedule.descending);
      break;
  }
  return eng.extract(mass0.total_mass);
}

double abelian_check(const GraphFamily& g, const SandState& mass0,
                     const std::vector<ToppleSchedule>& schedules, double tol) {
  if (schedules.size() < 2)
    throw DomainError("abelian_check: needs at least two schedules");
  std::vector<SandState> runs;
  runs.reserve(schedules.size());
  for (const auto& s : schedules) runs.push_back(stabilize(g, mass0, s, tol));
  double worst = 0.0;
  for (size_t a = 0; a + 1 < runs.size(); ++a) {
    for (size_t b = a + 1; b < runs.size(); ++b) {
      for (const auto& [key, u] : runs[a].odometer) {
        auto it = runs[b].odometer.find(key);
        double v = it == runs[b].odometer.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(u - v));
      }
      for (const auto& [key, v] : runs[b].odometer)
        if (!runs[a].odometer.count(key)) worst = std::max(worst, v);
    }
  }
  return worst;
}

// ===== rotation =====

LatticePoint RotationMap::apply(const LatticePoint& p) const {
  int64_t side = int64_t(1) << k;
  if (p.a < 0 || p.b < 0 || p.a + p.b > side)
    throw DomainError("rotation: point outside the level-" + std::to_string(k) +
                      " triangle");
  return LatticePoint{side - p.a - p.b, p.a};
}

LatticePoint rotation_apply(const RotationMap& m, const LatticePoint& p) {
  return m.apply(p);
}

// ===== audits =====

OdometerBoundAudit odometer_lower_bound_audit(const GraphFamily& g, int n,
                                              const std::vector<int>& deltas,
                                              double tol) {
  if (n < 1) throw DomainError("odometer audit: n must be >= 1");
  for (int d : deltas)
    if (d < 1 || 2 * d > n)
      throw DomainError("odometer audit: deltas must satisfy 1 <= delta <= n/2");

  SandState st = stabilize(g, SandState::point_mass(double(ball_volume(g, n))),
                           ToppleSchedule::parallel_sweep(), tol);

  OriginTable table(g);
  table.ensure_radius(n);
  int64_t vol = table.volume(n);
  std::vector<double> u(static_cast<size_t>(vol));
  for (int64_t i = 0; i < vol; ++i)
    u[size_t(i)] = st.odometer_at(table.verts[size_t(i)]);

  OdometerBoundAudit out;
  out.n = n;
  for (int d : deltas) {
    OdometerBoundRow row;
    row.delta = d;
    row.delta_beta = std::pow(double(d), kExitExponent);
    int keep = n - 3 * d;
    if (keep < 0) {
      row.min_u = std::numeric_limits<double>::quiet_NaN();
    } else {
      double lo = std::numeric_limits<double>::infinity();
      for (int64_t i = 0; i < table.volume(keep); ++i)
        lo = std::min(lo, u[size_t(i)]);
      row.min_u = lo;
    }
    out.rows.push_back(row);
  }

  // layer monotonicity: compare each layer's max against the previous min
  std::vector<double> lmin(size_t(n) + 1,
                           std::numeric_limits<double>::infinity());
  std::vector<double> lmax(size_t(n) + 1,
                           -std::numeric_limits<double>::infinity());
  for (int64_t i = 0; i < vol; ++i) {
    size_t d = size_t(table.dist[size_t(i)]);
    lmin[d] = std::min(lmin[d], u[size_t(i)]);
    lmax[d] = std::max(lmax[d], u[size_t(i)]);
  }
  for (int d = 0; d < n; ++d) {
    double over = lmax[size_t(d) + 1] - lmin[size_t(d)];
    if (over > 10.0 * tol) {
      ++out.monotonicity_violations;
      out.worst_violation = std::max(out.worst_violation, over);
    }
  }
  return out;
}

ClosedFormAudit closed_form_audit(const GraphFamily& g, int k, double tol) {
  if (k < 0 || k > 6)
    throw DomainError("closed-form audit: k must be in 0..6");
  int n = 1 << k;
  double pile = std::pow(3.0, double(k + 1));
  SandState st = stabilize(g, SandState::point_mass(pile),
                           ToppleSchedule::parallel_sweep(), tol);

  auto dom = ball(g, origin(), n);
  ClosedFormAudit out;
  out.k = k;
  out.expected_origin = 2.0 * std::pow(5.0, double(k));
  out.origin_value = st.odometer_at(origin());
  out.origin_rel_dev =
      std::abs(out.origin_value - out.expected_origin) / out.expected_origin;

  // support must stay inside the ball: mass or emissions beyond it
  for (const auto& [key, v] : st.odometer)
    if (!dom->index.count(key))
      out.outside_dev = std::max(out.outside_dev, std::abs(v));
  for (const auto& [key, v] : st.mass)
    if (!dom->index.count(key))
      out.outside_dev = std::max(out.outside_dev, std::abs(v));

  // mirror symmetry and the pinned rows through each rotation power
  RotationMap rot{k};
  double dev_row[3] = {0.0, 0.0, 0.0}; // [power]: worst pinned-row deviation
  double zero_dev[3] = {0.0, 0.0, 0.0};
  double two_dev[3] = {0.0, 0.0, 0.0};
  for (const Vertex& v : dom->members) {
    if (v.side != Side::Right) continue;
    double uv = st.odometer_at(v);
    if (!(v.a == 0 && v.b == 0)) {
      double um = st.odometer_at(Vertex(Side::Left, v.a, v.b));
      out.mirror_dev = std::max(out.mirror_dev, std::abs(uv - um));
    }
    LatticePoint p{v.a, v.b};
    for (int power = 1; power <= 2; ++power) {
      p = rot.apply(p);
      double dev = -1.0;
      if (p.b == 0) {
        dev = std::abs(uv);
        zero_dev[power] = std::max(zero_dev[power], dev);
      } else if (p.b == 1) {
        dev = std::abs(uv - 2.0);
        two_dev[power] = std::max(two_dev[power], dev);
      }
      if (dev >= 0.0) dev_row[power] = std::max(dev_row[power], dev);
    }
  }
  out.selected_rotation = dev_row[2] < dev_row[1] ? 2 : 1;
  out.zero_row_dev = zero_dev[out.selected_rotation];
  out.two_row_dev = two_dev[out.selected_rotation];

  // conservation: the odometer's Laplacian must equal the mass transfer at
  // every vertex of the ball and its outer layer
  auto wider = ball(g, origin(), n + 1);
  std::array<Vertex, 6> nb;
  for (const Vertex& x : wider->members) {
    int deg = g.neighbors(x, nb);
    double avg = 0.0;
    for (int i = 0; i < deg; ++i) avg += st.odometer_at(nb[size_t(i)]);
    avg /= double(deg);
    double lap = avg - st.odometer_at(x);
    double transfer = st.mass_at(x) - (x == origin() ? pile : 0.0);
    out.conservation_dev =
        std::max(out.conservation_dev, std::abs(lap - transfer));
  }

  double slack = std::max(100.0 * tol, 1e-7);
  auto check = [&](bool ok, const char* name) {
    if (!ok) out.failures.push_back(name);
  };
  check(out.origin_rel_dev <= 1e-6, "origin value");
  check(out.selected_rotation == 2, "rotation selection");
  check(out.zero_row_dev <= slack, "zero row");
  check(out.two_row_dev <= slack, "two row");
  check(out.mirror_dev <= slack, "mirror symmetry");
  check(out.outside_dev <= slack, "support containment");
  check(out.conservation_dev <= slack, "conservation");
  out.pass = out.failures.empty();
  return out;
}

} // namespace sg
