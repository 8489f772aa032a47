#include "sg/walk.hpp"

#include "sg/error.hpp"
#include "sg/parallel.hpp"

namespace sg {

Vertex step(const GraphFamily& g, const Vertex& v, RngStream& rng) {
  std::array<Vertex, 6> nb;
  int cnt = g.neighbors(v, nb);
  return nb[rng.uniform_below(uint32_t(cnt))];
}

StopRule StopRule::hit_boundary(std::shared_ptr<const Ball> b) {
  StopRule r;
  r.kind = Kind::HitBoundary;
  r.domain = std::move(b);
  return r;
}

StopRule StopRule::hit_vertex(const Vertex& v) {
  StopRule r;
  r.kind = Kind::HitVertex;
  r.target = v;
  return r;
}

StopRule StopRule::exit_set(
    std::shared_ptr<const std::unordered_set<uint64_t, VertexHash>> s) {
  StopRule r;
  r.kind = Kind::ExitSet;
  r.keep = std::move(s);
  return r;
}

StopRule StopRule::first_of(std::vector<StopRule> rules) {
  if (rules.empty()) throw DomainError("FirstOf needs at least one sub-rule");
  StopRule r;
  r.kind = Kind::FirstOf;
  r.children = std::move(rules);
  return r;
}

int StopRule::fires(const Vertex& v) const {
  switch (kind) {
    case Kind::HitBoundary:
      // tau-style rule: inner boundary or the complement of the ball
      if (!domain->contains(v) || domain->is_inner_boundary(v)) return 0;
      return -1;
    case Kind::HitVertex:
      return v == target ? 0 : -1;
    case Kind::ExitSet:
      return keep->count(v.key()) ? -1 : 0;
    case Kind::FirstOf:
      for (size_t i = 0; i < children.size(); ++i)
        if (children[i].fires(v) >= 0) return int(i);
      return -1;
  }
  return -1;
}

WalkResult run_until(const GraphFamily& g, const Vertex& start,
                     const StopRule& rule, RngStream& rng, int64_t step_cap) {
  WalkResult res;
  Vertex pos = start;
  int64_t steps = 0;
  for (;;) {
    int hit = rule.fires(pos);
    if (hit >= 0) {
      res.stop = pos;
      res.steps = steps;
      res.fired = hit;
      return res;
    }
    if (steps >= step_cap)
      throw NumericError("walk exceeded the step cap of " +
                         std::to_string(step_cap));
    pos = step(g, pos, rng);
    ++steps;
  }
}

bool hit_before_boundary(const GraphFamily& g, const Vertex& start,
                         const Vertex& z, std::shared_ptr<const Ball> domain,
                         RngStream& rng, int64_t step_cap) {
  StopRule rule = StopRule::first_of(
      {StopRule::hit_vertex(z), StopRule::hit_boundary(std::move(domain))});
  return run_until(g, start, rule, rng, step_cap).fired == 0;
}

MeanStderr estimate_exit_time(const GraphFamily& g, const Vertex& x,
                              const Vertex& center, int n, int64_t trials,
                              uint64_t master_seed, int threads) {
  if (trials <= 0) throw DomainError("estimate_exit_time: trials must be > 0");
  if (n < 0) throw DomainError("estimate_exit_time: n must be >= 0");

  std::vector<double> samples(size_t(trials), 0.0);

  if (center == origin()) {
    // index-space fast path: tau(n) keeps the walk inside B_origin(n)
    OriginTable table(g);
    table.ensure_adjacency(n);
    std::vector<uint8_t> bmask = table.boundary_mask(n);
    int32_t start_idx = table.index_of(x);
    bool outside = start_idx < 0 || table.dist[size_t(start_idx)] > n;
    const int32_t* adj = table.adj.data();
    const uint32_t* off = table.adj_off.data();

    parallel_for(trials, threads, [&](int64_t t) {
      if (outside) {
        samples[size_t(t)] = 0.0; // already stopped at time 0
        return;
      }
      RngStream rng = RngStream::from(master_seed, uint64_t(t));
      int32_t pos = start_idx;
      int64_t steps = 0;
      while (!bmask[size_t(pos)]) {
        if (steps >= kDefaultStepCap)
          throw NumericError("exit-time walk exceeded the step cap");
        uint32_t o = off[pos];
        uint32_t deg = off[pos + 1] - o;
        pos = adj[o + rng.uniform_below(deg)];
        ++steps;
      }
      samples[size_t(t)] = double(steps);
    });
    return mean_stderr(samples);
  }

  std::shared_ptr<const Ball> b = ball(g, center, n);
  StopRule rule = StopRule::hit_boundary(b);
  parallel_for(trials, threads, [&](int64_t t) {
    RngStream rng = RngStream::from(master_seed, uint64_t(t));
    samples[size_t(t)] = double(run_until(g, x, rule, rng).steps);
  });
  return mean_stderr(samples);
}

MeanStderr estimate_exit_time(const GraphFamily& g, const Vertex& x, int n,
                              int64_t trials, uint64_t master_seed,
                              int threads) {
  return estimate_exit_time(g, x, x, n, trials, master_seed, threads);
}

} // namespace sg
