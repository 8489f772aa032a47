#pragma once
#include <memory>
#include <unordered_set>
#include <vector>

#include "sg/ball.hpp"
#include "sg/rng.hpp"
#include "sg/stats.hpp"

namespace sg {

// one step of the simple random walk: uniform over the neighbor list
Vertex step(const GraphFamily& g, const Vertex& v, RngStream& rng);

// Stopping rules are evaluated at the current position before each step, so
// time 0 counts. FirstOf resolves ties toward the earliest listed sub-rule.
struct StopRule {
  enum class Kind { HitBoundary, HitVertex, ExitSet, FirstOf };
  Kind kind = Kind::HitVertex;
  std::shared_ptr<const Ball> domain;  // HitBoundary
  Vertex target;                       // HitVertex
  std::shared_ptr<const std::unordered_set<uint64_t, VertexHash>> keep; // ExitSet
  std::vector<StopRule> children;      // FirstOf

  static StopRule hit_boundary(std::shared_ptr<const Ball> b);
  static StopRule hit_vertex(const Vertex& v);
  static StopRule exit_set(
      std::shared_ptr<const std::unordered_set<uint64_t, VertexHash>> s);
  static StopRule first_of(std::vector<StopRule> rules);

  // -1 when not fired; otherwise the index of the fired sub-rule
  // (always 0 for the scalar kinds)
  int fires(const Vertex& v) const;
};

inline constexpr int64_t kDefaultStepCap = 1'000'000'000;

struct WalkResult {
  Vertex stop;
  int64_t steps = 0;
  int fired = -1;
};

WalkResult run_until(const GraphFamily& g, const Vertex& start,
                     const StopRule& rule, RngStream& rng,
                     int64_t step_cap = kDefaultStepCap);

// true iff the walk reaches z strictly before tau = first hit of the inner
// boundary of `domain` (z on the boundary therefore never wins)
bool hit_before_boundary(const GraphFamily& g, const Vertex& start,
                         const Vertex& z, std::shared_ptr<const Ball> domain,
                         RngStream& rng, int64_t step_cap = kDefaultStepCap);

// Monte Carlo mean of the exit time of B_center(n) for walks started at x;
// the two-argument form centers the ball at x itself (tau_x(n)). One stream
// per trial; results do not depend on the thread count.
MeanStderr estimate_exit_time(const GraphFamily& g, const Vertex& x,
                              const Vertex& center, int n, int64_t trials,
                              uint64_t master_seed, int threads = 1);
MeanStderr estimate_exit_time(const GraphFamily& g, const Vertex& x, int n,
                              int64_t trials, uint64_t master_seed,
                              int threads = 1);

} // namespace sg
