#pragma once
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "sg/ball.hpp"
#include "sg/rng.hpp"

namespace sg {

// internal aggregate grown by one walker at a time from the origin
struct Cluster {
  GraphFamily family;
  std::unordered_set<uint64_t, VertexHash> occupied;
  std::vector<Vertex> settle_order; // chronological
  int64_t particle_count = 0;       // settled walkers == settle_order.size()

  bool contains(const Vertex& v) const { return occupied.count(v.key()) > 0; }
};

// walker i uses stream (master_seed, i); the aggregate is a deterministic
// function of (family, particles, master_seed)
Cluster grow(const GraphFamily& g, int64_t particles, uint64_t master_seed);

// walker frozen at its first vertex outside the absorb ball, carrying its
// stream state so a later resume continues the identical trajectory
struct PausedParticle {
  Vertex pos;
  uint64_t rng_key = 0;
  uint64_t rng_counter = 0;
};

struct StoppedState {
  Cluster cluster;
  std::vector<PausedParticle> paused; // pause order
  int absorb_radius = 0;              // -1 once removed
  int64_t launched = 0;
};

// each walker pauses at its first vertex strictly outside B_origin(absorb_radius),
// checked before the settle test at every step including the start
StoppedState grow_stopped(const GraphFamily& g, int64_t particles,
                          int absorb_radius, uint64_t master_seed);

// continue the paused walkers in pause order under the new absorb radius
// (-1 removes it, so every walker settles); repausing is allowed
void resume(StoppedState& state, int new_radius);

// stopped growth onto a pre-occupied B_origin(n): every walker must either
// squeeze past the full ball or pause outside the absorb radius
StoppedState grow_stopped_onto_ball(const GraphFamily& g, int n,
                                    int64_t particles, int absorb_radius,
                                    uint64_t master_seed);

// one aggregate of |B(n)| walkers; each walk is followed until it has both
// settled and left B(n). m counts walkers that visit z strictly before
// leaving, l those whose first visit to z falls strictly after settling.
struct MlCounters {
  int64_t m = 0;
  int64_t l = 0;
  bool z_in_cluster = false;
};
MlCounters ml_counters(const GraphFamily& g, int n, const Vertex& z,
                       uint64_t master_seed);

// one independent walk from every vertex of B(n): how many visit z strictly
// before leaving the ball
int64_t ltilde_run(const GraphFamily& g, int n, const Vertex& z,
                   uint64_t master_seed);

struct RadiusStats {
  int64_t r_in = 0;        // largest r with B(r) fully occupied
  int64_t r_out = 0;       // largest occupied distance
  int nominal = 0;         // largest n with |B(n)| <= particle count
  int64_t inner_defect = 0; // nominal - r_in, >= 0
  int64_t outer_excess = 0; // r_out - nominal, >= 0
  bool exact = false;       // aggregate == B(nominal)
};
RadiusStats radii(const Cluster& c);

// staged growth of |B(n)| walkers: start the absorb radius at n, and while
// the paused count k exceeds the cutoff radius^(1/(alpha+1)), push the radius
// out by ceil(k^(1/alpha)) and resume; a final unrestricted resume settles
// the rest. returns the paused counts per stage.
std::vector<int64_t> stopped_pipeline_trace(const GraphFamily& g, int n,
                                            uint64_t master_seed);

} // namespace sg
