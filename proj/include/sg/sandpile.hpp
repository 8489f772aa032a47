#pragma once
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sg/ball.hpp"

namespace sg {

// sparse sand configuration: mass and accumulated emissions keyed by vertex.
// total_mass is fixed at construction; every topple conserves it.
struct SandState {
  std::unordered_map<uint64_t, double, VertexHash> mass;
  std::unordered_map<uint64_t, double, VertexHash> odometer;
  double total_mass = 0.0;

  static SandState point_mass(double m, const Vertex& at = origin());
  double mass_at(const Vertex& v) const;
  double odometer_at(const Vertex& v) const;
  void add_mass(const Vertex& v, double m);
};

// one legal topple at x: the excess above 1 splits evenly over the neighbors;
// stable x is the identity
SandState topple(const GraphFamily& g, SandState state, const Vertex& x);

struct ToppleSchedule {
  enum class Kind { ParallelSweep, PriorityQueue, FixedCycle };
  Kind kind = Kind::ParallelSweep;
  bool descending = false;   // FixedCycle sweep direction over BFS order
  std::vector<Vertex> cycle; // optional explicit FixedCycle vertex list

  static ToppleSchedule parallel_sweep();
  static ToppleSchedule priority_queue();
  static ToppleSchedule fixed_cycle_ascending();
  static ToppleSchedule fixed_cycle_descending();
  static ToppleSchedule fixed_cycle(std::vector<Vertex> order);
  std::string name() const;
};

inline constexpr int64_t kDefaultToppleRoundCap = 100'000'000;

// Stabilizes mass0 until the largest excess falls below an internal cutoff
// tighter than tol: excess converts to odometer error roughly like the exit
// time of the active region (~ radius^beta), so the cutoff is tol scaled down
// by that factor. The returned state then has mass <= 1 + tol everywhere and
// an odometer within about tol of the schedule-independent limit.
SandState stabilize(const GraphFamily& g, const SandState& mass0,
                    const ToppleSchedule& schedule, double tol,
                    int64_t round_cap = kDefaultToppleRoundCap);

// max pairwise sup-norm distance between the odometers the schedules produce
double abelian_check(const GraphFamily& g, const SandState& mass0,
                     const std::vector<ToppleSchedule>& schedules, double tol);

// 120-degree rotation of the level-k triangle about its center hole; exact on
// lattice addresses: (a, b) -> (2^k - a - b, a)
struct RotationMap {
  int k = 0;
  LatticePoint apply(const LatticePoint& p) const;
};
LatticePoint rotation_apply(const RotationMap& m, const LatticePoint& p);

struct OdometerBoundRow {
  int delta = 0;
  double min_u = 0.0;     // min over B_origin(n - 3*delta); NaN if that is empty
  double delta_beta = 0.0;
};
struct OdometerBoundAudit {
  int n = 0;
  std::vector<OdometerBoundRow> rows;
  // layer monotonicity of the odometer (claimed, not proved): count of BFS
  // layers whose maximum exceeds the previous layer's minimum, with the
  // worst overshoot
  int64_t monotonicity_violations = 0;
  double worst_violation = 0.0;
};
OdometerBoundAudit odometer_lower_bound_audit(const GraphFamily& g, int n,
                                              const std::vector<int>& deltas,
                                              double tol);

// Checks the toppled odometer for mass 3^(k+1) at the origin against its
// closed form: origin value 2*5^k, mirror symmetry, support inside B(2^k),
// the mass-conservation identity, and the two pinned rows pulled back
// through the selected rotation power.
struct ClosedFormAudit {
  int k = 0;
  double origin_value = 0.0;
  double expected_origin = 0.0;
  int selected_rotation = 0; // rotation power whose pinned rows match
  double origin_rel_dev = 0.0;
  double zero_row_dev = 0.0; // max |u| where the pullback pins 0
  double two_row_dev = 0.0;  // max |u - 2| where the pullback pins 2
  double mirror_dev = 0.0;
  double outside_dev = 0.0;  // max odometer outside B(2^k)
  double conservation_dev = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
};
ClosedFormAudit closed_form_audit(const GraphFamily& g, int k, double tol);

} // namespace sg
