#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "sg/vertex.hpp"

namespace sg {

// ===== graph families =====
//
// DoubledSG    two mirror copies of the one-sided gasket glued at the origin;
//              4-regular.
// OneSidedSG   the Side::Right copy alone; origin has degree 2.
// ModifiedNineCopy
//              same corner recursion at scale `subdivision` (default 3) with a
//              configurable list of upward block shifts (default the six
//              upward positions of a side-3 subdivision); one-sided.
//
// Adjacency rests on one fact: a unit upward cell with lower corner (a,b) is
// retained iff every base-m digit pair of (a,b) is a configured block
// position (for m = 2 this is the bitwise test (a & b) == 0), and each lattice
// edge lies in exactly one upward cell. validated against the literal corner
// recursion by recursive_construct tests before anything else uses it.

enum class FamilyKind : uint8_t { DoubledSG = 0, OneSidedSG = 1, ModifiedNineCopy = 2 };

struct GraphFamily {
  FamilyKind kind = FamilyKind::DoubledSG;
  int subdivision = 2;                          // scale factor m per level
  std::vector<LatticePoint> block_shifts;       // kept block positions, level recursion

  static GraphFamily doubled();
  static GraphFamily one_sided();
  static GraphFamily nine_copy();               // m=3, six upward blocks
  static GraphFamily custom_copy(int m, std::vector<LatticePoint> shifts);

  bool doubled_sides() const { return kind == FamilyKind::DoubledSG; }
  const char* name() const;
  uint64_t cache_key() const;                   // stable id for memo tables

  // retained-cell test for the infinite one-sided pattern
  bool cell_kept(int64_t a, int64_t b) const;

  bool is_vertex(const Vertex& v) const;

  // deterministic neighbor order; returns count, writes into out.
  // max degree is 6 (non-doubled interior sites of copy families).
  int neighbors(const Vertex& v, std::array<Vertex, 6>& out) const;
  std::vector<Vertex> neighbor_list(const Vertex& v) const;
  int degree(const Vertex& v) const;

};

bool edge_exists(const GraphFamily& g, const Vertex& u, const Vertex& v);

// literal level recursion: V0 is one upward cell, each level unions
// shifted copies at scale m^level. Ground truth for the cell test.
struct LevelGraph {
  std::vector<LatticePoint> vertices;                          // sorted (a,b)
  std::vector<std::pair<LatticePoint, LatticePoint>> edges;    // canonical, sorted
};

LevelGraph recursive_construct(const GraphFamily& g, int level);

// compares recursion adjacency against the O(1) neighbor rule restricted to
// the level triangle; returns number of mismatching vertices (0 expected)
int64_t oracle_mismatch_count(const GraphFamily& g, int level);

} // namespace sg
