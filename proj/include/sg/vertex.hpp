#pragma once
#include <cstdint>
#include <string>
#include <utility>

#include "sg/error.hpp"

namespace sg {

// Lattice basis for one gasket copy: e1 = (1,0), e2 = (1/2, sqrt3/2).
// The point (a,b) sits at (a + b/2, b*sqrt3/2); b is the row, a the offset.
struct LatticePoint {
  int64_t a = 0;
  int64_t b = 0;
  bool operator==(const LatticePoint&) const = default;
};

enum class Side : uint8_t { Right = 0, Left = 1 };

// Vertex of the doubled gasket: a nonnegative lattice point plus the copy tag.
// The two copies are glued at the origin; (0,0) canonicalizes to Side::Right,
// so equality and hashing can stay plain field comparisons.
struct Vertex {
  Side side = Side::Right;
  int32_t a = 0;
  int32_t b = 0;

  Vertex() = default;
  Vertex(Side s, int32_t a_, int32_t b_) : side(s), a(a_), b(b_) {
    if (a == 0 && b == 0) side = Side::Right;
  }

  bool operator==(const Vertex&) const = default;
  bool is_origin() const { return a == 0 && b == 0; }

  // packed key, valid for a,b in [0, 2^31); side in the top bits
  uint64_t key() const {
    return (uint64_t(side) << 62) | (uint64_t(uint32_t(a)) << 31) |
           uint64_t(uint32_t(b));
  }

  // mirrored Euclidean embedding: Left copies reflect across the y axis
  std::pair<double, double> euclid() const {
    double x = double(a) + 0.5 * double(b);
    double y = 0.8660254037844386 * double(b); // sqrt(3)/2
    return {side == Side::Left ? -x : x, y};
  }

  static Vertex from_key(uint64_t k) {
    return Vertex(Side((k >> 62) & 1), int32_t((k >> 31) & 0x7FFFFFFF),
                  int32_t(k & 0x7FFFFFFF));
  }
};

inline Vertex origin() { return Vertex(Side::Right, 0, 0); }

inline bool vertex_less(const Vertex& u, const Vertex& v) {
  if (u.side != v.side) return u.side < v.side;
  if (u.a != v.a) return u.a < v.a;
  return u.b < v.b;
}

// 64-bit finalizer (splitmix64 tail); used for hashing packed keys
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct VertexHash {
  size_t operator()(uint64_t key) const { return size_t(mix64(key)); }
};

// address text form "R:a:b" / "L:a:b"; ',' accepted as separator too
inline std::string format_vertex(const Vertex& v) {
  return std::string(v.side == Side::Left ? "L" : "R") + ":" +
         std::to_string(v.a) + ":" + std::to_string(v.b);
}

inline Vertex parse_vertex(const std::string& text) {
  std::string t = text;
  for (auto& c : t)
    if (c == ',') c = ':';
  if (t.size() < 5 || t[1] != ':')
    throw DomainError("bad vertex address '" + text + "', want SIDE:a:b");
  Side s;
  if (t[0] == 'R' || t[0] == 'r')
    s = Side::Right;
  else if (t[0] == 'L' || t[0] == 'l')
    s = Side::Left;
  else
    throw DomainError("bad side in vertex address '" + text + "'");
  size_t colon = t.find(':', 2);
  if (colon == std::string::npos)
    throw DomainError("bad vertex address '" + text + "', want SIDE:a:b");
  long long a = 0, b = 0;
  try {
    std::string sa = t.substr(2, colon - 2), sb = t.substr(colon + 1);
    size_t pa = 0, pb = 0;
    a = std::stoll(sa, &pa);
    b = std::stoll(sb, &pb);
    if (pa != sa.size() || pb != sb.size())
      throw DomainError("bad coordinates in vertex address '" + text + "'");
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("bad coordinates in vertex address '" + text + "'");
  }
  if (a < 0 || b < 0 || a > INT32_MAX || b > INT32_MAX)
    throw DomainError("vertex coordinates out of range in '" + text + "'");
  return Vertex(s, int32_t(a), int32_t(b));
}

} // namespace sg
