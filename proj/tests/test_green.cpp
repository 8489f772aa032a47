#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sg/ball.hpp"
#include "sg/error.hpp"
#include "sg/graph.hpp"
#include "sg/green.hpp"
#include "sg/rng.hpp"
#include "sg/walk.hpp"

using namespace sg;

namespace {
const Vertex kZ(Side::Right, 3, 0);
}

// ===== pinned values =====

TEST_CASE("green at the smallest ball is exactly one") {
  GraphFamily g = GraphFamily::doubled();
  GreenTable t = green(g, 1, origin());
  CHECK(t.at(origin()) == doctest::Approx(1.0).epsilon(1e-12));
  // off the ball the table reads zero
  CHECK(t.at(Vertex(Side::Right, 5, 5)) == 0.0);
}

TEST_CASE("green values on the radius-8 ball match pinned solves") {
  GraphFamily g = GraphFamily::doubled();
  GreenTable t = green(g, 8, kZ);
  CHECK(std::abs(t.at(origin()) - 2.4074074074074) < 1e-9);
  CHECK(std::abs(t.at(kZ) - 4.636740740740739) < 1e-9);
}

TEST_CASE("exit times hit the dyadic closed form exactly") {
  GraphFamily g = GraphFamily::doubled();
  for (int k : {1, 2, 3, 4}) {
    DirichletSolution s = expected_exit_time_exact(g, 1 << k);
    CHECK(std::abs(s.at(origin()) - std::pow(5.0, k)) < 1e-8);
    CHECK(s.residual < kDirichletResidualTol);
  }
  // pinned off-center value: E_z tau(8) for z three steps out
  DirichletSolution s8 = expected_exit_time_exact(g, 8);
  CHECK(std::abs(s8.at(kZ) - 113.0) < 1e-8);
}

// ===== structural identities =====

TEST_CASE("green is symmetric on the 4-regular doubled gasket") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 8);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  std::vector<Vertex> probes = {origin(), kZ, Vertex(Side::Left, 2, 1),
                                Vertex(Side::Right, 1, 4),
                                Vertex(Side::Right, 2, 2)};
  for (const Vertex& x : probes) {
    std::vector<double> gx = sys.green_column(x);
    for (const Vertex& y : probes) {
      std::vector<double> gy = sys.green_column(y);
      double a = gx[size_t(sys.index_of(y))];
      double c = gy[size_t(sys.index_of(x))];
      CHECK(std::abs(a - c) < 1e-9);
    }
  }
}

TEST_CASE("row sums of green equal expected exit times") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 8);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  std::vector<double> tau = sys.exit_times();

  // sum_z g(x,z) accumulated column by column
  std::vector<double> acc(size_t(sys.size()), 0.0);
  for (const Vertex& z : sys.verts()) {
    if (!sys.is_interior(z)) continue;
    std::vector<double> col = sys.green_column(z);
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += col[i];
  }
  for (size_t i = 0; i < acc.size(); ++i)
    CHECK(std::abs(acc[i] - tau[i]) < 1e-8);
}

TEST_CASE("green diagonal dominates and is at least one inside") {
  GraphFamily g = GraphFamily::doubled();
  auto rows = diagonal_green_bound_check(g, 8);
  bool any_interior = false;
  for (const auto& r : rows) {
    if (r.dist_boundary == 0) {
      CHECK(r.g_zz == 0.0);
      continue;
    }
    any_interior = true;
    CHECK(r.g_zz >= 1.0); // counts the visit at time zero
  }
  CHECK(any_interior);
}

TEST_CASE("harmonic solutions obey the maximum principle") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 6);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  RngStream rng = RngStream::from(404, 0);
  std::vector<double> rhs(size_t(sys.size()), 0.0);
  std::vector<double> bnd(size_t(sys.size()), 0.0);
  double lo = 1e300, hi = -1e300;
  for (size_t i = 0; i < size_t(sys.size()); ++i)
    if (!sys.is_interior(sys.verts()[i])) {
      bnd[i] = rng.uniform01();
      lo = std::min(lo, bnd[i]);
      hi = std::max(hi, bnd[i]);
    }
  DirichletSolution h = sys.solve(rhs, bnd);
  for (size_t i = 0; i < h.values.size(); ++i) {
    CHECK(h.values[i] >= lo - 1e-12);
    CHECK(h.values[i] <= hi + 1e-12);
  }
  CHECK(h.residual < kDirichletResidualTol);
}

TEST_CASE("exit distribution is a probability supported on the boundary") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 4);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  std::vector<double> p = sys.exit_distribution(origin());
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (sys.is_interior(sys.verts()[i])) CHECK(p[i] == 0.0);
    CHECK(p[i] >= -1e-14);
    total += p[i];
  }
  CHECK(std::abs(total - 1.0) < 1e-10);

  // monte carlo agreement at the most likely exit
  const int64_t trials = 100000;
  std::unordered_map<uint64_t, int64_t, VertexHash> hits;
  for (int64_t t = 0; t < trials; ++t) {
    RngStream r = RngStream::from(31337, uint64_t(t));
    WalkResult w = run_until(g, origin(), StopRule::hit_boundary(b), r);
    ++hits[w.stop.key()];
  }
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.01) continue;
    double freq = double(hits[sys.verts()[i].key()]) / double(trials);
    double se = std::sqrt(p[i] * (1 - p[i]) / double(trials));
    CHECK(std::abs(freq - p[i]) < 4.0 * se);
  }
}

TEST_CASE("full-ball systems absorb on the layer outside") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 4);
  DirichletSystem sys = DirichletSystem::full_ball(b);
  // every ball member is interior; the extra universe rows are absorbing
  for (const Vertex& v : b->members) CHECK(sys.is_interior(v));
  CHECK(sys.size() > int64_t(b->members.size()));
  std::vector<double> tau = sys.exit_times();
  // exiting the closed ball takes at least one extra step from the rim
  DirichletSystem stopped = DirichletSystem::stopped_ball(b);
  std::vector<double> tau_in = stopped.exit_times();
  CHECK(tau[size_t(sys.index_of(origin()))] >
        tau_in[size_t(stopped.index_of(origin()))]);
}

// ===== harnack =====

TEST_CASE("harnack ratio is one for constant data and scale invariant") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 8);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  std::vector<double> rhs(size_t(sys.size()), 0.0);
  std::vector<double> bnd(size_t(sys.size()), 7.5);
  DirichletSolution h = sys.solve(rhs, bnd);
  double lo = 1e300, hi = -1e300;
  for (double v : h.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo == doctest::Approx(1.0).epsilon(1e-10));

  HarnackResult hr1 = harnack_ratio(g, origin(), 4, 20, 99);
  CHECK(hr1.max_ratio >= 1.0);
  CHECK(hr1.max_ratio < 1e6);
  CHECK(hr1.samples_used > 0);
}

// ===== error paths =====

TEST_CASE("green rejects out-of-domain queries") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 2);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  CHECK_THROWS_AS(sys.green_column(Vertex(Side::Right, 64, 0)), DomainError);
  CHECK_THROWS_AS(green(g, 2, Vertex(Side::Right, 64, 0)), DomainError);
  DirichletSolution s = expected_exit_time_exact(g, 2);
  CHECK_THROWS_AS(s.at(Vertex(Side::Right, 64, 0)), DomainError);
  CHECK(s.at_or(Vertex(Side::Right, 64, 0), -5.0) == -5.0);
}

TEST_CASE("direct and iterative backends agree") {
  GraphFamily g = GraphFamily::doubled();
  auto b = ball(g, origin(), 8);
  DirichletSystem d = DirichletSystem::stopped_ball(b, DirichletSystem::Backend::Direct);
  DirichletSystem it = DirichletSystem::stopped_ball(b, DirichletSystem::Backend::Iterative);
  std::vector<double> gd = d.green_column(kZ);
  std::vector<double> gi = it.green_column(kZ);
  REQUIRE(gd.size() == gi.size());
  for (size_t i = 0; i < gd.size(); ++i) CHECK(std::abs(gd[i] - gi[i]) < 1e-8);
}
