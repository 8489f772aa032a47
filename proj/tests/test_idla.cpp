#include <doctest.h>

#include <cmath>
#include <map>

#include "sg/ball.hpp"
#include "sg/error.hpp"
#include "sg/graph.hpp"
#include "sg/idla.hpp"
#include "sg/rng.hpp"
#include "sg/stats.hpp"

using namespace sg;

// ===== basic growth =====

TEST_CASE("the first walker settles at the origin") {
  GraphFamily g = GraphFamily::doubled();
  Cluster c = grow(g, 1, 424242);
  CHECK(c.particle_count == 1);
  CHECK(c.settle_order.size() == 1);
  CHECK(c.settle_order[0].is_origin());
  CHECK(c.contains(origin()));
}

TEST_CASE("growth is a deterministic function of the master seed") {
  GraphFamily g = GraphFamily::doubled();
  Cluster a = grow(g, 40, 777);
  Cluster b = grow(g, 40, 777);
  REQUIRE(a.settle_order.size() == b.settle_order.size());
  for (size_t i = 0; i < a.settle_order.size(); ++i)
    CHECK(a.settle_order[i] == b.settle_order[i]);
  Cluster c = grow(g, 40, 778);
  bool same = true;
  for (size_t i = 0; i < a.settle_order.size(); ++i)
    if (!(a.settle_order[i] == c.settle_order[i])) same = false;
  CHECK_FALSE(same);
}

TEST_CASE("clusters are connected and counted correctly") {
  GraphFamily g = GraphFamily::doubled();
  Cluster c = grow(g, 83, 31);
  CHECK(c.particle_count == 83);
  CHECK(c.occupied.size() == 83);
  CHECK(c.settle_order.size() == 83);
  // every settled vertex after the first touches an earlier one
  std::unordered_set<uint64_t, VertexHash> seen;
  seen.insert(c.settle_order[0].key());
  for (size_t i = 1; i < c.settle_order.size(); ++i) {
    bool touches = false;
    for (const Vertex& w : g.neighbor_list(c.settle_order[i]))
      if (seen.count(w.key())) touches = true;
    CHECK(touches);
    seen.insert(c.settle_order[i].key());
  }
}

// ===== pinned exact-ball probability =====

TEST_CASE("five walkers form the unit ball with the pinned probability") {
  GraphFamily g = GraphFamily::doubled();
  const double exact = 0.2355212355212355;
  const int64_t trials = 30000;
  int64_t hits = 0;
  for (int64_t t = 0; t < trials; ++t) {
    Cluster c = grow(g, 5, RngStream::derive_seed(606, uint64_t(t)));
    if (radii(c).exact) ++hits;
  }
  double p = double(hits) / double(trials);
  double se = std::sqrt(exact * (1.0 - exact) / double(trials));
  CHECK(std::abs(p - exact) < 3.0 * se);
}

// ===== radius statistics =====

TEST_CASE("radius statistics on hand-built aggregates") {
  GraphFamily g = GraphFamily::doubled();
  auto b2 = ball(g, origin(), 2);

  Cluster exact_ball;
  exact_ball.family = g;
  for (const Vertex& v : b2->members) {
    exact_ball.occupied.insert(v.key());
    exact_ball.settle_order.push_back(v);
  }
  exact_ball.particle_count = int64_t(b2->members.size());
  RadiusStats rs = radii(exact_ball);
  CHECK(rs.nominal == 2);
  CHECK(rs.r_in == 2);
  CHECK(rs.r_out == 2);
  CHECK(rs.inner_defect == 0);
  CHECK(rs.outer_excess == 0);
  CHECK(rs.exact);

  // add a tendril out to distance 5
  Cluster tendril = exact_ball;
  for (const Vertex& v : {Vertex(Side::Right, 3, 0), Vertex(Side::Right, 4, 0),
                          Vertex(Side::Right, 5, 0)}) {
    tendril.occupied.insert(v.key());
    tendril.settle_order.push_back(v);
    ++tendril.particle_count;
  }
  RadiusStats ts = radii(tendril);
  CHECK(ts.nominal == 2);  // 14 walkers still short of |B(3)| = 17
  CHECK(ts.r_in == 2);
  CHECK(ts.r_out == 5);
  CHECK(ts.inner_defect == 0);
  CHECK(ts.outer_excess == 3);
  CHECK_FALSE(ts.exact);

  // drill a hole at distance 1
  Cluster holed = exact_ball;
  holed.occupied.erase(Vertex(Side::Left, 1, 0).key());
  --holed.particle_count;
  holed.settle_order.pop_back();  // count only needs to stay consistent
  RadiusStats hs = radii(holed);
  CHECK(hs.r_in == 0);
  CHECK(hs.r_out == 2);

  Cluster empty;
  empty.family = g;
  CHECK_THROWS_AS(radii(empty), DomainError);
}

TEST_CASE("grown defects are never negative") {
  GraphFamily g = GraphFamily::doubled();
  for (int t = 0; t < 20; ++t) {
    Cluster c = grow(g, ball_volume(g, 8), RngStream::derive_seed(17, uint64_t(t)));
    RadiusStats rs = radii(c);
    CHECK(rs.nominal == 8);
    CHECK(rs.inner_defect >= 0);
    CHECK(rs.outer_excess >= 0);
    CHECK(rs.r_in <= rs.r_out);
  }
}

// ===== stopped growth =====

TEST_CASE("stopped growth pauses exactly outside the absorb ball") {
  GraphFamily g = GraphFamily::doubled();
  const int absorb = 3;
  StoppedState st = grow_stopped(g, 60, absorb, 2718);
  CHECK(st.launched == 60);
  CHECK(st.absorb_radius == absorb);
  CHECK(st.cluster.particle_count + int64_t(st.paused.size()) == 60);
  for (const PausedParticle& p : st.paused)
    CHECK(distance(g, origin(), p.pos) == absorb + 1);
  for (const auto& key : st.cluster.occupied)
    CHECK(distance(g, origin(), Vertex::from_key(key)) <= absorb);
}

TEST_CASE("resume settles every paused walker when unrestricted") {
  GraphFamily g = GraphFamily::doubled();
  StoppedState st = grow_stopped(g, 60, 3, 2718);
  size_t was_paused = st.paused.size();
  CHECK(was_paused > 0);
  resume(st, -1);
  CHECK(st.paused.empty());
  CHECK(st.absorb_radius == -1);
  CHECK(st.cluster.particle_count == 60);
  CHECK(st.cluster.occupied.size() == 60);
  CHECK_THROWS_AS(resume(st, -2), DomainError);
}

TEST_CASE("widening in stages only shrinks the paused set") {
  GraphFamily g = GraphFamily::doubled();
  StoppedState st = grow_stopped(g, 150, 4, 99);
  size_t prev = st.paused.size();
  for (int r : {5, 7, 10}) {
    resume(st, r);
    CHECK(st.paused.size() <= prev);
    prev = st.paused.size();
    for (const PausedParticle& p : st.paused)
      CHECK(distance(g, origin(), p.pos) == r + 1);
  }
  resume(st, -1);
  CHECK(st.cluster.particle_count == 150);
}

TEST_CASE("stopped and free growth agree in distribution") {
  GraphFamily g = GraphFamily::doubled();
  const int n = 2;
  const int64_t runs = 4000;
  std::map<std::pair<int64_t, int64_t>, int64_t> armA, armB;
  for (int64_t r = 0; r < runs; ++r) {
    Cluster a = grow(g, ball_volume(g, n), RngStream::derive_seed(1001, 2 * uint64_t(r)));
    RadiusStats ra = radii(a);
    ++armA[{ra.inner_defect, ra.outer_excess}];
    StoppedState st = grow_stopped(g, ball_volume(g, n), n,
                                   RngStream::derive_seed(1001, 2 * uint64_t(r) + 1));
    resume(st, -1);
    RadiusStats rb = radii(st.cluster);
    ++armB[{rb.inner_defect, rb.outer_excess}];
  }
  Chi2Result c2 = chi2_two_sample(armA, armB);
  CHECK(c2.pvalue > 1e-3);
}

TEST_CASE("the staged pipeline drains its paused walkers") {
  GraphFamily g = GraphFamily::doubled();
  std::vector<int64_t> trace = stopped_pipeline_trace(g, 8, 1234);
  REQUIRE(!trace.empty());
  for (size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace[i] >= 0);
    if (i > 0) CHECK(trace[i] <= trace[i - 1]);  // only resumed walkers repause
  }
}

TEST_CASE("growth onto a full ball settles everyone outside it") {
  GraphFamily g = GraphFamily::doubled();
  const int n = 8;
  StoppedState st = grow_stopped_onto_ball(g, n, 40, n + 3, 55);
  CHECK(st.launched == 40);
  CHECK(st.cluster.particle_count + int64_t(st.paused.size()) == 40);
  for (const Vertex& v : st.cluster.settle_order) {
    int64_t d = distance(g, origin(), v);
    CHECK(d > n);
    CHECK(d <= n + 3);
  }
  CHECK_THROWS_AS(grow_stopped_onto_ball(g, 8, 5, 4, 1), DomainError);
}

// ===== hit counters =====

TEST_CASE("hit counters respect their defining order constraints") {
  GraphFamily g = GraphFamily::doubled();
  Vertex z(Side::Right, 2, 1);
  for (int t = 0; t < 200; ++t) {
    MlCounters mc = ml_counters(g, 4, z, RngStream::derive_seed(808, uint64_t(t)));
    CHECK(mc.m >= mc.l);
    CHECK(mc.m <= ball_volume(g, 4));
    if (!mc.z_in_cluster) CHECK(mc.m == mc.l);
  }
}

TEST_CASE("mean hit counts match the pinned green ratios") {
  GraphFamily g = GraphFamily::doubled();
  const Vertex z(Side::Right, 3, 0);
  const int n = 8;
  const double exact_m = 43.0938079110486;     // |B(8)| g(o,z)/g(z,z)
  const double exact_lt = 24.370566809380794;  // E_z tau(8) / g(z,z)
  const int64_t trials = 12000;

  std::vector<double> ms(static_cast<size_t>(trials)), lts(static_cast<size_t>(trials));
  for (int64_t t = 0; t < trials; ++t) {
    uint64_t s = RngStream::derive_seed(90210, uint64_t(t));
    ms[size_t(t)] = double(ml_counters(g, n, z, s).m);
    lts[size_t(t)] = double(ltilde_run(g, n, z, RngStream::derive_seed(31415, uint64_t(t))));
  }
  MeanStderr mm = mean_stderr(ms);
  MeanStderr ml = mean_stderr(lts);
  CHECK(std::abs(mm.mean - exact_m) < 3.0 * mm.se);
  CHECK(std::abs(ml.mean - exact_lt) < 3.0 * ml.se);
}

TEST_CASE("walk counters reject bad arguments") {
  GraphFamily g = GraphFamily::doubled();
  CHECK_THROWS_AS(ml_counters(g, 4, Vertex(Side::Right, 3, 3), 1), DomainError);
  CHECK_THROWS_AS(grow(g, -1, 0), DomainError);
  CHECK_THROWS_AS(grow_stopped(g, 5, -1, 0), DomainError);
}
