#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "sg/error.hpp"
#include "sg/idla.hpp"
#include "sg/io.hpp"
#include "sg/sandpile.hpp"

using namespace sg;

// ===== format_double =====

TEST_CASE("format_double emits the shortest round-tripping decimal") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.0) == "0");
  // shortest form must still parse back to the identical bits
  for (double v : {1.0 / 3.0, 2.4074074074074, 4.636740740740739,
                   43.0938079110486, 1.7976931348623157e308}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

// ===== CSV emitters =====

TEST_CASE("ball CSV carries the pinned header and one row per member") {
  auto g = GraphFamily::doubled();
  auto b = ball(g, origin(), 2);
  std::string csv = csv_ball(*b);
  CsvTable t = parse_csv(csv);
  REQUIRE(t.header.size() == 5);
  CHECK(t.header[0] == "side");
  CHECK(t.header[1] == "a");
  CHECK(t.header[2] == "b");
  CHECK(t.header[3] == "dist_to_center");
  CHECK(t.header[4] == "is_inner_boundary");
  CHECK(t.rows.size() == b->members.size());
  // rows follow BFS order: first row is the center at distance 0
  CHECK(t.rows[0][0] == "R");
  CHECK(t.rows[0][1] == "0");
  CHECK(t.rows[0][2] == "0");
  CHECK(t.rows[0][3] == "0");
  CHECK(t.rows[0][4] == "0");
  // boundary flags in the CSV match the ball
  int flagged = 0;
  for (const auto& row : t.rows) flagged += row[4] == "1";
  CHECK(flagged == int(b->boundary_list().size()));
}

TEST_CASE("value and green CSVs agree and use shortest doubles") {
  auto g = GraphFamily::doubled();
  GreenTable t = green(g, 2, origin());
  std::string via_green = csv_green(t);
  std::string via_values = csv_values(t.domain->members, t.values);
  CHECK(via_green == via_values);
  CsvTable parsed = parse_csv(via_green);
  CHECK(parsed.header ==
        std::vector<std::string>{"side", "a", "b", "value"});
  CHECK(parsed.rows.size() == t.domain->members.size());
  int vcol = parsed.column("value");
  REQUIRE(vcol == 3);
  for (size_t i = 0; i < parsed.rows.size(); ++i) {
    // shortest form means the parse is bit-exact
    CHECK(std::stod(parsed.rows[i][size_t(vcol)]) == t.values[i]);
  }
}

TEST_CASE("value CSV rejects mismatched lengths") {
  auto g = GraphFamily::doubled();
  auto b = ball(g, origin(), 1);
  std::vector<double> short_values(b->members.size() - 1, 0.0);
  CHECK_THROWS_AS(csv_values(b->members, short_values), DomainError);
}

TEST_CASE("sandpile CSV is address-sorted over the support union") {
  auto g = GraphFamily::doubled();
  SandState s = stabilize(g, SandState::point_mass(11.0), ToppleSchedule{}, 1e-9);
  std::string csv = csv_sandpile(s);
  CsvTable t = parse_csv(csv);
  CHECK(t.header == std::vector<std::string>{"side", "a", "b", "mass",
                                             "odometer"});
  // strictly increasing addresses, no duplicates
  for (size_t i = 1; i < t.rows.size(); ++i) {
    Vertex prev = parse_vertex(t.rows[i - 1][0] + ":" + t.rows[i - 1][1] +
                               ":" + t.rows[i - 1][2]);
    Vertex cur = parse_vertex(t.rows[i][0] + ":" + t.rows[i][1] + ":" +
                              t.rows[i][2]);
    CHECK(vertex_less(prev, cur));
  }
  // mass column conserves the input
  double total = 0.0;
  int mcol = t.column("mass");
  REQUIRE(mcol >= 0);
  for (const auto& row : t.rows) total += std::stod(row[size_t(mcol)]);
  CHECK(total == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("cluster CSV is chronological with a 0-based order column") {
  auto g = GraphFamily::doubled();
  Cluster c = grow(g, 12, 777);
  CsvTable t = parse_csv(csv_cluster(c));
  CHECK(t.header == std::vector<std::string>{"side", "a", "b",
                                             "settle_order"});
  REQUIRE(t.rows.size() == c.settle_order.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][3] == std::to_string(i));
    Vertex v = parse_vertex(t.rows[i][0] + ":" + t.rows[i][1] + ":" +
                            t.rows[i][2]);
    CHECK(v.key() == c.settle_order[i].key());
  }
  // first settled walker occupies the origin
  CHECK(t.rows[0][0] == "R");
  CHECK(t.rows[0][1] == "0");
  CHECK(t.rows[0][2] == "0");
}

TEST_CASE("sweep CSV keeps the pinned header and drops failed rows") {
  SweepRow ok;
  ok.n = 4;
  ok.trial = 0;
  ok.seed = 99;
  ok.r_in = 3;
  ok.r_out = 5;
  ok.inner_defect = 1;
  ok.outer_excess = 1;
  ok.runtime_ms = 7;
  SweepRow bad;
  bad.n = 8;
  bad.failed = true;
  bad.error = "synthetic";
  std::string csv = csv_sweep({ok, bad});
  CsvTable t = parse_csv(csv);
  CHECK(t.header ==
        std::vector<std::string>{"n", "trial", "seed", "r_in", "r_out",
                                 "inner_defect", "outer_excess",
                                 "runtime_ms"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"4", "0", "99", "3", "5", "1",
                                              "1", "7"});
}

TEST_CASE("CSV emitters are deterministic") {
  auto g = GraphFamily::doubled();
  auto b = ball(g, origin(), 3);
  CHECK(csv_ball(*b) == csv_ball(*b));
  SandState s1 = stabilize(g, SandState::point_mass(29.0), ToppleSchedule{}, 1e-9);
  SandState s2 = stabilize(g, SandState::point_mass(29.0), ToppleSchedule{}, 1e-9);
  CHECK(csv_sandpile(s1) == csv_sandpile(s2));
  Cluster c1 = grow(g, 20, 5);
  Cluster c2 = grow(g, 20, 5);
  CHECK(csv_cluster(c1) == csv_cluster(c2));
}

// ===== CSV reader =====

TEST_CASE("parse_csv strips CR, skips blank lines, validates width") {
  CsvTable t = parse_csv("x,y\r\n\n1,2\r\n3,4\n\n");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});
  CHECK(t.column("y") == 1);
  CHECK(t.column("z") == -1);
  CHECK_THROWS_AS(parse_csv("x,y\n1,2,3\n"), DomainError);
  CHECK_THROWS_AS(parse_csv(""), DomainError);
  CHECK_THROWS_AS(parse_csv("\n\n"), DomainError);
}

// ===== digests and manifests =====

TEST_CASE("fnv1a64 matches the reference vectors") {
  // offset basis for empty input, then the classic single-letter probe
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefcafe1234ull) == "deadbeefcafe1234");
}

TEST_CASE("manifest JSON records config, seed, and output digests") {
  RunManifest m;
  m.subcommand = "ball";
  m.config_json = "{\"n\":4}";
  m.master_seed = 123456789;
  m.wall_clock = "2026-01-02T03:04:05Z";
  m.add_output("ball.csv", "side,a,b\n");
  std::string text = m.to_json();
  auto j = nlohmann::json::parse(text);
  CHECK(j["subcommand"] == "ball");
  CHECK(j["config"]["n"] == 4);
  CHECK(j["master_seed"] == 123456789);
  CHECK(j["version"] == std::string(kVersionTag));
  CHECK(j["wall_clock"] == "2026-01-02T03:04:05Z");
  REQUIRE(j["outputs"].size() == 1);
  CHECK(j["outputs"][0]["path"] == "ball.csv");
  CHECK(j["outputs"][0]["fnv1a64"] == hex64(fnv1a64("side,a,b\n")));
  // unset wall clock gets stamped at render time in ISO 8601 UTC
  RunManifest fresh;
  auto j2 = nlohmann::json::parse(fresh.to_json());
  std::string stamp = j2["wall_clock"];
  REQUIRE(stamp.size() == 20);
  CHECK(stamp[4] == '-');
  CHECK(stamp[10] == 'T');
  CHECK(stamp.back() == 'Z');
  // malformed config stays embedded as a plain string
  RunManifest odd;
  odd.config_json = "not json";
  auto j3 = nlohmann::json::parse(odd.to_json());
  CHECK(j3["config"] == "not json");
}

TEST_CASE("file round-trip and resource errors") {
  std::string path = "io_test_artifact.csv";
  write_file(path, "x,y\n1,2\n");
  CHECK(read_file(path) == "x,y\n1,2\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file("definitely/missing/file.csv"), ResourceError);
  CHECK_THROWS_AS(write_file("no_such_dir/out.csv", "x"), ResourceError);
}

TEST_CASE("version tag is the single source for the tool name") {
  CHECK(std::string(kVersionTag) == "sg-toolkit 0.1.0");
}
