#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sg/ball.hpp"
#include "sg/fluctuations.hpp"
#include "sg/green.hpp"
#include "sg/idla.hpp"
#include "sg/sandpile.hpp"

namespace sg {

inline constexpr const char* kVersionTag = "sg-toolkit 0.1.0";

// shortest decimal that round-trips the double
std::string format_double(double v);

// ===== CSV emitters (schemas are pinned; headers never change) =====

// header: side,a,b,dist_to_center,is_inner_boundary
std::string csv_ball(const Ball& b);

// header: side,a,b,value — rows follow the ball's BFS order
std::string csv_green(const GreenTable& t);
std::string csv_values(const std::vector<Vertex>& verts,
                       const std::vector<double>& values);

// header: side,a,b,mass,odometer — support union, address-sorted
std::string csv_sandpile(const SandState& s);

// header: side,a,b,settle_order — chronological
std::string csv_cluster(const Cluster& c);

// header: n,trial,seed,r_in,r_out,inner_defect,outer_excess,runtime_ms
// failed rows carry no numbers and are skipped
std::string csv_sweep(const std::vector<SweepRow>& rows);

// minimal CSV reader: first row is the header, fields split on commas,
// no quoting (none of the schemas above needs it)
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const; // -1 if absent
};
CsvTable parse_csv(const std::string& text);

// ===== digests and manifests =====

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

// every artifact file gets one of these next to it; equal inputs give equal
// output digests, while wall_clock records when this particular run happened
struct RunManifest {
  std::string subcommand;
  std::string config_json = "{}"; // resolved flags as a JSON object
  uint64_t master_seed = 0;
  std::string version = kVersionTag;
  std::string wall_clock;         // ISO 8601 UTC, set by now() or the caller
  std::vector<std::pair<std::string, std::string>> outputs; // path, digest

  static std::string now_utc();
  void add_output(const std::string& path, std::string_view content);
  std::string to_json() const;
};

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

} // namespace sg
