#include "sg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sg/error.hpp"

namespace sg {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void append_vertex(std::string& out, const Vertex& v) {
  out += v.side == Side::Left ? 'L' : 'R';
  out += ',';
  out += std::to_string(v.a);
  out += ',';
  out += std::to_string(v.b);
}

} // namespace

// ===== CSV emitters =====

std::string csv_ball(const Ball& b) {
  std::string out = "side,a,b,dist_to_center,is_inner_boundary\n";
  for (size_t i = 0; i < b.members.size(); ++i) {
    append_vertex(out, b.members[i]);
    out += ',';
    out += std::to_string(b.dist[i]);
    out += ',';
    out += b.inner_bdy[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string csv_values(const std::vector<Vertex>& verts,
                       const std::vector<double>& values) {
  if (verts.size() != values.size())
    throw DomainError("csv_values: length mismatch");
  std::string out = "side,a,b,value\n";
  for (size_t i = 0; i < verts.size(); ++i) {
    append_vertex(out, verts[i]);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

std::string csv_green(const GreenTable& t) {
  return csv_values(t.domain->members, t.values);
}

std::string csv_sandpile(const SandState& s) {
  std::vector<uint64_t> keys;
  keys.reserve(s.mass.size() + s.odometer.size());
  for (const auto& [k, v] : s.mass) keys.push_back(k);
  for (const auto& [k, v] : s.odometer)
    if (!s.mass.count(k)) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), [](uint64_t x, uint64_t y) {
    return vertex_less(Vertex::from_key(x), Vertex::from_key(y));
  });
  std::string out = "side,a,b,mass,odometer\n";
  for (uint64_t k : keys) {
    Vertex v = Vertex::from_key(k);
    append_vertex(out, v);
    out += ',';
    out += format_double(s.mass_at(v));
    out += ',';
    out += format_double(s.odometer_at(v));
    out += '\n';
  }
  return out;
}

std::string csv_cluster(const Cluster& c) {
  std::string out = "side,a,b,settle_order\n";
  for (size_t i = 0; i < c.settle_order.size(); ++i) {
    append_vertex(out, c.settle_order[i]);
    out += ',';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

std::string csv_sweep(const std::vector<SweepRow>& rows) {
  std::string out = "n,trial,seed,r_in,r_out,inner_defect,outer_excess,runtime_ms\n";
  for (const SweepRow& r : rows) {
    if (r.failed) continue;
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.r_in);
    out += ',';
    out += std::to_string(r.r_out);
    out += ',';
    out += std::to_string(r.inner_defect);
    out += ',';
    out += std::to_string(r.outer_excess);
    out += ',';
    out += std::to_string(r.runtime_ms);
    out += '\n';
  }
  return out;
}

// ===== CSV reader =====

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  return -1;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size())
        throw DomainError("csv: row width does not match the header");
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw DomainError("csv: empty input");
  return t;
}

// ===== digests and manifests =====

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
  return std::string(buf);
}

std::string RunManifest::now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

void RunManifest::add_output(const std::string& path,
                             std::string_view content) {
  outputs.emplace_back(path, hex64(fnv1a64(content)));
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  try {
    j["config"] = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception&) {
    j["config"] = config_json; // keep it as a string if it was not JSON
  }
  j["master_seed"] = master_seed;
  j["version"] = version;
  j["wall_clock"] = wall_clock.empty() ? now_utc() : wall_clock;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& [path, digest] : outputs)
    outs.push_back({{"path", path}, {"fnv1a64", digest}});
  j["outputs"] = outs;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw ResourceError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace sg
