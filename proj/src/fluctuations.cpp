#include "sg/fluctuations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <json.hpp>

#include "sg/ball.hpp"
#include "sg/error.hpp"
#include "sg/idla.hpp"
#include "sg/parallel.hpp"
#include "sg/rng.hpp"

namespace sg {

// ===== sweep config =====

SweepConfig SweepConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("sweep config: ") + e.what());
  }
  SweepConfig c;
  try {
    if (j.contains("radii")) c.radii = j["radii"].get<std::vector<int>>();
    if (j.contains("trials")) c.trials = j["trials"].get<int64_t>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<uint64_t>();
    if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string SweepConfig::to_json() const {
  nlohmann::json j;
  j["radii"] = radii;
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  j["kappa"] = kappa;
  return j.dump();
}

void SweepConfig::validate() const {
  if (radii.empty()) throw DomainError("sweep config: radii must be nonempty");
  for (int n : radii)
    if (n < 1) throw DomainError("sweep config: radii must be >= 1");
  if (trials < 1) throw DomainError("sweep config: trials must be >= 1");
  if (!(kappa > 0.0)) throw DomainError("sweep config: kappa must be > 0");
}

// ===== sweep =====

std::vector<SweepRow> sweep(const GraphFamily& g, const SweepConfig& config,
                            int threads, bool timing) {
  config.validate();
  std::vector<int> ns = config.radii;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<SweepRow> rows(ns.size() * size_t(config.trials));
  parallel_for(int64_t(rows.size()), threads, [&](int64_t job) {
    int n = ns[size_t(job / config.trials)];
    int64_t trial = job % config.trials;
    SweepRow& row = rows[size_t(job)];
    row.n = n;
    row.trial = trial;
    row.seed = RngStream::derive_seed(config.master_seed,
                                      (uint64_t(uint32_t(n)) << 32) |
                                          uint64_t(uint32_t(trial)));
    try {
      auto t0 = std::chrono::steady_clock::now();
      Cluster c = grow(g, ball_volume(g, n), row.seed);
      RadiusStats rs = radii(c);
      if (timing) {
        auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                .count();
      }
      row.r_in = rs.r_in;
      row.r_out = rs.r_out;
      row.inner_defect = rs.inner_defect;
      row.outer_excess = rs.outer_excess;
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  return rows;
}

// ===== exponent fits =====

ExponentFit fit_exponent(const std::vector<SweepRow>& rows, SweepField field,
                         SweepStat stat) {
  std::map<int, std::vector<double>> by_n;
  int zero_replaced = 0;
  bool any_nonzero = false;
  for (const SweepRow& r : rows) {
    if (r.failed) continue;
    double v = double(field == SweepField::InnerDefect ? r.inner_defect
                                                       : r.outer_excess);
    if (v < 0.0) throw DomainError("fit: negative defect row");
    if (v == 0.0) {
      v = 0.5; // half-integer floor keeps the log finite without dropping rows
      ++zero_replaced;
    } else {
      any_nonzero = true;
    }
    by_n[r.n].push_back(v);
  }
  if (!any_nonzero)
    throw DomainError("fit: statistic is identically zero, nothing to fit");
  if (by_n.size() < 3)
    throw DomainError("fit: need at least three distinct radii");

  ExponentFit out;
  out.zero_replaced = zero_replaced;
  for (const auto& [n, vals] : by_n) {
    double s;
    if (stat == SweepStat::Max) {
      s = *std::max_element(vals.begin(), vals.end());
    } else {
      s = 0.0;
      for (double v : vals) s += v;
      s /= double(vals.size());
    }
    out.log2_n.push_back(std::log2(double(n)));
    out.log2_stat.push_back(std::log2(s));
  }
  LinFit fit = linear_fit(out.log2_n, out.log2_stat);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  return out;
}

// ===== Bernoulli-sum concentration =====

LbgResult lbg_tail_check(int64_t N, double p, double gamma, int64_t trials,
                         uint64_t master_seed) {
  if (N < 1) throw DomainError("lbg: N must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("lbg: p must be in (0,1)");
  if (!(gamma > 0.0 && gamma < 0.5))
    throw DomainError("lbg: gamma must be in (0, 1/2)");
  if (trials < 1) throw DomainError("lbg: trials must be >= 1");

  LbgResult out;
  out.trials = trials;
  out.mu = double(N) * p;
  out.threshold = std::pow(out.mu, 0.5 + gamma);
  out.bound = 2.0 * std::exp(-0.25 * std::pow(out.mu, 2.0 * gamma));

  if (p == 0.5) {
    int64_t words = N / 64, rem = N % 64;
    uint64_t rem_mask = rem ? ((uint64_t(1) << rem) - 1) : 0;
    for (int64_t t = 0; t < trials; ++t) {
      RngStream rs = RngStream::from(master_seed, uint64_t(t));
      int64_t s = 0;
      for (int64_t w = 0; w < words; ++w) s += __builtin_popcountll(rs.next());
      if (rem) s += __builtin_popcountll(rs.next() & rem_mask);
      if (std::abs(double(s) - out.mu) >= out.threshold) ++out.exceed;
    }
  } else {
    for (int64_t t = 0; t < trials; ++t) {
      RngStream rs = RngStream::from(master_seed, uint64_t(t));
      std::binomial_distribution<int64_t> binom(N, p);
      int64_t s = binom(rs);
      if (std::abs(double(s) - out.mu) >= out.threshold) ++out.exceed;
    }
  }
  out.empirical = double(out.exceed) / double(trials);
  out.pass = wilson_lower(out.exceed, trials, 3.0) <= out.bound;
  return out;
}

// ===== settled proportion =====

MeanStderr settled_fraction(const GraphFamily& g, int n, int64_t k,
                            int64_t trials, uint64_t master_seed) {
  if (n < 1) throw DomainError("settled_fraction: n must be >= 1");
  if (trials < 1) throw DomainError("settled_fraction: trials must be >= 1");
  double lo = std::pow(double(n), 1.0 / (Constants::alpha + 1.0));
  double hi = std::pow(double(n), Constants::alpha);
  if (!(double(k) > lo && double(k) < hi))
    throw DomainError("settled_fraction: k outside the window (n^(1/(alpha+1)), n^alpha)");
  int absorb = n + int(std::ceil(std::pow(double(k), 1.0 / Constants::alpha)));

  std::vector<double> fracs(static_cast<size_t>(trials));
  for (int64_t t = 0; t < trials; ++t) {
    uint64_t seed = RngStream::derive_seed(master_seed, uint64_t(t));
    StoppedState st = grow_stopped_onto_ball(g, n, k, absorb, seed);
    fracs[size_t(t)] =
        double(k - int64_t(st.paused.size())) / double(k);
  }
  return mean_stderr(fracs);
}

// ===== annulus counts =====

AnnulusAudit annulus_audit(const GraphFamily& g, int m, int k) {
  if (m < 1 || k < 0 || k >= m)
    throw DomainError("annulus audit: need 0 <= k < m, m >= 1");
  AnnulusAudit out;
  out.m = m;
  out.k = k;
  out.n = int64_t(1) << m;
  out.d = int64_t(1) << k;
  int64_t bn = ball_volume(g, int(out.n));
  out.exact = bn - ball_volume(g, int(out.n - out.d));
  double tri = std::pow(3.0, double(k + 1));
  out.formula = std::pow(2.0, double(m - k)) * (tri + 3.0) / (tri + 2.0) *
                double(bn);
  out.ratio = out.formula / double(out.exact);
  return out;
}

AnnulusGrowth annulus_growth_check(const GraphFamily& g, int lo, int hi,
                                   const std::vector<double>& epsilons) {
  if (lo < 2 || hi < lo) throw DomainError("annulus growth: bad radius range");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 1.0))
      throw DomainError("annulus growth: eps must be in (0,1)");
  AnnulusGrowth out;
  for (int n = lo; n <= hi; ++n) {
    int64_t bn = ball_volume(g, n);
    for (double eps : epsilons) {
      int inner = int(std::ceil(double(n) * (1.0 - eps)));
      int64_t count = bn - ball_volume(g, inner);
      double bound = 4.0 * std::pow(eps, Constants::alpha - 1.0) * double(bn);
      double ratio = double(count) / bound;
      ++out.checks;
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_n = n;
        out.worst_eps = eps;
      }
      if (count > bound) ++out.violations;
    }
  }
  return out;
}

// ===== volume regularity =====

VolumeRatioSuite volume_ratio_suite(const GraphFamily& g, int centers,
                                    const std::vector<int>& radii,
                                    uint64_t master_seed) {
  if (centers < 1) throw DomainError("volume ratio: centers must be >= 1");
  if (radii.empty()) throw DomainError("volume ratio: radii must be nonempty");
  OriginTable table(g);
  table.ensure_radius(512);
  int64_t pool = table.volume(512);

  VolumeRatioSuite out;
  out.centers = centers;
  out.min_ratio = std::numeric_limits<double>::infinity();
  RngStream rs = RngStream::from(master_seed, 0);
  for (int c = 0; c < centers; ++c) {
    Vertex x = table.verts[rs.uniform_below(uint32_t(pool))];
    for (int n : radii) {
      double ratio = double(ball(g, x, n)->volume()) /
                     std::pow(double(n), Constants::alpha);
      out.min_ratio = std::min(out.min_ratio, ratio);
      out.max_ratio = std::max(out.max_ratio, ratio);
    }
  }
  out.spread = out.max_ratio / out.min_ratio;
  return out;
}

} // namespace sg
