#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sg/graph.hpp"
#include "sg/stats.hpp"

namespace sg {

// the two exponents of the lattice: volume growth n^alpha, walk exit times
// n^beta. both are exact logarithms, pinned to the double closest to them.
struct Constants {
  static constexpr double alpha = 1.584962500721156; // log 3 / log 2
  static constexpr double beta = 2.321928094887362;  // log 5 / log 2
};

// ===== fluctuation sweeps =====

struct SweepConfig {
  std::vector<int> radii = {16, 32, 64, 128, 256, 512};
  int64_t trials = 20;
  uint64_t master_seed = 1;
  double kappa = 1.0; // annotates target exponents in reports, never gates

  // parse {"radii":[...],"trials":t,"master_seed":s,"kappa":k}; missing
  // fields keep their defaults
  static SweepConfig from_json(const std::string& text);
  std::string to_json() const;
  void validate() const; // sorts + dedupes radii, checks trials/kappa
};

struct SweepRow {
  int n = 0;
  int64_t trial = 0;
  uint64_t seed = 0;
  int64_t r_in = 0;
  int64_t r_out = 0;
  int64_t inner_defect = 0;
  int64_t outer_excess = 0;
  int64_t runtime_ms = 0;
  bool failed = false;
  std::string error;
};

// one aggregate of |B(n)| walkers per (n, trial), rows in that order; a row
// failure is recorded, not fatal. row seeds derive from the master seed and
// the (n, trial) address, so any subset of rows reproduces independently.
std::vector<SweepRow> sweep(const GraphFamily& g, const SweepConfig& config,
                            int threads = 1, bool timing = false);

// ===== exponent fits =====

enum class SweepField { InnerDefect, OuterExcess };
enum class SweepStat { Max, Mean };

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int zero_replaced = 0; // zero rows enter the logs as 0.5, flagged here
  std::vector<double> log2_n;
  std::vector<double> log2_stat;
};

// least squares of log2(statistic over trials) against log2 n; needs at
// least three distinct radii and a not-identically-zero field
ExponentFit fit_exponent(const std::vector<SweepRow>& rows, SweepField field,
                         SweepStat stat);

// ===== Bernoulli-sum concentration =====

struct LbgResult {
  double mu = 0.0;
  double threshold = 0.0; // mu^(1/2 + gamma)
  int64_t exceed = 0;
  int64_t trials = 0;
  double empirical = 0.0;
  double bound = 0.0; // 2 exp(-mu^(2 gamma) / 4)
  bool pass = false;  // Wilson lower bound at z = 3 stays under the bound
};

// tail frequency of |S - mu| >= mu^(1/2+gamma) for S a Binomial(N, p) sum.
// p = 1/2 runs on popcounted words of the stream and is bit-reproducible;
// other p go through std::binomial_distribution, whose draws follow the
// standard library at hand.
LbgResult lbg_tail_check(int64_t N, double p, double gamma, int64_t trials,
                         uint64_t master_seed);

// ===== settled proportion =====

// k walkers from the origin onto a fully occupied B(n), absorbing past
// n + ceil(k^(1/alpha)); returns the fraction that settle, averaged over
// trials. (n, k) must sit in the window n^(1/(alpha+1)) < k < n^alpha.
MeanStderr settled_fraction(const GraphFamily& g, int n, int64_t k,
                            int64_t trials, uint64_t master_seed);

// ===== annulus counts =====

struct AnnulusAudit {
  int m = 0, k = 0;
  int64_t n = 0, d = 0;  // n = 2^m, d = 2^k
  int64_t exact = 0;     // b_n - b_(n-d) by BFS
  double formula = 0.0;  // printed closed form, kept for the record
  double ratio = 0.0;    // formula / exact
};
AnnulusAudit annulus_audit(const GraphFamily& g, int m, int k);

// operative growth bound: b_n - b_ceil(n(1-eps)) <= 4 eps^(alpha-1) b_n
struct AnnulusGrowth {
  int64_t checks = 0;
  int64_t violations = 0;
  double worst_ratio = 0.0; // annulus count over its bound
  int worst_n = 0;
  double worst_eps = 0.0;
};
AnnulusGrowth annulus_growth_check(const GraphFamily& g, int lo, int hi,
                                   const std::vector<double>& epsilons);

// ===== volume regularity =====

// |B_x(n)| / n^alpha over sampled centers and several radii; the spread
// max/min is the two-sided volume-regularity constant
struct VolumeRatioSuite {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;
  int centers = 0;
};
VolumeRatioSuite volume_ratio_suite(const GraphFamily& g, int centers,
                                    const std::vector<int>& radii,
                                    uint64_t master_seed);

} // namespace sg
