#pragma once
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace sg {

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
  int64_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

// least squares y = slope*x + intercept
struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};
LinFit linear_fit(std::span<const double> x, std::span<const double> y);

// regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a); series for
// x < a+1, continued fraction otherwise
double gamma_q(double a, double x);

// survival function of the chi-square distribution
double chi2_sf(double x, int df);

// two-sample chi-square homogeneity test over integer-valued categories;
// cells with pooled expected count below min_expected are merged into one
struct Chi2Result {
  double chi2 = 0.0;
  int df = 0;
  double pvalue = 1.0;
  int categories = 0;
  int pooled = 0;
};
Chi2Result chi2_two_sample(const std::map<std::pair<int64_t, int64_t>, int64_t>& a,
                           const std::map<std::pair<int64_t, int64_t>, int64_t>& b,
                           double min_expected = 5.0);

// Wilson score interval lower bound for a binomial proportion
double wilson_lower(int64_t successes, int64_t trials, double z);

} // namespace sg
