#include "sg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sg/error.hpp"

namespace sg {

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = int64_t(xs.size());
  if (xs.empty()) return out;
  // Welford, single pass
  double mean = 0.0, m2 = 0.0;
  int64_t k = 0;
  for (double x : xs) {
    ++k;
    double d = x - mean;
    mean += d / double(k);
    m2 += d * (x - mean);
  }
  out.mean = mean;
  if (k > 1) out.se = std::sqrt(m2 / double(k - 1) / double(k));
  return out;
}

LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("linear_fit needs matching arrays with >= 2 points");
  LinFit f;
  f.points = int(x.size());
  double n = double(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: degenerate x values");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

namespace {

double gamma_p_series(double a, double x) {
  // P(a,x) by series; x < a+1
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  // Q(a,x) by modified Lentz continued fraction; x >= a+1
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_q(double a, double x) {
  if (a <= 0.0) throw DomainError("gamma_q: a must be > 0");
  if (x < 0.0) throw DomainError("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, int df) {
  if (df <= 0) throw DomainError("chi2_sf: df must be >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

Chi2Result chi2_two_sample(const std::map<std::pair<int64_t, int64_t>, int64_t>& a,
                           const std::map<std::pair<int64_t, int64_t>, int64_t>& b,
                           double min_expected) {
  // union of categories, then pool cells whose smaller expected count is
  // below min_expected into a single "rest" cell
  std::map<std::pair<int64_t, int64_t>, std::pair<int64_t, int64_t>> cells;
  for (const auto& [k, v] : a) cells[k].first += v;
  for (const auto& [k, v] : b) cells[k].second += v;
  double na = 0, nb = 0;
  for (const auto& [k, v] : cells) {
    na += double(v.first);
    nb += double(v.second);
  }
  if (na <= 0 || nb <= 0) throw DomainError("chi2_two_sample: empty sample");
  double total = na + nb;

  Chi2Result res;
  double chi2 = 0.0;
  int used = 0;
  int64_t pool_a = 0, pool_b = 0;
  int pooled = 0;
  for (const auto& [k, v] : cells) {
    double rowsum = double(v.first + v.second);
    double ea = rowsum * na / total;
    double eb = rowsum * nb / total;
    if (std::min(ea, eb) < min_expected) {
      pool_a += v.first;
      pool_b += v.second;
      ++pooled;
      continue;
    }
    chi2 += (double(v.first) - ea) * (double(v.first) - ea) / ea;
    chi2 += (double(v.second) - eb) * (double(v.second) - eb) / eb;
    ++used;
  }
  if (pool_a + pool_b > 0) {
    double rowsum = double(pool_a + pool_b);
    double ea = rowsum * na / total;
    double eb = rowsum * nb / total;
    chi2 += (double(pool_a) - ea) * (double(pool_a) - ea) / ea;
    chi2 += (double(pool_b) - eb) * (double(pool_b) - eb) / eb;
    ++used;
  }
  if (used < 2)
    throw DomainError("chi2_two_sample: fewer than 2 usable categories");
  res.chi2 = chi2;
  res.df = used - 1;
  res.categories = used;
  res.pooled = pooled;
  res.pvalue = chi2_sf(chi2, res.df);
  return res;
}

double wilson_lower(int64_t successes, int64_t trials, double z) {
  if (trials <= 0) throw DomainError("wilson_lower: trials must be > 0");
  if (successes <= 0) return 0.0;
  double n = double(trials);
  double p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double rad = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  double lo = (center - rad) / denom;
  return std::max(0.0, lo);
}

} // namespace sg
