#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hmi::stats {

// Raised when a test is not defined for the data (all differences zero,
// zero variance, too few pairs).
class UndefinedTest : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using Pairs = std::vector<std::pair<double, double>>;

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation (n - 1); NaN below two values.
inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Average ranks (1-based) of the values, ties sharing the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

struct WilcoxonResult {
  std::size_t n = 0;     // pairs with a nonzero difference
  double w_plus = 0.0;   // rank sum of positive differences (d = a - b)
  double w_minus = 0.0;
  double z = 0.0;        // normal approximation, negative when a tends below b
  double p = 1.0;        // two-sided
  bool exact = false;
};

inline constexpr std::size_t kExactWilcoxonMax = 12;

// Exact two-sided p of W+ by counting sign assignments. Ranks are doubled so
// half-integer tie ranks stay integral; counts[s] is the number of the 2^n
// assignments whose doubled W+ equals s.
inline double wilcoxon_exact_p(const std::vector<double>& ranks, double w_plus) {
  std::vector<int> r2;
  int total = 0;
  for (double r : ranks) {
    r2.push_back(static_cast<int>(std::lround(2.0 * r)));
    total += r2.back();
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  for (int r : r2)
    for (int s = total; s >= r; --s) counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
  const int w2 = static_cast<int>(std::lround(2.0 * w_plus));
  std::uint64_t le = 0, ge = 0;
  for (int s = 0; s <= total; ++s) {
    if (s <= w2) le += counts[static_cast<std::size_t>(s)];
    if (s >= w2) ge += counts[static_cast<std::size_t>(s)];
  }
  const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / all);
}

// Wilcoxon signed-rank test on d = a - b. Zero differences are dropped, tied
// |d| get average ranks, Z uses the tie-corrected variance. p is exact for
// n <= 12 and otherwise from the normal approximation with continuity
// correction.
inline WilcoxonResult wilcoxon_signed_rank(const Pairs& pairs) {
  std::vector<double> d;
  for (const auto& [a, b] : pairs)
    if (a - b != 0.0) d.push_back(a - b);
  if (d.empty()) throw UndefinedTest("wilcoxon: all differences are zero");

  std::vector<double> mag(d.size());
  std::transform(d.begin(), d.end(), mag.begin(), [](double x) { return std::abs(x); });
  const auto ranks = average_ranks(mag);

  WilcoxonResult res;
  res.n = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];

  const double n = static_cast<double>(res.n);
  double tie_term = 0.0;
  {
    auto sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double mu = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double sd = std::sqrt(var);
  res.z = sd > 0.0 ? (res.w_plus - mu) / sd : 0.0;

  if (res.n <= kExactWilcoxonMax) {
    res.exact = true;
    res.p = wilcoxon_exact_p(ranks, res.w_plus);
  } else {
    const double zc = sd > 0.0 ? std::max(0.0, std::abs(res.w_plus - mu) - 0.5) / sd : 0.0;
    res.p = normal_two_sided(zc);
  }
  return res;
}

// Regularised incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double c = 1.0;
  double dd = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(dd) < tiny) dd = tiny;
  dd = 1.0 / dd;
  double f = dd;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    dd = 1.0 + num * dd;
    if (std::abs(dd) < tiny) dd = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    f *= dd * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    dd = 1.0 + num * dd;
    if (std::abs(dd) < tiny) dd = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    dd = 1.0 / dd;
    const double delta = dd * c;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::exp(ln_front) * f / a;
}

// Two-sided tail of Student's t with df degrees of freedom.
inline double student_t_two_sided(double t, double df) {
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
  std::size_t n = 0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Paired t-test on d = a - b.
inline TTestResult paired_t(const Pairs& pairs) {
  if (pairs.size() < 2) throw UndefinedTest("paired t: need at least two pairs");
  std::vector<double> d;
  for (const auto& [a, b] : pairs) d.push_back(a - b);
  const double m = mean(d);
  const double sd = sample_sd(d);
  if (!(sd > 0.0)) throw UndefinedTest("paired t: differences have zero variance");
  TTestResult r;
  r.n = d.size();
  r.df = static_cast<double>(d.size() - 1);
  r.t = m / (sd / std::sqrt(static_cast<double>(d.size())));
  r.p = student_t_two_sided(r.t, r.df);
  return r;
}

}  // namespace hmi::stats
