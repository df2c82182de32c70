#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "pkghallu/error.hpp"

namespace pkghallu::stats {

struct StatSummary {
  double mean = 0;
  double sample_stddev = 0;  // n-1 denominator
  double median = 0;
  double interquartile_mean = 0;
  std::size_t n = 0;
};

struct CorrelationResult {
  double rho = 0;
  double p_value = 1;  // two-sided
  std::size_t n = 0;
};

struct GroupStats {
  double mean = 0;
  double sample_stddev = 0;
  std::size_t n = 0;
};

struct WelchResult {
  GroupStats group_a;
  GroupStats group_b;
  double t_statistic = 0;
  double degrees_of_freedom = 0;
  double p_value = 1;  // two-sided
};

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InputError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw InputError("sample variance needs at least 2 values");
  double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / double(v.size() - 1);
}

inline double sample_stddev(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

// Middle value, or the mean of the two middle values. `sorted` must be sorted.
inline double median_sorted(std::span<const double> sorted) {
  if (sorted.empty()) throw InputError("median of an empty sample");
  std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

inline double median(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return median_sorted(s);
}

// Quartiles by median of halves; for odd n the median belongs to neither half.
inline std::pair<double, double> quartiles(std::span<const double> v) {
  if (v.size() < 2) throw InputError("quartiles need at least 2 values");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  std::size_t half = s.size() / 2;
  std::span<const double> all(s);
  return {median_sorted(all.first(half)), median_sorted(all.last(half))};
}

// Mean of the values lying within [Q1, Q3].
inline double interquartile_mean(std::span<const double> v) {
  auto [q1, q3] = quartiles(v);
  double sum = 0;
  std::size_t k = 0;
  for (double x : v)
    if (x >= q1 && x <= q3) sum += x, ++k;
  return sum / double(k);
}

inline StatSummary summarize(std::span<const double> values) {
  if (values.size() < 2) throw InputError("summarize needs at least 2 values");
  return {mean(values), sample_stddev(values), median(values), interquartile_mean(values), values.size()};
}

inline GroupStats group_stats(std::span<const double> v) {
  return {mean(v), v.size() >= 2 ? sample_stddev(v) : 0.0, v.size()};
}

// Two-sided tail probability P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  return std::min(1.0, p);
}

// Pearson product-moment correlation with a two-sided p-value from
// t = rho * sqrt((n-2) / (1-rho^2)) on n-2 degrees of freedom.
inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw InputError("pearson needs at least 3 pairs");
  double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw InputError("pearson: constant input has zero variance");
  double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  double df = double(n - 2);
  double t = std::fabs(rho) == 1.0 ? std::copysign(INFINITY, rho)
                                    : rho * std::sqrt(df / (1.0 - rho * rho));
  return {rho, t_two_sided_p(t, df), n};
}

// Welch's unequal-variance two-sample t-test, two-sided.
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("welch_t_test needs at least 2 values per group");
  WelchResult r{group_stats(a), group_stats(b), 0, 0, 1};
  double va = r.group_a.sample_stddev * r.group_a.sample_stddev / double(a.size());
  double vb = r.group_b.sample_stddev * r.group_b.sample_stddev / double(b.size());
  double se2 = va + vb;
  double diff = r.group_a.mean - r.group_b.mean;
  if (se2 == 0) {
    if (diff != 0) throw InputError("welch_t_test: both groups constant with different means");
    r.degrees_of_freedom = double(a.size() + b.size() - 2);
    return r;
  }
  r.t_statistic = diff / std::sqrt(se2);
  r.degrees_of_freedom =
      se2 * se2 / (va * va / double(a.size() - 1) + vb * vb / double(b.size() - 1));
  r.p_value = t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  return r;
}

}  // namespace pkghallu::stats
