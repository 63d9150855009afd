#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "augsize/error.hpp"

namespace augsize {

inline long round_half_up(double x) {
  return static_cast<long>(std::floor(x + 0.5));
}

// Round to `digits` significant digits. Report floats pass through this so
// emitted JSON is stable at a declared precision.
inline double round_sig(double v, int digits = 12) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

// Percentile with linear interpolation between the closest order statistics
// (Weibull plotting position h = p/100 * (n + 1), clamped to the sample).
// At p = 5 with two points this returns the lower order statistic.
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(errc::empty_input, "percentile of empty set");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double h = p / 100.0 * (n + 1.0);
  if (h <= 1.0) return values.front();
  if (h >= n) return values.back();
  const double lo = std::floor(h);
  const std::size_t i = static_cast<std::size_t>(lo) - 1;
  return values[i] + (h - lo) * (values[i + 1] - values[i]);
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw Error(errc::empty_input, "mean of empty set");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation (divides by n).
inline double stddev_pop(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Worker cap shared by all parallel sections. Zero means "use hardware".
void set_thread_cap(int cap);
int effective_threads();

// Runs body(i) for i in [0, n). Work items must be independent and write
// only to their own slots; chunk assignment never changes results.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace augsize
