#pragma once

#include <json.hpp>

#include "augsize/itle.hpp"

namespace augsize {

struct IcdScore {
  int cov = 0;       // 1 iff the interval covers the snapped ground truth
  double dev = 0.0;  // midpoint deviation as a fraction
  long n_true = 0;
  long q = 1;        // reference quantile, a power of ten

  nlohmann::ordered_json to_json() const;
};

// Q(N) = 10^round(log10 N), exponent rounded half-up.
long reference_quantile(long n);

// Nearest non-negative multiple of q; half-way ties round up.
long snap_true(long n_true_raw, long q);

// Coverage bit plus midpoint deviation |mid - n_true| / D with
// D = n_true when positive, else q / 10.
IcdScore icd_score(const OssInterval& interval, long n_true, long q);

}  // namespace augsize
