#include "augsize/icd.hpp"

#include <cmath>

#include "augsize/util.hpp"

namespace augsize {

long reference_quantile(long n) {
  if (n < 1) throw Error(errc::invalid_argument, "sample size must be >= 1");
  const long exponent = round_half_up(std::log10(static_cast<double>(n)));
  long q = 1;
  for (long e = 0; e < exponent; ++e) q *= 10;
  return q;
}

long snap_true(long n_true_raw, long q) {
  if (q < 1) throw Error(errc::invalid_argument, "quantile must be >= 1");
  if (n_true_raw < 0)
    throw Error(errc::invalid_argument, "ground truth must be >= 0");
  const long k = round_half_up(static_cast<double>(n_true_raw) /
                               static_cast<double>(q));
  return k * q;
}

IcdScore icd_score(const OssInterval& interval, long n_true, long q) {
  if (interval.lower > interval.upper || interval.lower < 0)
    throw Error(errc::invalid_argument, "malformed OSS interval");
  if (q < 1) throw Error(errc::invalid_argument, "quantile must be >= 1");
  if (n_true % q != 0)
    throw Error(errc::invalid_argument,
                "ground truth must be a multiple of the reference quantile");
  IcdScore score;
  score.n_true = n_true;
  score.q = q;
  score.cov = (n_true >= interval.lower && n_true <= interval.upper) ? 1 : 0;
  const double mid =
      0.5 * (static_cast<double>(interval.lower) + static_cast<double>(interval.upper));
  const double denom = n_true > 0 ? static_cast<double>(n_true)
                                  : static_cast<double>(q) / 10.0;
  score.dev = std::abs(mid - static_cast<double>(n_true)) / denom;
  return score;
}

nlohmann::ordered_json IcdScore::to_json() const {
  nlohmann::ordered_json j;
  j["icd_cov"] = cov;
  j["icd_dev"] = dev;
  j["n_true"] = n_true;
  j["q"] = q;
  return j;
}

}  // namespace augsize
