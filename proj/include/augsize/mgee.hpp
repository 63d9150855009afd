#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "augsize/dataset.hpp"
#include "augsize/generators.hpp"
#include "augsize/infotheory.hpp"
#include "augsize/itle.hpp"
#include "augsize/modeling.hpp"

namespace augsize {

struct MgeeConfig {
  double iota = 1e-3;      // derivative threshold
  double a_max = 50.0;     // search ceiling for the augmentation ratio
  double grid_step = 1e-3; // reporting/oracle grid resolution
  double c1 = 0.05;        // beta_pac scale
  double c2 = 0.25;        // beta_rho scale
  double c3 = 0.5;         // beta_emp scale
  int beta_repeats = 5;    // augmentation experiments behind beta_emp
  int posterior_window = 20;
  double prior_std = 1.0;
  int curve_points = 40;
};

// n_eff(a) = n_train * (1 + a) / (1 + a * (1 - rho)).
double effective_sample_size(double a, double rho, double n_train);

// G(a) = sqrt(a_pb / n_eff(a)).
double generalization_value(double a_pb, double n_eff);

// Analytic dG/da (negative; G is non-increasing in a):
//   -sqrt(a_pb / n_train) * rho / (2 (1+a)^{3/2} (1 + a(1-rho))^{1/2}).
double derivative_g(double a, double a_pb, double rho, double n_train);

struct SaturationResult {
  double a_star = 0.0;
  bool ceiling_hit = false;
};

// Smallest a in [0, a_max] with |dG/da| <= iota. |dG/da| is strictly
// decreasing in a for rho > 0, so bisection applies.
SaturationResult saturation_ratio(double a_pb, double rho, double n_train,
                                  const MgeeConfig& cfg,
                                  WarningList* warnings = nullptr);

struct BetaBreakdown {
  double beta_pac = 1.0;
  double beta_rho = 1.0;
  double beta_emp = 1.0;
  double beta = 1.0;
};

// beta_pac = 1 + c1 * tanh(a_pb / param_count), beta_rho = 1 + c2 * rho^2,
// beta_emp = 1 + c3 * (std / mean) of repeated augmentation errors; each
// component clamped to [1, 2].
BetaBreakdown beta_correction(double a_pb, long param_count, double rho,
                              const std::vector<double>& errors,
                              const MgeeConfig& cfg,
                              WarningList* warnings = nullptr);

// N_r = round(n_train * a_star), upper = round(N_r * beta), half-up.
OssInterval mgee_interval(long n_train, double a_star, double beta);

struct CurveSample {
  double a = 0.0;
  double g = 0.0;
  double dg_da = 0.0;
};

struct MgeeReport {
  double a_pb = 0.0;
  RhoResult rho;
  long n_train = 0;
  long param_count = 0;
  std::vector<CurveSample> curve;
  double a_star = 0.0;
  bool ceiling_hit = false;
  long n_r = 0;
  BetaBreakdown beta;
  std::vector<double> beta_errors;
  OssInterval interval;
  WarningList warnings;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  std::string curve_csv() const;
};

// Regression pipeline: PAC-Bayes complexity, redundancy-discounted
// effective sample size, saturation point of the generalization curve,
// beta correction.
MgeeReport run_mgee(const SplitDataset& split, const ModelInput& model,
                    const AugmentedSet& aug, const GeneratorSpec& gen,
                    const MgeeConfig& cfg, const KsgConfig& ksg,
                    const RhoConfig& rho_cfg, std::uint64_t seed);

}  // namespace augsize
