#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "augsize/dataset.hpp"
#include "augsize/generators.hpp"
#include "augsize/infotheory.hpp"
#include "augsize/modeling.hpp"

namespace augsize {

struct BoundConfig {
  double compensation = 1.0;  // C in the bound inversion
  double delta = 0.05;        // confidence level 1 - delta
  double gamma = 0.03;        // target tolerance
};

struct OssInterval {
  long lower = 0;
  long upper = 0;
  bool saturated = false;
};

// Fano floor p_e_lb = (H(Y) - I_lb - 1) / ln(|Y| - 1), clamped to [0, 1].
// Binary classification degenerates the denominator; the fallback is the
// most conservative floor (0) plus a warning.
double fano_floor(double h_y, double i_lb, int n_classes,
                  WarningList* warnings = nullptr);

inline double information_gap(double e_test, double p_e_lb) {
  return std::max(0.0, e_test - p_e_lb);
}

// n_eff = (C * kappa + sqrt(ln(1/delta) / 2))^2 / gamma^2.
double invert_generalization_bound(double kappa, const BoundConfig& cfg);

struct AlphaBreakdown {
  double alpha_r = 1.0;
  double alpha_bound = 1.0;
  double alpha_opt = 1.0;
  double alpha_loss = 1.0;
  double alpha = 1.0;
};

// Four multiplicative components, each clamped to [1, 3]:
//   alpha_r     q95 / mean of the Rademacher replicates
//   alpha_bound 1 + 0.1 * ln(n_classes)
//   alpha_opt   spectral / kappa
//   alpha_loss  fixed per loss kind (cross-entropy 1.0, mse 1.1)
AlphaBreakdown alpha_correction(const std::vector<double>& rademacher_replicates,
                                int n_classes, double spectral, double kappa,
                                LossKind loss);

// N_c = max(0, round(n_eff) - n_train); endpoints round(N_c / rho) and
// round(alpha * N_c / rho). Zero bias or zero N_c saturates to [0, 0].
OssInterval itle_interval(double bias, double n_eff, long n_train, double alpha,
                          double rho);

struct ItleConfig {
  KsgConfig ksg;
  BootstrapConfig boot;
  RhoConfig rho;
  BoundConfig bound;
  int rademacher_iterations = 20;
};

struct ItleReport {
  double i_lb = 0.0;
  double h_y = 0.0;
  double p_e_lb = 0.0;
  double e_test = 0.0;
  double bias = 0.0;
  double r_hat = 0.0;
  double kappa_emp = 0.0;
  double n_eff = 0.0;
  long n_c = 0;
  double spectral = 0.0;
  AlphaBreakdown alpha;
  RhoResult rho;
  OssInterval interval;
  long n_train = 0;
  int n_classes = 0;
  std::vector<double> mi_replicates;
  std::vector<double> rademacher_replicates;
  WarningList warnings;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

// Classification pipeline: information floor, trained-model gap, bound
// inversion, alpha correction and rho scaling.
ItleReport run_itle(const SplitDataset& split, const ModelInput& model,
                    const AugmentedSet& aug, const GeneratorSpec& gen,
                    const ItleConfig& cfg, std::uint64_t seed);

}  // namespace augsize
