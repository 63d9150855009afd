#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "augsize/dataset.hpp"
#include "augsize/error.hpp"
#include "augsize/generators.hpp"

namespace augsize {

struct KsgConfig {
  int k = 5;  // neighborhood size; metric is fixed max-norm (Chebyshev)
  // Seed of the deterministic tie-break jitter stream.
  std::uint64_t jitter_seed = 0;
};

struct BootstrapConfig {
  int replicates = 200;
  double percentile = 5.0;
  // Resample size m. Each replicate draws m rows without replacement
  // (m-out-of-n bootstrap): with-replacement duplicates are coincident
  // points for a k-NN estimator and inflate it by ~0.25 nats. 0 means the
  // default of 70% of n.
  int resample_size = 0;
  std::uint64_t seed = 0;
};

// How generated rows are matched to real rows for the conditional MI.
// Transforms carry their source row; sampled generators fall back to a
// seeded random same-class partner, which is exact under independence.
enum class Pairing { source_paired, random_same_class };

struct RhoConfig {
  int pca_dims = 3;
  int bins = 8;
  double epsilon = 1e-10;
  double tau = 1e6;
  Pairing pairing = Pairing::source_paired;
  std::uint64_t pairing_seed = 0;
  double rho_min = 1e-3;
};

// Digamma via recurrence shift plus the asymptotic Bernoulli series;
// absolute error below 1e-12 on the positive axis.
double digamma(double x);

struct MiEstimate {
  double value = 0.0;  // raw clamped below at -0.1
  double raw = 0.0;
};

// KSG-1 estimator with max-norm balls on the joint space, both marginals
// continuous.
MiEstimate ksg_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                  const KsgConfig& cfg);

// Mixed discrete-continuous variant: the Y-ball of a sample is its label
// class, the joint k-NN search runs inside the class.
MiEstimate ksg_mi(const Eigen::MatrixXd& x, const std::vector<int>& y,
                  const KsgConfig& cfg, WarningList* warnings = nullptr);

struct BootstrapResult {
  double lower_bound = 0.0;          // clamped below at 0
  std::vector<double> replicates;    // one KSG estimate per resample
};

BootstrapResult bootstrap_lower_bound(const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& y,
                                      const KsgConfig& ksg,
                                      const BootstrapConfig& boot,
                                      WarningList* warnings = nullptr);
BootstrapResult bootstrap_lower_bound(const Eigen::MatrixXd& x,
                                      const std::vector<int>& y,
                                      const KsgConfig& ksg,
                                      const BootstrapConfig& boot,
                                      WarningList* warnings = nullptr);

// Plug-in label entropy in nats.
double discrete_entropy(const std::vector<int>& labels);

// Quantile bin codes (0..bins-1) of a continuous column; used to turn
// regression targets into conditioning bands.
std::vector<int> quantile_bins(const Eigen::VectorXd& values, int bins);

// H(X|Y): PCA to q dims, min-max normalize, quantile-bin each dim, plug-in
// joint entropy per class weighted by class priors.
double conditional_entropy_binned(const Eigen::MatrixXd& x,
                                  const std::vector<int>& y,
                                  const RhoConfig& cfg,
                                  WarningList* warnings = nullptr);

// I(Xr; Xg | Y) over paired real/generated rows, per-class KSG on the
// PCA+minmax-reduced representation, class-count-weighted mean.
double conditional_mi(const Dataset& real, const AugmentedSet& aug,
                      const RhoConfig& cfg, const KsgConfig& ksg,
                      WarningList* warnings = nullptr);

struct RhoResult {
  double rho = 1.0;  // clamped to [rho_min, 1]
  double raw = 1.0;
  double xi = 1.0;
  long param_count = 0;
  double cond_mi = 0.0;
  double cond_entropy = 0.0;
};

// 1 - xi * cond_mi / (cond_entropy + epsilon), clamped to [rho_min, 1].
double rho_formula(double cond_mi, double cond_entropy, double xi,
                   double epsilon = 1e-10, double rho_min = 1e-3);

// rho = 1 - xi * I(Xr;Xg|Y) / (H(Xr|Y) + eps), xi = exp(-K / tau).
RhoResult info_contribution_ratio(const Dataset& real, const AugmentedSet& aug,
                                  const GeneratorSpec& gen,
                                  const RhoConfig& cfg, const KsgConfig& ksg,
                                  WarningList* warnings = nullptr);

}  // namespace augsize
