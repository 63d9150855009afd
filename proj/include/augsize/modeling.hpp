#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <string>
#include <variant>
#include <vector>

#include "augsize/dataset.hpp"
#include "augsize/error.hpp"

namespace augsize {

enum class ModelKind { linear_logistic, linear_regressor, ridge, mlp };
enum class LossKind { cross_entropy, mse };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::linear_logistic;
  std::vector<int> hidden;  // mlp hidden layer sizes
  double learning_rate = 1e-2;
  int max_epochs = 200;
  int patience = 20;
  double l2 = 0.0;
  double norm_bound = 1.0;  // B for the linear Rademacher closed form
  LossKind loss = LossKind::cross_entropy;
  // Grid-search cells; empty grids fall back to the scalar fields.
  std::vector<double> lr_grid;
  std::vector<double> l2_grid;
  int rademacher_epochs = 60;  // sign-fitting budget per replicate
};

struct Layer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

struct TrainTrace {
  std::vector<double> val_loss;            // one entry per epoch
  std::deque<Eigen::VectorXd> snapshots;   // flattened params, last epochs
  int best_epoch = 0;
  double best_val_loss = 0.0;
  double chosen_lr = 0.0;
  double chosen_l2 = 0.0;
};

struct TrainedModel {
  ModelSpec spec;
  Task task = Task::classification;
  int n_outputs = 1;
  std::vector<Layer> layers;          // best-validation snapshot
  Eigen::VectorXd feature_mean;       // training standardizer
  Eigen::VectorXd feature_scale;
  TrainTrace trace;
  std::uint64_t seed = 0;

  // Raw outputs: logits (n x classes) or predictions (n x 1).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  std::vector<int> predict_class(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd predict_value(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd flatten() const;
  long param_count() const;
};

// Trains with full-batch Adam, early stopping on validation loss, and an
// optional declared hyperparameter grid; deterministic given the seed.
TrainedModel fit(const ModelSpec& spec, const Dataset& train,
                 const Dataset& val, std::uint64_t seed);
TrainedModel fit(const ModelSpec& spec, const struct SplitDataset& split,
                 std::uint64_t seed);

struct Metrics {
  Task task = Task::classification;
  double test_error = 0.0;  // classification: 1 - accuracy
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double mape = 0.0;
  double rmse = 0.0;
  double mse = 0.0;
};

Metrics test_error(const TrainedModel& model, const Dataset& test);

struct RademacherResult {
  double mean = 0.0;
  std::vector<double> replicates;  // successful replicates only
  int failed = 0;
};

// Families used by the empirical Rademacher probe. The zero and constant
// families have exact suprema and exist mainly to pin the estimator down.
enum class RadFamily { zero, constant, linear_closed_form, linear_trained, mlp_trained };

// Exact supremum of (1/n) sum_i sigma_i w^T x_i over ||w||_2 <= bound.
double linear_rademacher_value(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& sigma, double bound);

RademacherResult empirical_rademacher_family(RadFamily family,
                                             const ModelSpec& spec,
                                             const Eigen::MatrixXd& x,
                                             int iterations,
                                             std::uint64_t seed);

// Dispatches on the spec: linear kinds use the closed form
// B * ||sum_i sigma_i x_i||_2 / n on standardized features, the mlp kind
// fits each sign vector with a budgeted training run.
RademacherResult empirical_rademacher(const ModelSpec& spec,
                                      const Eigen::MatrixXd& x, int iterations,
                                      std::uint64_t seed);

inline double scale_complexity(double r_hat, double n_train) {
  return r_hat * std::sqrt(n_train);
}

struct PacBayesPosterior {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // floored at 1e-6
  double prior_std = 1.0;
};

// Diagonal Gaussian posterior from the tail of the training trajectory:
// means are the final parameters, stds the per-parameter population std
// over the last `window` epochs.
PacBayesPosterior collect_posterior(const TrainedModel& model, int window = 20,
                                    double prior_std = 1.0,
                                    WarningList* warnings = nullptr);

// KL(Q || P) for diagonal Gaussians against the N(0, prior_std^2) prior.
double pac_bayes_complexity(const PacBayesPosterior& posterior);

// Product of per-layer spectral norms; a linear model reduces to ||w||_2.
double spectral_complexity(const TrainedModel& model);

struct ModelProbes {
  Task task = Task::classification;
  double test_error = 0.0;
  double mape = 0.0;
  double rmse = 0.0;
  double mse = 0.0;
  double rademacher_mean = 0.0;
  std::vector<double> rademacher_replicates;
  double kappa = 0.0;
  double pac_bayes = 0.0;
  double spectral = 0.0;
  long param_count = 0;
  long n_train = 0;
};

// Externally computed probes (schema version 1). kappa is recomputed from
// the Rademacher mean and n_train; a declared kappa that disagrees by more
// than 1e-6 is rejected.
ModelProbes import_probes(const std::string& path);

using ModelInput = std::variant<ModelSpec, ModelProbes>;

}  // namespace augsize
