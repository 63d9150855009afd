#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "augsize/dataset.hpp"
#include "augsize/generators.hpp"
#include "augsize/modeling.hpp"

namespace augsize {

struct SweepCell {
  long size = 0;
  bool ok = false;
  int failures = 0;
  double metric_mean = 0.0;  // accuracy or MAPE
  double metric_std = 0.0;
  double secondary_mean = 0.0;  // macro-F1 or RMSE
  double secondary_std = 0.0;
};

struct SweepCurve {
  Task task = Task::classification;
  std::vector<SweepCell> cells;  // strictly increasing sizes
  int repeats = 1;
  std::uint64_t seed = 0;

  const char* metric_name() const {
    return task == Task::classification ? "accuracy" : "mape";
  }
  const char* secondary_name() const {
    return task == Task::classification ? "macro_f1" : "rmse";
  }
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Cold-start exhaustive search: for every grid size, generate that many
// augmented samples, retrain from scratch on train + augmented, evaluate on
// the test partition; repeated with derived seeds. Size 0 (the
// no-augmentation baseline) is prepended when absent.
SweepCurve exhaustive_sweep(const SplitDataset& split, const ModelSpec& model,
                            const GeneratorSpec& generator,
                            std::vector<long> grid, int repeats,
                            std::uint64_t seed);

// Plateau rule: smallest size whose mean metric is within one standard
// deviation of the best cell's mean.
long ground_truth(const SweepCurve& curve);

// {0, Q, 2Q, ..., 7Q} with Q the reference quantile of n_train.
std::vector<long> default_grid(long n_train);

}  // namespace augsize
