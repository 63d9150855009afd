#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "augsize/error.hpp"

namespace augsize {

enum class Task { classification, regression };

inline const char* task_name(Task t) {
  return t == Task::classification ? "classification" : "regression";
}

// Tabular sensor-style dataset: a feature matrix plus one label column.
// Classification labels are contiguous codes 0..n_classes-1 in order of
// first appearance; regression labels are raw reals.
struct Dataset {
  Task task = Task::classification;
  std::string name;
  Eigen::MatrixXd features;              // n x d
  std::vector<int> class_labels;         // size n when classification
  Eigen::VectorXd targets;               // size n when regression
  std::vector<std::string> class_names;  // code -> original label text

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  Dataset slice(const std::vector<Eigen::Index>& idx) const;
  void validate() const;
};

// Appends rows of b to a. Classification labels are aligned by class name;
// a class present only in b is an error.
Dataset concat_datasets(const Dataset& a, const Dataset& b);

struct TableSchema {
  std::string label_column = "-1";  // name, or integer index (negative = from end)
  Task task = Task::classification;
  bool has_header = false;
  char delimiter = ',';
};

Dataset load_table(const std::string& path, const TableSchema& schema);
void save_table(const Dataset& ds, const std::string& path);

struct SplitPolicy {
  double test_fraction = 0.25;          // ignored when external_test is set
  std::optional<Dataset> external_test;
  // Ratio train:val applied inside the training pool.
  double val_ratio_train = 7.0;
  double val_ratio_val = 2.0;
};

struct SplitDataset {
  Dataset parent;
  std::vector<Eigen::Index> train_idx, val_idx, test_idx;
  std::uint64_t seed = 0;

  Dataset train() const { return parent.slice(train_idx); }
  Dataset val() const { return parent.slice(val_idx); }
  Dataset test() const { return parent.slice(test_idx); }
  long n_train() const { return static_cast<long>(train_idx.size()); }
};

SplitDataset split(const Dataset& ds, const SplitPolicy& policy,
                   std::uint64_t seed);

struct PcaModel {
  Eigen::VectorXd mean;        // d
  Eigen::MatrixXd components;  // q x d, rows orthonormal
  Eigen::VectorXd explained;   // q explained-variance fractions

  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;
};

// Top-q eigenvectors of the sample covariance, eigenvalues descending.
// Sign convention: the largest-magnitude entry of each component is positive.
PcaModel fit_pca(const Eigen::MatrixXd& x, int q);

// Per-column (x - min) / (max - min); constant columns map to 0.
Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& x);

}  // namespace augsize
