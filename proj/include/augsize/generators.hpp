#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "augsize/dataset.hpp"

namespace augsize {

enum class GeneratorKind {
  jitter,
  scale,
  warp,
  interpolate,
  class_gaussian,
  class_kde,
  external,
};

const char* generator_kind_name(GeneratorKind k);
GeneratorKind generator_kind_from(const std::string& name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::jitter;
  std::map<std::string, double> params;
  // Parameter count of the generator. -1 means "not yet resolved"; fitted
  // kinds fill it in at generation time, external data must declare it.
  long param_count = -1;
  std::uint64_t seed = 0;

  static GeneratorSpec make(GeneratorKind kind,
                            std::map<std::string, double> params,
                            std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = kind;
    s.params = std::move(params);
    s.seed = seed;
    return s;
  }

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  bool has_param(const std::string& key) const { return params.count(key) > 0; }
};

struct AugmentedSet {
  Task task = Task::classification;
  Eigen::MatrixXd features;       // n x d
  std::vector<int> class_labels;  // classification
  Eigen::VectorXd targets;        // regression
  // Row index into the source dataset each row was derived from, or -1 for
  // sampled rows with no single source.
  std::vector<long> source_index;
  GeneratorSpec spec;  // echo with resolved param_count

  Eigen::Index n() const { return features.rows(); }
};

// Non-extended strategies: every generated row is a perturbation or mix of
// existing rows and carries a source index.
AugmentedSet transform_augment(const Dataset& train, const GeneratorSpec& spec,
                               long n);

// Extended-augmentation stand-in: class-conditional samplers fitted on the
// training set (classification only).
AugmentedSet surrogate_sample(const Dataset& train, const GeneratorSpec& spec,
                              long n_per_class);

// Dispatch on kind; n is the total number of generated rows.
AugmentedSet generate(const Dataset& train, const GeneratorSpec& spec, long n);

// (param count K, complexity factor xi = exp(-K / tau)).
std::pair<long, double> generator_complexity(const GeneratorSpec& spec,
                                             double tau);

// CSV round trip; columns are features..., label, source_index.
void export_augmented_csv(const AugmentedSet& set, const std::string& path);
AugmentedSet import_augmented_csv(const std::string& path,
                                  const Dataset& reference, long declared_k,
                                  bool has_header = true);

namespace detail {
// Convex mix (1-u)*a + u*b, exposed for the interpolation strategy.
Eigen::VectorXd mix_rows(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         double u);
}  // namespace detail

}  // namespace augsize
