#include "augsize/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "augsize/icd.hpp"
#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

nlohmann::ordered_json SweepCurve::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task_name(task);
  j["metric"] = metric_name();
  j["secondary_metric"] = secondary_name();
  j["repeats"] = repeats;
  nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
  for (const SweepCell& c : cells) {
    cells_json.push_back({{"size", c.size},
                          {"ok", c.ok},
                          {"failures", c.failures},
                          {"mean", c.metric_mean},
                          {"std", c.metric_std},
                          {"secondary_mean", c.secondary_mean},
                          {"secondary_std", c.secondary_std}});
  }
  j["cells"] = cells_json;
  j["seed"] = seed;
  return j;
}

std::string SweepCurve::to_csv() const {
  std::ostringstream out;
  out << "size," << metric_name() << "_mean," << metric_name() << "_std\n";
  out.precision(12);
  for (const SweepCell& c : cells) {
    if (!c.ok) continue;
    out << c.size << "," << c.metric_mean << "," << c.metric_std << "\n";
  }
  return out.str();
}

std::vector<long> default_grid(long n_train) {
  const long q = reference_quantile(n_train);
  std::vector<long> grid;
  for (long k = 0; k <= 7; ++k) grid.push_back(k * q);
  return grid;
}

SweepCurve exhaustive_sweep(const SplitDataset& split, const ModelSpec& model,
                            const GeneratorSpec& generator,
                            std::vector<long> grid, int repeats,
                            std::uint64_t seed) {
  if (grid.empty()) throw Error(errc::invalid_argument, "empty sweep grid");
  for (long s : grid)
    if (s < 0) throw Error(errc::invalid_argument, "negative sweep size");
  if (repeats < 1) throw Error(errc::invalid_argument, "repeats must be >= 1");

  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  // The no-augmentation baseline anchors the curve.
  if (grid.front() != 0) grid.insert(grid.begin(), 0);

  const Dataset train = split.train();
  const Dataset val = split.val();
  const Dataset test = split.test();

  SweepCurve curve;
  curve.task = split.parent.task;
  curve.repeats = repeats;
  curve.seed = seed;
  curve.cells.resize(grid.size());

  const long n_cells = static_cast<long>(grid.size());
  std::vector<std::vector<double>> primary(grid.size());
  std::vector<std::vector<double>> secondary(grid.size());
  std::vector<int> failures(grid.size(), 0);
  for (auto& v : primary) v.assign(static_cast<std::size_t>(repeats), 0.0);
  for (auto& v : secondary) v.assign(static_cast<std::size_t>(repeats), 0.0);
  std::vector<char> failed_flag(grid.size() * static_cast<std::size_t>(repeats), 0);

  parallel_for(n_cells * repeats, [&](std::int64_t job) {
    const std::size_t cell = static_cast<std::size_t>(job / repeats);
    const int rep = static_cast<int>(job % repeats);
    const long size = grid[cell];
    try {
      GeneratorSpec gen = generator;
      gen.seed = derive_seed(seed, "sweep.gen", static_cast<std::uint64_t>(job));
      Dataset combined = train;
      if (size > 0) {
        AugmentedSet aug = generate(train, gen, size);
        combined.features.conservativeResize(train.n() + aug.n(), train.dim());
        combined.features.bottomRows(aug.n()) = aug.features;
        if (train.task == Task::classification) {
          combined.class_labels.insert(combined.class_labels.end(),
                                       aug.class_labels.begin(),
                                       aug.class_labels.end());
        } else {
          Eigen::VectorXd merged(train.n() + aug.n());
          merged << train.targets, aug.targets;
          combined.targets = merged;
        }
      }
      // Cold start: a fresh model per cell so performance deltas are
      // attributable to the augmented data alone.
      TrainedModel m = fit(model, combined, val,
                           derive_seed(seed, "sweep.fit", static_cast<std::uint64_t>(job)));
      const Metrics metrics = test_error(m, test);
      if (train.task == Task::classification) {
        primary[cell][static_cast<std::size_t>(rep)] = metrics.accuracy;
        secondary[cell][static_cast<std::size_t>(rep)] = metrics.macro_f1;
      } else {
        primary[cell][static_cast<std::size_t>(rep)] = metrics.mape;
        secondary[cell][static_cast<std::size_t>(rep)] = metrics.rmse;
      }
    } catch (const Error&) {
      failed_flag[cell * static_cast<std::size_t>(repeats) +
                  static_cast<std::size_t>(rep)] = 1;
    }
  });

  long ok_cells = 0;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    SweepCell& c = curve.cells[cell];
    c.size = grid[cell];
    for (int rep = 0; rep < repeats; ++rep)
      if (failed_flag[cell * static_cast<std::size_t>(repeats) +
                      static_cast<std::size_t>(rep)])
        ++c.failures;
    c.ok = c.failures == 0;
    if (c.ok) {
      c.metric_mean = mean_of(primary[cell]);
      c.metric_std = stddev_pop(primary[cell]);
      c.secondary_mean = mean_of(secondary[cell]);
      c.secondary_std = stddev_pop(secondary[cell]);
      ++ok_cells;
    }
  }
  if (ok_cells * 2 < static_cast<long>(grid.size()))
    throw Error(errc::numerical_failure,
                "more than half of the sweep cells failed to train");
  return curve;
}

long ground_truth(const SweepCurve& curve) {
  const SweepCell* best = nullptr;
  for (const SweepCell& c : curve.cells) {
    if (!c.ok) continue;
    if (best == nullptr) {
      best = &c;
      continue;
    }
    if (curve.task == Task::classification ? c.metric_mean > best->metric_mean
                                           : c.metric_mean < best->metric_mean)
      best = &c;
  }
  if (best == nullptr)
    throw Error(errc::numerical_failure, "every sweep cell failed");

  // Plateau rule: the smallest size within one standard deviation of the
  // best cell's mean.
  for (const SweepCell& c : curve.cells) {
    if (!c.ok) continue;
    if (curve.task == Task::classification) {
      if (c.metric_mean >= best->metric_mean - best->metric_std) return c.size;
    } else {
      if (c.metric_mean <= best->metric_mean + best->metric_std) return c.size;
    }
  }
  return best->size;
}

}  // namespace augsize
