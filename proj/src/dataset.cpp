#include "augsize/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

namespace {

bool parse_finite_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return false;
  if (!std::isfinite(value)) return false;
  out = value;
  return true;
}

std::string trim_copy(std::string s) {
  auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

// Largest-remainder apportionment of `take` items across groups,
// proportional to group sizes. Keeps every group within one item of its
// exact quota.
std::vector<long> apportion(const std::vector<long>& sizes, long take) {
  const long total = std::accumulate(sizes.begin(), sizes.end(), 0L);
  std::vector<long> out(sizes.size(), 0);
  if (total == 0 || take <= 0) return out;
  std::vector<std::pair<double, std::size_t>> remainders;
  long assigned = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double quota =
        static_cast<double>(sizes[g]) * static_cast<double>(take) / total;
    out[g] = static_cast<long>(std::floor(quota));
    out[g] = std::min(out[g], sizes[g]);
    assigned += out[g];
    remainders.push_back({quota - std::floor(quota), g});
  }
  std::sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (auto& [frac, g] : remainders) {
    if (assigned >= take) break;
    if (out[g] < sizes[g]) {
      ++out[g];
      ++assigned;
    }
  }
  return out;
}

}  // namespace

Dataset Dataset::slice(const std::vector<Eigen::Index>& idx) const {
  Dataset out;
  out.task = task;
  out.name = name;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
  if (task == Task::classification) {
    out.class_labels.resize(idx.size());
  } else {
    out.targets.resize(static_cast<Eigen::Index>(idx.size()));
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Eigen::Index row = idx[i];
    if (row < 0 || row >= n())
      throw Error(errc::invalid_argument, "slice index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(row);
    if (task == Task::classification)
      out.class_labels[i] = class_labels[static_cast<std::size_t>(row)];
    else
      out.targets(static_cast<Eigen::Index>(i)) = targets(row);
  }
  return out;
}

void Dataset::validate() const {
  if (n() < 1) throw Error(errc::empty_input, "dataset has no rows");
  if (!features.allFinite())
    throw Error(errc::parse_error, "dataset contains non-finite features");
  if (task == Task::classification) {
    if (class_labels.size() != static_cast<std::size_t>(n()))
      throw Error(errc::invalid_argument, "label arity mismatch");
    if (n_classes() < 2)
      throw Error(errc::invalid_argument,
                  "classification requires at least two classes");
    std::vector<long> counts(static_cast<std::size_t>(n_classes()), 0);
    for (int c : class_labels) {
      if (c < 0 || c >= n_classes())
        throw Error(errc::invalid_argument, "label code out of range");
      ++counts[static_cast<std::size_t>(c)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c] == 0)
        throw Error(errc::class_missing,
                    "class '" + class_names[c] + "' has no samples");
  } else {
    if (targets.size() != n())
      throw Error(errc::invalid_argument, "target arity mismatch");
    if (!targets.allFinite())
      throw Error(errc::parse_error, "dataset contains non-finite targets");
  }
}

Dataset concat_datasets(const Dataset& a, const Dataset& b) {
  if (a.task != b.task)
    throw Error(errc::invalid_argument, "cannot concatenate across tasks");
  if (a.dim() != b.dim())
    throw Error(errc::invalid_argument, "feature arity mismatch");
  Dataset out = a;
  out.features.conservativeResize(a.n() + b.n(), a.dim());
  out.features.bottomRows(b.n()) = b.features;
  if (a.task == Task::classification) {
    for (std::size_t i = 0; i < b.class_labels.size(); ++i) {
      const std::string& cls =
          b.class_names[static_cast<std::size_t>(b.class_labels[i])];
      auto it = std::find(out.class_names.begin(), out.class_names.end(), cls);
      if (it == out.class_names.end())
        throw Error(errc::class_missing,
                    "class '" + cls + "' absent from the base dataset");
      out.class_labels.push_back(
          static_cast<int>(it - out.class_names.begin()));
    }
  } else {
    Eigen::VectorXd merged(a.n() + b.n());
    merged << a.targets, b.targets;
    out.targets = merged;
  }
  return out;
}

Dataset load_table(const std::string& path, const TableSchema& schema) {
  std::ifstream file(path);
  if (!file.is_open())
    throw Error(errc::missing_file, "cannot open '" + path + "'");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(file, line)) {
    if (trim_copy(line).empty()) continue;
    lines.push_back(line);
  }

  std::vector<std::string> header;
  std::size_t first_row = 0;
  if (schema.has_header) {
    if (lines.empty()) throw Error(errc::empty_input, "file '" + path + "' is empty");
    header = split_line(lines[0], schema.delimiter);
    for (auto& h : header) h = trim_copy(h);
    first_row = 1;
  }
  if (lines.size() <= first_row)
    throw Error(errc::empty_input, "file '" + path + "' has no data rows");

  const std::size_t n_cols =
      schema.has_header ? header.size()
                        : split_line(lines[first_row], schema.delimiter).size();
  if (n_cols < 2)
    throw Error(errc::parse_error, "need at least one feature and one label column");

  // Resolve the label column: integer index (negative counts from the end)
  // or a header name.
  long label_col = -1;
  {
    const std::string key = trim_copy(schema.label_column);
    double numeric = 0.0;
    bool is_int = !key.empty() &&
                  key.find_first_not_of("-0123456789") == std::string::npos &&
                  parse_finite_double(key, numeric);
    if (is_int) {
      long idx = std::strtol(key.c_str(), nullptr, 10);
      if (idx < 0) idx += static_cast<long>(n_cols);
      label_col = idx;
    } else {
      auto it = std::find(header.begin(), header.end(), key);
      if (it != header.end()) label_col = it - header.begin();
    }
    if (label_col < 0 || label_col >= static_cast<long>(n_cols))
      throw Error(errc::unknown_label_column,
                  "label column '" + schema.label_column + "' not found", -1,
                  label_col);
  }

  const std::size_t n_rows = lines.size() - first_row;
  Dataset ds;
  ds.task = schema.task;
  ds.name = path;
  ds.features.resize(static_cast<Eigen::Index>(n_rows),
                     static_cast<Eigen::Index>(n_cols - 1));
  if (schema.task == Task::regression)
    ds.targets.resize(static_cast<Eigen::Index>(n_rows));

  std::map<std::string, int> code_of;
  for (std::size_t r = 0; r < n_rows; ++r) {
    auto cells = split_line(lines[first_row + r], schema.delimiter);
    if (cells.size() != n_cols)
      throw Error(errc::ragged_row,
                  "row " + std::to_string(r) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(n_cols),
                  static_cast<long>(r));
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (static_cast<long>(c) == label_col) continue;
      double value = 0.0;
      if (!parse_finite_double(cells[c], value))
        throw Error(errc::parse_error,
                    "cell '" + trim_copy(cells[c]) + "' at row " +
                        std::to_string(r) + ", column " + std::to_string(c) +
                        " is not a finite number",
                    static_cast<long>(r), static_cast<long>(c));
      ds.features(static_cast<Eigen::Index>(r), f++) = value;
    }
    const std::string label = trim_copy(cells[static_cast<std::size_t>(label_col)]);
    if (schema.task == Task::classification) {
      auto [it, inserted] =
          code_of.try_emplace(label, static_cast<int>(code_of.size()));
      if (inserted) ds.class_names.push_back(label);
      ds.class_labels.push_back(it->second);
    } else {
      double value = 0.0;
      if (!parse_finite_double(label, value))
        throw Error(errc::parse_error,
                    "label '" + label + "' at row " + std::to_string(r) +
                        " is not a finite number",
                    static_cast<long>(r), label_col);
      ds.targets(static_cast<Eigen::Index>(r)) = value;
    }
  }

  ds.validate();
  return ds;
}

void save_table(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
  for (Eigen::Index c = 0; c < ds.dim(); ++c) out << "f" << c << ",";
  out << "label\n";
  out.precision(17);
  for (Eigen::Index r = 0; r < ds.n(); ++r) {
    for (Eigen::Index c = 0; c < ds.dim(); ++c) out << ds.features(r, c) << ",";
    if (ds.task == Task::classification)
      out << ds.class_names[static_cast<std::size_t>(
          ds.class_labels[static_cast<std::size_t>(r)])];
    else
      out << ds.targets(r);
    out << "\n";
  }
}

namespace {

// Stratified pick: apportion `take` over classes, then take the first
// members of each class's shuffled index list.
std::vector<Eigen::Index> pick_stratified(const Dataset& ds,
                                          const std::vector<Eigen::Index>& pool,
                                          long take, std::uint64_t seed,
                                          std::string_view tag) {
  std::vector<std::vector<Eigen::Index>> by_class(
      static_cast<std::size_t>(ds.n_classes()));
  for (Eigen::Index i : pool)
    by_class[static_cast<std::size_t>(
                 ds.class_labels[static_cast<std::size_t>(i)])]
        .push_back(i);
  std::vector<long> sizes;
  for (auto& v : by_class) sizes.push_back(static_cast<long>(v.size()));
  std::vector<long> quota = apportion(sizes, take);
  std::vector<Eigen::Index> picked;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng = Rng::derive(seed, tag, c);
    rng.shuffle(by_class[c]);
    for (long j = 0; j < quota[c]; ++j) picked.push_back(by_class[c][j]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<Eigen::Index> pick_random(const std::vector<Eigen::Index>& pool,
                                      long take, std::uint64_t seed,
                                      std::string_view tag) {
  std::vector<Eigen::Index> shuffled = pool;
  Rng rng = Rng::derive(seed, tag);
  rng.shuffle(shuffled);
  shuffled.resize(static_cast<std::size_t>(take));
  std::sort(shuffled.begin(), shuffled.end());
  return shuffled;
}

std::vector<Eigen::Index> minus(const std::vector<Eigen::Index>& all,
                                const std::vector<Eigen::Index>& removed) {
  std::vector<Eigen::Index> out;
  std::size_t j = 0;
  for (Eigen::Index i : all) {
    while (j < removed.size() && removed[j] < i) ++j;
    if (j < removed.size() && removed[j] == i) continue;
    out.push_back(i);
  }
  return out;
}

}  // namespace

SplitDataset split(const Dataset& ds, const SplitPolicy& policy,
                   std::uint64_t seed) {
  ds.validate();
  SplitDataset out;
  out.seed = seed;

  std::vector<Eigen::Index> pool;
  if (policy.external_test.has_value()) {
    out.parent = concat_datasets(ds, *policy.external_test);
    pool.resize(static_cast<std::size_t>(ds.n()));
    std::iota(pool.begin(), pool.end(), 0);
    out.test_idx.resize(static_cast<std::size_t>(policy.external_test->n()));
    std::iota(out.test_idx.begin(), out.test_idx.end(), ds.n());
  } else {
    out.parent = ds;
    std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.n()));
    std::iota(all.begin(), all.end(), 0);
    const long want_test = round_half_up(
        static_cast<double>(ds.n()) * policy.test_fraction);
    if (want_test <= 0)
      throw Error(errc::empty_partition,
                  "test partition is empty; provide a test fraction or file");
    if (want_test >= ds.n())
      throw Error(errc::empty_partition, "test partition swallows the dataset");
    out.test_idx = ds.task == Task::classification
                       ? pick_stratified(ds, all, want_test, seed, "split.test")
                       : pick_random(all, want_test, seed, "split.test");
    pool = minus(all, out.test_idx);
  }

  if (pool.empty())
    throw Error(errc::empty_partition, "training pool is empty");

  const double ratio_total = policy.val_ratio_train + policy.val_ratio_val;
  if (!(policy.val_ratio_train > 0) || !(policy.val_ratio_val > 0))
    throw Error(errc::invalid_argument, "val ratio parts must be positive");
  const long want_train = static_cast<long>(std::floor(
      static_cast<double>(pool.size()) * policy.val_ratio_train / ratio_total));

  out.train_idx =
      out.parent.task == Task::classification
          ? pick_stratified(out.parent, pool, want_train, seed, "split.val")
          : pick_random(pool, want_train, seed, "split.val");
  out.val_idx = minus(pool, out.train_idx);

  if (out.train_idx.empty() || out.val_idx.empty() || out.test_idx.empty())
    throw Error(errc::empty_partition, "split leaves an empty partition");

  if (out.parent.task == Task::classification) {
    std::vector<long> counts(static_cast<std::size_t>(out.parent.n_classes()), 0);
    for (Eigen::Index i : out.train_idx)
      ++counts[static_cast<std::size_t>(
          out.parent.class_labels[static_cast<std::size_t>(i)])];
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0)
        throw Error(errc::class_missing, "class '" + out.parent.class_names[c] +
                                             "' absent from the train split");
      if (counts[c] < 2)
        throw Error(errc::too_few_samples,
                    "class '" + out.parent.class_names[c] +
                        "' has fewer than 2 train samples");
    }
  } else if (out.train_idx.size() < 4) {
    throw Error(errc::too_few_samples,
                "regression train split needs at least 4 samples");
  }
  return out;
}

PcaModel fit_pca(const Eigen::MatrixXd& x, int q) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw Error(errc::too_few_samples, "PCA needs at least 2 rows");
  if (q < 1 || q > std::min<Eigen::Index>(n, d))
    throw Error(errc::invalid_argument,
                "PCA dimension q=" + std::to_string(q) + " out of range");

  PcaModel model;
  model.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error(errc::numerical_failure, "eigendecomposition failed");

  const Eigen::VectorXd eigenvalues = solver.eigenvalues();  // ascending
  const double total = std::max(eigenvalues.sum(), 0.0);

  model.components.resize(q, d);
  model.explained.resize(q);
  for (int j = 0; j < q; ++j) {
    const Eigen::Index src = d - 1 - j;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // Sign convention: largest-magnitude entry positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.row(j) = v.transpose();
    const double lambda = std::max(eigenvalues(src), 0.0);
    model.explained(j) = total > 0 ? lambda / total : 0.0;
  }
  return model;
}

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean.transpose()) * components.transpose();
}

Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double lo = x.col(c).minCoeff();
    const double hi = x.col(c).maxCoeff();
    const double range = hi - lo;
    if (range > 0)
      out.col(c) = (x.col(c).array() - lo) / range;
    else
      out.col(c).setZero();
  }
  return out;
}

}  // namespace augsize
