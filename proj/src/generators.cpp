#include "augsize/generators.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

const char* generator_kind_name(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::jitter: return "jitter";
    case GeneratorKind::scale: return "scale";
    case GeneratorKind::warp: return "warp";
    case GeneratorKind::interpolate: return "interpolate";
    case GeneratorKind::class_gaussian: return "class-gaussian";
    case GeneratorKind::class_kde: return "class-kde";
    case GeneratorKind::external: return "external";
  }
  return "unknown";
}

GeneratorKind generator_kind_from(const std::string& name) {
  if (name == "jitter") return GeneratorKind::jitter;
  if (name == "scale") return GeneratorKind::scale;
  if (name == "warp") return GeneratorKind::warp;
  if (name == "interpolate") return GeneratorKind::interpolate;
  if (name == "class-gaussian") return GeneratorKind::class_gaussian;
  if (name == "class-kde") return GeneratorKind::class_kde;
  if (name == "external") return GeneratorKind::external;
  throw Error(errc::invalid_argument, "unknown generator kind '" + name + "'");
}

namespace detail {

Eigen::VectorXd mix_rows(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         double u) {
  return (1.0 - u) * a + u * b;
}

}  // namespace detail

namespace {

long transform_knob_count(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::jitter: return 1;   // sigma
    case GeneratorKind::scale: return 1;    // scale span
    case GeneratorKind::warp: return 2;     // strength, knots
    case GeneratorKind::interpolate:
      return spec.has_param("weight") ? 1 : 0;
    default: return -1;
  }
}

void validate_transform_params(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::jitter:
      if (spec.param("sigma", 0.1) < 0)
        throw Error(errc::invalid_argument, "jitter sigma must be >= 0");
      break;
    case GeneratorKind::scale: {
      const double s = spec.param("scale", 0.1);
      if (s < 0 || s >= 1)
        throw Error(errc::invalid_argument, "scale span must lie in [0, 1)");
      break;
    }
    case GeneratorKind::warp:
      if (spec.param("strength", 0.2) < 0)
        throw Error(errc::invalid_argument, "warp strength must be >= 0");
      if (spec.param("knots", 4) < 2)
        throw Error(errc::invalid_argument, "warp needs at least 2 knots");
      break;
    case GeneratorKind::interpolate:
      if (spec.has_param("weight")) {
        const double w = spec.param("weight", 0.5);
        if (!(w > 0) || !(w < 1))
          throw Error(errc::invalid_argument,
                      "interpolation weight must lie in (0, 1)");
      }
      break;
    default:
      throw Error(errc::invalid_argument,
                  std::string("'") + generator_kind_name(spec.kind) +
                      "' is not a transform strategy");
  }
}

Eigen::VectorXd column_stds(const Eigen::MatrixXd& x) {
  Eigen::VectorXd mean = x.colwise().mean();
  Eigen::VectorXd var =
      (x.rowwise() - mean.transpose()).array().square().colwise().sum() /
      static_cast<double>(x.rows());
  return var.cwiseSqrt();
}

// Smooth monotone index remap of the feature vector treated as an ordered
// channel sequence: piecewise-linear speeds at the knots, integrated and
// rescaled so the endpoints stay fixed.
Eigen::VectorXd warp_row(const Eigen::VectorXd& row, double strength,
                         int knots, Rng& rng) {
  const Eigen::Index d = row.size();
  if (d < 2 || strength <= 0) return row;
  std::vector<double> speed(static_cast<std::size_t>(knots));
  for (auto& s : speed) s = std::max(0.1, 1.0 + strength * rng.normal());

  auto speed_at = [&](double t) {
    const double pos = t * (knots - 1);
    const int lo = std::min(knots - 2, static_cast<int>(std::floor(pos)));
    const double frac = pos - lo;
    return speed[static_cast<std::size_t>(lo)] * (1 - frac) +
           speed[static_cast<std::size_t>(lo + 1)] * frac;
  };

  std::vector<double> cum(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index i = 1; i < d; ++i) {
    const double t = (static_cast<double>(i) - 0.5) / (d - 1);
    cum[static_cast<std::size_t>(i)] =
        cum[static_cast<std::size_t>(i - 1)] + speed_at(t);
  }
  const double total = cum.back();
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double pos = cum[static_cast<std::size_t>(i)] / total * (d - 1);
    const Eigen::Index lo = std::min<Eigen::Index>(d - 2, static_cast<Eigen::Index>(pos));
    const double frac = pos - static_cast<double>(lo);
    out(i) = row(lo) * (1 - frac) + row(lo + 1) * frac;
  }
  return out;
}

}  // namespace

AugmentedSet transform_augment(const Dataset& train, const GeneratorSpec& spec,
                               long n) {
  if (n < 0) throw Error(errc::invalid_argument, "negative sample count");
  if (n > 0 && train.n() == 0)
    throw Error(errc::empty_input, "cannot augment an empty training set");
  validate_transform_params(spec);

  AugmentedSet out;
  out.task = train.task;
  out.spec = spec;
  out.spec.param_count = transform_knob_count(spec);
  out.features.resize(n, train.dim());
  out.source_index.assign(static_cast<std::size_t>(n), -1);
  if (train.task == Task::classification)
    out.class_labels.assign(static_cast<std::size_t>(n), 0);
  else
    out.targets.resize(n);
  if (n == 0) return out;

  const Eigen::VectorXd stds = column_stds(train.features);

  std::map<int, std::vector<Eigen::Index>> by_class;
  if (train.task == Task::classification)
    for (Eigen::Index i = 0; i < train.n(); ++i)
      by_class[train.class_labels[static_cast<std::size_t>(i)]].push_back(i);

  parallel_for(n, [&](std::int64_t row) {
    Rng rng = Rng::derive(spec.seed, "generate", static_cast<std::uint64_t>(row));
    const Eigen::Index src = static_cast<Eigen::Index>(
        rng.uniform_int(static_cast<std::uint64_t>(train.n())));
    out.source_index[static_cast<std::size_t>(row)] = static_cast<long>(src);
    Eigen::VectorXd x = train.features.row(src);
    double target = train.task == Task::regression ? train.targets(src) : 0.0;

    switch (spec.kind) {
      case GeneratorKind::jitter: {
        const double sigma = spec.param("sigma", 0.1);
        for (Eigen::Index c = 0; c < x.size(); ++c)
          x(c) += sigma * stds(c) * rng.normal();
        break;
      }
      case GeneratorKind::scale: {
        const double span = spec.param("scale", 0.1);
        x *= rng.uniform(1.0 - span, 1.0 + span);
        break;
      }
      case GeneratorKind::warp: {
        x = warp_row(x, spec.param("strength", 0.2),
                     static_cast<int>(spec.param("knots", 4)), rng);
        break;
      }
      case GeneratorKind::interpolate: {
        Eigen::Index other = src;
        if (train.task == Task::classification) {
          const auto& peers =
              by_class.at(train.class_labels[static_cast<std::size_t>(src)]);
          if (peers.size() > 1) {
            do {
              other = peers[rng.uniform_int(peers.size())];
            } while (other == src);
          }
        } else if (train.n() > 1) {
          do {
            other = static_cast<Eigen::Index>(
                rng.uniform_int(static_cast<std::uint64_t>(train.n())));
          } while (other == src);
        }
        double u = spec.has_param("weight") ? spec.param("weight", 0.5)
                                            : rng.uniform();
        if (u <= 0.0) u = 0.5;
        x = detail::mix_rows(train.features.row(src), train.features.row(other), u);
        if (train.task == Task::regression)
          target = (1.0 - u) * train.targets(src) + u * train.targets(other);
        break;
      }
      default:
        break;  // unreachable; validated above
    }

    out.features.row(row) = x;
    if (train.task == Task::classification)
      out.class_labels[static_cast<std::size_t>(row)] =
          train.class_labels[static_cast<std::size_t>(src)];
    else
      out.targets(row) = target;
  });
  return out;
}

AugmentedSet surrogate_sample(const Dataset& train, const GeneratorSpec& spec,
                              long n_per_class) {
  if (train.task != Task::classification)
    throw Error(errc::invalid_argument,
                "class-conditional samplers need a classification task");
  if (n_per_class < 0) throw Error(errc::invalid_argument, "negative count");
  if (spec.kind != GeneratorKind::class_gaussian &&
      spec.kind != GeneratorKind::class_kde)
    throw Error(errc::invalid_argument,
                std::string("'") + generator_kind_name(spec.kind) +
                    "' is not a class-conditional sampler");

  const Eigen::Index d = train.dim();
  const int n_classes = train.n_classes();
  std::map<int, std::vector<Eigen::Index>> by_class;
  for (Eigen::Index i = 0; i < train.n(); ++i)
    by_class[train.class_labels[static_cast<std::size_t>(i)]].push_back(i);
  for (auto& [c, members] : by_class)
    if (members.size() < 2)
      throw Error(errc::too_few_samples,
                  "class " + train.class_names[static_cast<std::size_t>(c)] +
                      " needs at least 2 samples");

  struct ClassModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd chol;       // class-gaussian
    Eigen::VectorXd bandwidth;  // class-kde
    std::vector<Eigen::Index> members;
  };
  std::vector<ClassModel> models(static_cast<std::size_t>(n_classes));
  constexpr double kRidge = 1e-6;
  for (auto& [c, members] : by_class) {
    ClassModel& m = models[static_cast<std::size_t>(c)];
    m.members = members;
    Eigen::MatrixXd xc(static_cast<Eigen::Index>(members.size()), d);
    for (std::size_t r = 0; r < members.size(); ++r)
      xc.row(static_cast<Eigen::Index>(r)) = train.features.row(members[r]);
    m.mean = xc.colwise().mean();
    Eigen::MatrixXd centered = xc.rowwise() - m.mean.transpose();
    if (spec.kind == GeneratorKind::class_gaussian) {
      Eigen::MatrixXd cov = centered.transpose() * centered /
                            static_cast<double>(members.size() - 1);
      cov.diagonal().array() += kRidge;
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success)
        throw Error(errc::numerical_failure,
                    "singular class covariance for class " +
                        train.class_names[static_cast<std::size_t>(c)]);
      m.chol = llt.matrixL();
    } else {
      // Silverman's rule per dimension.
      const double nc = static_cast<double>(members.size());
      Eigen::VectorXd sd =
          (centered.array().square().colwise().sum() / nc).sqrt();
      const double factor = std::pow(
          4.0 / ((static_cast<double>(d) + 2.0) * nc), 1.0 / (static_cast<double>(d) + 4.0));
      m.bandwidth = sd * factor;
    }
  }

  const long total = n_per_class * n_classes;
  AugmentedSet out;
  out.task = Task::classification;
  out.spec = spec;
  // Parameter count of the fitted sampler.
  if (spec.kind == GeneratorKind::class_gaussian)
    out.spec.param_count =
        static_cast<long>(n_classes) * (d + d * (d + 1) / 2);
  else
    out.spec.param_count = static_cast<long>(train.n()) * d + d;
  out.features.resize(total, d);
  out.class_labels.assign(static_cast<std::size_t>(total), 0);
  out.source_index.assign(static_cast<std::size_t>(total), -1);
  if (total == 0) return out;

  parallel_for(total, [&](std::int64_t row) {
    Rng rng = Rng::derive(spec.seed, "surrogate", static_cast<std::uint64_t>(row));
    const int c = static_cast<int>(row / n_per_class);
    const ClassModel& m = models[static_cast<std::size_t>(c)];
    Eigen::VectorXd x(d);
    if (spec.kind == GeneratorKind::class_gaussian) {
      Eigen::VectorXd z(d);
      for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
      x = m.mean + m.chol * z;
    } else {
      const Eigen::Index pick = m.members[rng.uniform_int(m.members.size())];
      x = train.features.row(pick);
      for (Eigen::Index j = 0; j < d; ++j) x(j) += m.bandwidth(j) * rng.normal();
    }
    out.features.row(row) = x;
    out.class_labels[static_cast<std::size_t>(row)] = c;
  });
  return out;
}

AugmentedSet generate(const Dataset& train, const GeneratorSpec& spec, long n) {
  switch (spec.kind) {
    case GeneratorKind::jitter:
    case GeneratorKind::scale:
    case GeneratorKind::warp:
    case GeneratorKind::interpolate:
      return transform_augment(train, spec, n);
    case GeneratorKind::class_gaussian:
    case GeneratorKind::class_kde: {
      const int classes = std::max(train.n_classes(), 1);
      const long per_class = (n + classes - 1) / classes;
      AugmentedSet full = surrogate_sample(train, spec, per_class);
      if (full.n() == n) return full;
      // Trim round-robin so every class keeps a near-equal share.
      AugmentedSet out = full;
      out.features.resize(n, train.dim());
      out.class_labels.assign(static_cast<std::size_t>(n), 0);
      out.source_index.assign(static_cast<std::size_t>(n), -1);
      long written = 0;
      for (long r = 0; r < per_class && written < n; ++r)
        for (int c = 0; c < classes && written < n; ++c) {
          const long src = static_cast<long>(c) * per_class + r;
          out.features.row(written) = full.features.row(src);
          out.class_labels[static_cast<std::size_t>(written)] =
              full.class_labels[static_cast<std::size_t>(src)];
          ++written;
        }
      return out;
    }
    case GeneratorKind::external:
      throw Error(errc::invalid_argument,
                  "external generators are imported from CSV, not sampled");
  }
  throw Error(errc::invalid_argument, "unknown generator kind");
}

std::pair<long, double> generator_complexity(const GeneratorSpec& spec,
                                             double tau) {
  if (!(tau > 0)) throw Error(errc::invalid_argument, "tau must be positive");
  long k = spec.param_count;
  if (k < 0) {
    k = transform_knob_count(spec);
    if (k < 0)
      throw Error(errc::invalid_argument,
                  std::string("parameter count of '") +
                      generator_kind_name(spec.kind) +
                      "' is unresolved; generate or declare it first");
  }
  const double xi = std::exp(-static_cast<double>(k) / tau);
  return {k, xi};
}

void export_augmented_csv(const AugmentedSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
  for (Eigen::Index c = 0; c < set.features.cols(); ++c) out << "f" << c << ",";
  out << "label,source_index\n";
  out.precision(17);
  for (Eigen::Index r = 0; r < set.n(); ++r) {
    for (Eigen::Index c = 0; c < set.features.cols(); ++c)
      out << set.features(r, c) << ",";
    if (set.task == Task::classification)
      out << set.class_labels[static_cast<std::size_t>(r)];
    else
      out << set.targets(r);
    out << "," << set.source_index[static_cast<std::size_t>(r)] << "\n";
  }
}

AugmentedSet import_augmented_csv(const std::string& path,
                                  const Dataset& reference, long declared_k,
                                  bool has_header) {
  std::ifstream file(path);
  if (!file.is_open())
    throw Error(errc::missing_file, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = -1;
  bool skipped_header = !has_header;
  const Eigen::Index d = reference.dim();
  while (std::getline(file, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || !std::isfinite(v))
        throw Error(errc::parse_error,
                    "cell '" + cell + "' at row " + std::to_string(lineno),
                    lineno);
      cells.push_back(v);
    }
    // Feature columns plus label, with an optional trailing source index.
    if (static_cast<Eigen::Index>(cells.size()) != d + 1 &&
        static_cast<Eigen::Index>(cells.size()) != d + 2)
      throw Error(errc::ragged_row,
                  "row " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells",
                  lineno);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw Error(errc::empty_input, "'" + path + "' has no rows");

  AugmentedSet out;
  out.task = reference.task;
  out.spec.kind = GeneratorKind::external;
  out.spec.param_count = declared_k;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  out.source_index.assign(rows.size(), -1);
  if (reference.task == Task::classification)
    out.class_labels.assign(rows.size(), 0);
  else
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c)
      out.features(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    const double label = rows[r][static_cast<std::size_t>(d)];
    if (reference.task == Task::classification) {
      const int code = static_cast<int>(label);
      if (code < 0 || code >= reference.n_classes() ||
          static_cast<double>(code) != label)
        throw Error(errc::class_missing,
                    "label " + std::to_string(label) + " at row " +
                        std::to_string(r) + " is not a known class code");
      out.class_labels[r] = code;
    } else {
      out.targets(static_cast<Eigen::Index>(r)) = label;
    }
    if (rows[r].size() == static_cast<std::size_t>(d) + 2) {
      const long src = static_cast<long>(rows[r].back());
      if (src >= reference.n())
        throw Error(errc::invalid_argument,
                    "source index " + std::to_string(src) + " out of range");
      out.source_index[r] = src < 0 ? -1 : src;
    }
  }
  return out;
}

}  // namespace augsize
