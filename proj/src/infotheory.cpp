#include "augsize/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

double digamma(double x) {
  if (!(x > 0))
    throw Error(errc::domain_error, "digamma requires a positive argument");
  double result = 0.0;
  // Recurrence psi(x) = psi(x+1) - 1/x until the asymptotic series applies.
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return result;
}

namespace {

constexpr double kMiFloor = -0.1;

// Deterministic tie-break jitter. The per-column stream is keyed on the
// column's content hash, so identical columns receive identical jitter and
// swapping the (X, Y) roles leaves the joint geometry untouched.
void add_jitter(Eigen::MatrixXd& m, std::uint64_t seed) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double range = m.col(c).maxCoeff() - m.col(c).minCoeff();
    if (!(range > 0)) continue;
    const double amplitude = 1e-12 * range;
    const std::uint64_t key =
        fnv1a64(m.col(c).data(), sizeof(double) * static_cast<std::size_t>(m.rows()));
    Rng rng = Rng::derive(seed, "ksg.jitter", key);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      m(r, c) += rng.uniform(-amplitude, amplitude);
  }
}

double maxnorm(const Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index j) {
  return (m.row(i) - m.row(j)).cwiseAbs().maxCoeff();
}

double finish_estimate(double psi_sum_mean, int k, Eigen::Index n) {
  return digamma(k) + digamma(static_cast<double>(n)) - psi_sum_mean;
}

MiEstimate clamp_estimate(double raw) {
  MiEstimate e;
  e.raw = raw;
  e.value = std::max(raw, kMiFloor);
  return e;
}

}  // namespace

MiEstimate ksg_mi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                  const KsgConfig& cfg) {
  const Eigen::Index n = x.rows();
  if (y.rows() != n)
    throw Error(errc::invalid_argument, "X and Y row counts differ");
  if (cfg.k < 1) throw Error(errc::invalid_argument, "k must be at least 1");
  if (n < cfg.k + 2)
    throw Error(errc::too_few_samples,
                "KSG needs at least k + 2 samples, got " + std::to_string(n));
  if (!x.allFinite() || !y.allFinite())
    throw Error(errc::domain_error, "KSG inputs must be finite");

  Eigen::MatrixXd xj = x;
  Eigen::MatrixXd yj = y;
  add_jitter(xj, cfg.jitter_seed);
  add_jitter(yj, cfg.jitter_seed);

  double psi_sum = 0.0;
  std::vector<double> joint(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> dx(static_cast<std::size_t>(n));
    std::vector<double> dy(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      dx[static_cast<std::size_t>(j)] = maxnorm(xj, i, j);
      dy[static_cast<std::size_t>(j)] = maxnorm(yj, i, j);
      joint[static_cast<std::size_t>(j)] =
          std::max(dx[static_cast<std::size_t>(j)], dy[static_cast<std::size_t>(j)]);
    }
    joint[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
    std::vector<double> order = joint;
    std::nth_element(order.begin(), order.begin() + (cfg.k - 1), order.end());
    const double eps = order[static_cast<std::size_t>(cfg.k - 1)];

    long nx = 0, ny = 0;
    if (eps > 0) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        if (dx[static_cast<std::size_t>(j)] < eps) ++nx;
        if (dy[static_cast<std::size_t>(j)] < eps) ++ny;
      }
    } else {
      // Fully coincident neighborhood: count points at distance zero.
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        if (dx[static_cast<std::size_t>(j)] <= 0) ++nx;
        if (dy[static_cast<std::size_t>(j)] <= 0) ++ny;
      }
    }
    psi_sum += digamma(static_cast<double>(nx + 1)) +
               digamma(static_cast<double>(ny + 1));
  }
  return clamp_estimate(
      finish_estimate(psi_sum / static_cast<double>(n), cfg.k, n));
}

MiEstimate ksg_mi(const Eigen::MatrixXd& x, const std::vector<int>& y,
                  const KsgConfig& cfg, WarningList* warnings) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(y.size()) != n)
    throw Error(errc::invalid_argument, "X and Y row counts differ");
  if (cfg.k < 1) throw Error(errc::invalid_argument, "k must be at least 1");
  if (n < cfg.k + 2)
    throw Error(errc::too_few_samples,
                "KSG needs at least k + 2 samples, got " + std::to_string(n));
  if (!x.allFinite())
    throw Error(errc::domain_error, "KSG inputs must be finite");

  Eigen::MatrixXd xj = x;
  add_jitter(xj, cfg.jitter_seed);

  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < n; ++i) classes[y[static_cast<std::size_t>(i)]].push_back(i);

  long skipped_small = 0;
  double psi_sum = 0.0;
  long included = 0;
  for (auto& [label, members] : classes) {
    const long m = static_cast<long>(members.size());
    if (m - 1 < cfg.k) {
      // The k-th same-label neighbor does not exist for this class.
      skipped_small += m;
      continue;
    }
    for (Eigen::Index i : members) {
      std::vector<double> same(members.size());
      for (std::size_t j = 0; j < members.size(); ++j)
        same[j] = members[j] == i ? std::numeric_limits<double>::infinity()
                                  : maxnorm(xj, i, members[j]);
      std::vector<double> order = same;
      std::nth_element(order.begin(), order.begin() + (cfg.k - 1), order.end());
      const double eps = order[static_cast<std::size_t>(cfg.k - 1)];

      long nx = 0;
      if (eps > 0) {
        for (Eigen::Index j = 0; j < n; ++j)
          if (j != i && maxnorm(xj, i, j) < eps) ++nx;
      } else {
        for (Eigen::Index j = 0; j < n; ++j)
          if (j != i && maxnorm(xj, i, j) <= 0) ++nx;
      }
      const long ny = m - 1;
      psi_sum += digamma(static_cast<double>(nx + 1)) +
                 digamma(static_cast<double>(ny + 1));
      ++included;
    }
  }
  if (included == 0)
    throw Error(errc::all_classes_excluded,
                "every class is smaller than k + 1");
  if (skipped_small > 0)
    warn(warnings, "KsgSmallClass",
         std::to_string(skipped_small) +
             " samples in classes smaller than k + 1 were excluded");
  return clamp_estimate(
      finish_estimate(psi_sum / static_cast<double>(included), cfg.k, n));
}

namespace {

template <class YView>
BootstrapResult bootstrap_impl(const Eigen::MatrixXd& x, const YView& take_y,
                               Eigen::Index n, const KsgConfig& ksg,
                               const BootstrapConfig& boot,
                               WarningList* warnings) {
  if (boot.replicates < 2)
    throw Error(errc::invalid_argument, "bootstrap needs at least 2 replicates");
  if (!(boot.percentile > 0.0) || !(boot.percentile < 100.0))
    throw Error(errc::invalid_argument, "percentile must lie in (0, 100)");
  Eigen::Index m = boot.resample_size;
  if (m <= 0)
    m = std::max<Eigen::Index>(ksg.k + 2,
                               round_half_up(0.7 * static_cast<double>(n)));
  if (m < ksg.k + 2)
    throw Error(errc::too_few_samples, "resample size below k + 2");
  if (m > n)
    throw Error(errc::invalid_argument, "resample size exceeds the sample");

  BootstrapResult result;
  result.replicates.assign(static_cast<std::size_t>(boot.replicates), 0.0);
  std::vector<WarningList> local(static_cast<std::size_t>(boot.replicates));

  parallel_for(boot.replicates, [&](std::int64_t b) {
    Rng rng = Rng::derive(boot.seed, "bootstrap", static_cast<std::uint64_t>(b));
    // Partial Fisher-Yates: the first m entries form the distinct subset.
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto j = i + static_cast<Eigen::Index>(
                             rng.uniform_int(static_cast<std::uint64_t>(n - i)));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    std::vector<Eigen::Index> idx(all.begin(), all.begin() + m);
    Eigen::MatrixXd xs(m, x.cols());
    for (Eigen::Index r = 0; r < m; ++r) xs.row(r) = x.row(idx[static_cast<std::size_t>(r)]);
    result.replicates[static_cast<std::size_t>(b)] =
        take_y(xs, idx, &local[static_cast<std::size_t>(b)]);
  });

  if (warnings)
    for (auto& w : local)
      warnings->insert(warnings->end(), w.begin(), w.end());

  result.lower_bound =
      std::max(0.0, percentile(result.replicates, boot.percentile));
  return result;
}

}  // namespace

BootstrapResult bootstrap_lower_bound(const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& y,
                                      const KsgConfig& ksg,
                                      const BootstrapConfig& boot,
                                      WarningList* warnings) {
  if (y.rows() != x.rows())
    throw Error(errc::invalid_argument, "X and Y row counts differ");
  auto estimate = [&](const Eigen::MatrixXd& xs,
                      const std::vector<Eigen::Index>& idx,
                      WarningList*) {
    Eigen::MatrixXd ys(static_cast<Eigen::Index>(idx.size()), y.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
      ys.row(static_cast<Eigen::Index>(r)) = y.row(idx[r]);
    return ksg_mi(xs, ys, ksg).value;
  };
  return bootstrap_impl(x, estimate, x.rows(), ksg, boot, warnings);
}

BootstrapResult bootstrap_lower_bound(const Eigen::MatrixXd& x,
                                      const std::vector<int>& y,
                                      const KsgConfig& ksg,
                                      const BootstrapConfig& boot,
                                      WarningList* warnings) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw Error(errc::invalid_argument, "X and Y row counts differ");
  auto estimate = [&](const Eigen::MatrixXd& xs,
                      const std::vector<Eigen::Index>& idx, WarningList* w) {
    std::vector<int> ys(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      ys[r] = y[static_cast<std::size_t>(idx[r])];
    return ksg_mi(xs, ys, ksg, w).value;
  };
  return bootstrap_impl(x, estimate, x.rows(), ksg, boot, warnings);
}

double discrete_entropy(const std::vector<int>& labels) {
  if (labels.empty()) throw Error(errc::empty_input, "no labels");
  std::map<int, long> counts;
  for (int c : labels) ++counts[c];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (auto& [c, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h;
}

std::vector<int> quantile_bins(const Eigen::VectorXd& values, int bins) {
  if (bins < 2) throw Error(errc::invalid_argument, "need at least 2 bins");
  if (values.size() == 0) throw Error(errc::empty_input, "no values to bin");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b)
    edges.push_back(percentile(sorted, 100.0 * b / bins));
  std::vector<int> codes(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    int code = 0;
    for (double e : edges)
      if (values(i) > e) ++code;
    codes[static_cast<std::size_t>(i)] = code;
  }
  return codes;
}

namespace {

// Reduce to q PCA dims and min-max normalize; the projection basis comes
// from `fit_on`, the normalization range from the pooled projections.
struct Reduction {
  Eigen::MatrixXd real;
  Eigen::MatrixXd generated;  // empty when not supplied
};

Reduction reduce_for_rho(const Eigen::MatrixXd& xr, const Eigen::MatrixXd* xg,
                         int pca_dims) {
  const int q = static_cast<int>(std::min<Eigen::Index>(
      {static_cast<Eigen::Index>(pca_dims), xr.cols(), xr.rows()}));
  PcaModel pca = fit_pca(xr, std::max(q, 1));
  Eigen::MatrixXd pr = pca.project(xr);
  Reduction out;
  if (xg == nullptr) {
    out.real = minmax_normalize(pr);
    return out;
  }
  Eigen::MatrixXd pg = pca.project(*xg);
  Eigen::MatrixXd stacked(pr.rows() + pg.rows(), pr.cols());
  stacked << pr, pg;
  stacked = minmax_normalize(stacked);
  out.real = stacked.topRows(pr.rows());
  out.generated = stacked.bottomRows(pg.rows());
  return out;
}

std::vector<int> labels_for_rho(const Dataset& ds, int bins) {
  if (ds.task == Task::classification) return ds.class_labels;
  return quantile_bins(ds.targets, bins);
}

std::vector<int> aug_labels_for_rho(const Dataset& real, const AugmentedSet& aug,
                                    int bins) {
  if (aug.task == Task::classification) return aug.class_labels;
  // Bin generated targets with edges fitted on the real targets so the
  // conditioning bands agree across the pair.
  std::vector<double> sorted(real.targets.data(),
                             real.targets.data() + real.targets.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b)
    edges.push_back(percentile(sorted, 100.0 * b / bins));
  std::vector<int> codes(static_cast<std::size_t>(aug.targets.size()));
  for (Eigen::Index i = 0; i < aug.targets.size(); ++i) {
    int code = 0;
    for (double e : edges)
      if (aug.targets(i) > e) ++code;
    codes[static_cast<std::size_t>(i)] = code;
  }
  return codes;
}

}  // namespace

double conditional_entropy_binned(const Eigen::MatrixXd& x,
                                  const std::vector<int>& y,
                                  const RhoConfig& cfg, WarningList* warnings) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw Error(errc::invalid_argument, "X and Y row counts differ");
  if (x.rows() < 2) throw Error(errc::too_few_samples, "need at least 2 rows");
  if (cfg.bins < 2) throw Error(errc::invalid_argument, "bins must be >= 2");

  Reduction red = reduce_for_rho(x, nullptr, cfg.pca_dims);
  const Eigen::MatrixXd& p = red.real;

  // Quantile edges per reduced dimension, fitted on the pooled sample.
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    std::vector<double> sorted(p.col(c).data(), p.col(c).data() + p.rows());
    std::sort(sorted.begin(), sorted.end());
    for (int b = 1; b < cfg.bins; ++b)
      edges[static_cast<std::size_t>(c)].push_back(
          percentile(sorted, 100.0 * b / cfg.bins));
  }
  auto cell_of = [&](Eigen::Index row) {
    std::vector<int> cell(static_cast<std::size_t>(p.cols()));
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      int code = 0;
      for (double e : edges[static_cast<std::size_t>(c)])
        if (p(row, c) > e) ++code;
      cell[static_cast<std::size_t>(c)] = code;
    }
    return cell;
  };

  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    classes[y[static_cast<std::size_t>(i)]].push_back(i);

  double h = 0.0;
  const double n = static_cast<double>(p.rows());
  for (auto& [label, members] : classes) {
    if (members.size() == 1) {
      warn(warnings, "SingletonClassEntropy",
           "class " + std::to_string(label) +
               " has a single sample; contributes zero entropy");
      continue;
    }
    std::map<std::vector<int>, long> hist;
    for (Eigen::Index i : members) ++hist[cell_of(i)];
    const double nc = static_cast<double>(members.size());
    double hc = 0.0;
    for (auto& [cell, count] : hist) {
      const double pr = static_cast<double>(count) / nc;
      hc -= pr * std::log(pr);
    }
    h += nc / n * hc;
  }
  return h;
}

double conditional_mi(const Dataset& real, const AugmentedSet& aug,
                      const RhoConfig& cfg, const KsgConfig& ksg,
                      WarningList* warnings) {
  if (real.task != aug.task)
    throw Error(errc::invalid_argument, "real/generated task mismatch");
  if (aug.n() == 0)
    throw Error(errc::empty_input, "no generated samples to compare");
  if (real.dim() != aug.features.cols())
    throw Error(errc::invalid_argument, "feature arity mismatch");

  Reduction red = reduce_for_rho(real.features, &aug.features, cfg.pca_dims);
  const std::vector<int> yr = labels_for_rho(real, cfg.bins);
  const std::vector<int> yg = aug_labels_for_rho(real, aug, cfg.bins);

  // Pair every generated row with a real row sharing its label.
  Pairing mode = cfg.pairing;
  if (mode == Pairing::source_paired) {
    bool all_sourced = !aug.source_index.empty();
    for (long s : aug.source_index)
      if (s < 0) all_sourced = false;
    if (!all_sourced) {
      warn(warnings, "PairingFallback",
           "generated rows carry no source indices; using random same-class pairing");
      mode = Pairing::random_same_class;
    }
  }

  std::map<int, std::vector<Eigen::Index>> real_by_class;
  for (Eigen::Index i = 0; i < red.real.rows(); ++i)
    real_by_class[yr[static_cast<std::size_t>(i)]].push_back(i);

  std::vector<Eigen::Index> partner(static_cast<std::size_t>(aug.n()), -1);
  for (Eigen::Index g = 0; g < aug.n(); ++g) {
    const int label = yg[static_cast<std::size_t>(g)];
    if (mode == Pairing::source_paired) {
      const long src = aug.source_index[static_cast<std::size_t>(g)];
      if (src < 0 || src >= real.n())
        throw Error(errc::invalid_argument, "source index out of range");
      if (yr[static_cast<std::size_t>(src)] != label)
        throw Error(errc::invalid_argument,
                    "paired rows disagree on the conditioning label");
      partner[static_cast<std::size_t>(g)] = static_cast<Eigen::Index>(src);
    } else {
      auto it = real_by_class.find(label);
      if (it == real_by_class.end()) continue;  // no real mass in this band
      Rng rng = Rng::derive(cfg.pairing_seed, "rho.pairing",
                            static_cast<std::uint64_t>(g));
      partner[static_cast<std::size_t>(g)] =
          it->second[rng.uniform_int(it->second.size())];
    }
  }

  std::map<int, std::vector<Eigen::Index>> gen_by_class;
  for (Eigen::Index g = 0; g < aug.n(); ++g)
    if (partner[static_cast<std::size_t>(g)] >= 0)
      gen_by_class[yg[static_cast<std::size_t>(g)]].push_back(g);

  double weighted = 0.0;
  long total = 0;
  for (auto& [label, members] : gen_by_class) {
    const long count = static_cast<long>(members.size());
    if (count < ksg.k + 2) {
      warn(warnings, "ConditionalMiSmallClass",
           "class " + std::to_string(label) + " has " + std::to_string(count) +
               " pairs (< k + 2); excluded");
      continue;
    }
    Eigen::MatrixXd xr(count, red.real.cols());
    Eigen::MatrixXd xg(count, red.real.cols());
    for (long r = 0; r < count; ++r) {
      const Eigen::Index g = members[static_cast<std::size_t>(r)];
      xr.row(r) = red.real.row(partner[static_cast<std::size_t>(g)]);
      xg.row(r) = red.generated.row(g);
    }
    weighted += static_cast<double>(count) * ksg_mi(xr, xg, ksg).value;
    total += count;
  }
  if (total == 0)
    throw Error(errc::all_classes_excluded,
                "no class has enough pairs for the conditional MI");
  return weighted / static_cast<double>(total);
}

double rho_formula(double cond_mi, double cond_entropy, double xi,
                   double epsilon, double rho_min) {
  const double raw = 1.0 - xi * cond_mi / (cond_entropy + epsilon);
  return std::clamp(raw, rho_min, 1.0);
}

RhoResult info_contribution_ratio(const Dataset& real, const AugmentedSet& aug,
                                  const GeneratorSpec& gen, const RhoConfig& cfg,
                                  const KsgConfig& ksg, WarningList* warnings) {
  RhoResult out;
  auto [k_params, xi] = generator_complexity(gen, cfg.tau);
  out.param_count = k_params;
  out.xi = xi;
  out.cond_mi = conditional_mi(real, aug, cfg, ksg, warnings);
  out.cond_entropy = conditional_entropy_binned(
      real.features, labels_for_rho(real, cfg.bins), cfg, warnings);
  out.raw = 1.0 - xi * out.cond_mi / (out.cond_entropy + cfg.epsilon);
  out.rho = std::clamp(out.raw, cfg.rho_min, 1.0);
  return out;
}

}  // namespace augsize
