#include "augsize/itle.hpp"

#include <algorithm>
#include <cmath>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

double fano_floor(double h_y, double i_lb, int n_classes, WarningList* warnings) {
  if (n_classes < 2)
    throw Error(errc::invalid_argument, "Fano floor needs at least 2 classes");
  const double numerator = h_y - i_lb - 1.0;
  if (n_classes == 2) {
    // ln(|Y| - 1) = 0; fall back to the most conservative floor.
    warn(warnings, "BinaryFanoDegenerate",
         "binary task degenerates the Fano denominator; floor forced to the "
         "conservative value");
    return numerator > 0 ? 1.0 : 0.0;
  }
  const double raw = numerator / std::log(static_cast<double>(n_classes - 1));
  return std::clamp(raw, 0.0, 1.0);
}

double invert_generalization_bound(double kappa, const BoundConfig& cfg) {
  if (kappa < 0) throw Error(errc::invalid_argument, "kappa must be >= 0");
  if (!(cfg.gamma > 0)) throw Error(errc::invalid_argument, "gamma must be > 0");
  if (!(cfg.delta > 0) || cfg.delta > 1)
    throw Error(errc::invalid_argument, "delta must lie in (0, 1]");
  const double root = std::sqrt(std::log(1.0 / cfg.delta) / 2.0);
  const double base = cfg.compensation * kappa + root;
  return base * base / (cfg.gamma * cfg.gamma);
}

namespace {
double clamp13(double v) { return std::clamp(v, 1.0, 3.0); }
}  // namespace

AlphaBreakdown alpha_correction(const std::vector<double>& rademacher_replicates,
                                int n_classes, double spectral, double kappa,
                                LossKind loss) {
  if (rademacher_replicates.size() < 2)
    throw Error(errc::too_few_samples,
                "alpha correction needs at least 2 Rademacher replicates");
  AlphaBreakdown a;
  const double mean = mean_of(rademacher_replicates);
  if (mean > 1e-12) {
    const double q95 = percentile(rademacher_replicates, 95.0);
    a.alpha_r = clamp13(q95 / mean);
  } else {
    a.alpha_r = 1.0;
  }
  a.alpha_bound = clamp13(1.0 + 0.1 * std::log(static_cast<double>(n_classes)));
  a.alpha_opt = clamp13(spectral / std::max(kappa, 1e-9));
  a.alpha_loss = loss == LossKind::cross_entropy ? 1.0 : 1.1;
  a.alpha = a.alpha_r * a.alpha_bound * a.alpha_opt * a.alpha_loss;
  return a;
}

OssInterval itle_interval(double bias, double n_eff, long n_train, double alpha,
                          double rho) {
  if (!(rho > 0)) throw Error(errc::invalid_argument, "rho must be positive");
  if (alpha < 1) throw Error(errc::invalid_argument, "alpha must be >= 1");
  OssInterval interval;
  if (bias <= 1e-12) {
    interval.saturated = true;
    return interval;
  }
  const long n_c = std::max(0L, round_half_up(n_eff) - n_train);
  if (n_c == 0) {
    // The effective-sample requirement is already met by the real data.
    interval.saturated = true;
    return interval;
  }
  interval.lower = round_half_up(static_cast<double>(n_c) / rho);
  interval.upper = round_half_up(alpha * static_cast<double>(n_c) / rho);
  return interval;
}

nlohmann::ordered_json ItleReport::to_json() const {
  nlohmann::ordered_json j;
  j["I_lb"] = i_lb;
  j["H_Y"] = h_y;
  j["p_e_lb"] = p_e_lb;
  j["e_test"] = e_test;
  j["Bias"] = bias;
  j["R_hat"] = r_hat;
  j["kappa_emp"] = kappa_emp;
  j["n_eff"] = n_eff;
  j["N_c"] = n_c;
  j["spectral"] = spectral;
  j["alpha"] = {{"alpha_R", alpha.alpha_r},
                {"alpha_bound", alpha.alpha_bound},
                {"alpha_opt", alpha.alpha_opt},
                {"alpha_loss", alpha.alpha_loss},
                {"alpha", alpha.alpha}};
  j["rho"] = {{"rho", rho.rho},
              {"raw", rho.raw},
              {"xi", rho.xi},
              {"param_count", rho.param_count},
              {"cond_mi", rho.cond_mi},
              {"cond_entropy", rho.cond_entropy}};
  j["OSS"] = {interval.lower, interval.upper};
  j["saturated"] = interval.saturated;
  j["n_train"] = n_train;
  j["n_classes"] = n_classes;
  j["mi_replicates"] = mi_replicates;
  j["rademacher_replicates"] = rademacher_replicates;
  j["seed"] = seed;
  return j;
}

namespace {

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("[") + name + "] " + e.what(), e.row(),
                e.col());
  }
}

}  // namespace

ItleReport run_itle(const SplitDataset& split, const ModelInput& model,
                    const AugmentedSet& aug, const GeneratorSpec& gen,
                    const ItleConfig& cfg, std::uint64_t seed) {
  if (split.parent.task != Task::classification)
    throw Error(errc::invalid_argument, "the ITLE path needs a classification task");

  ItleReport report;
  report.seed = seed;
  const Dataset train = split.train();
  report.n_train = static_cast<long>(train.n());
  report.n_classes = train.n_classes();

  // Information floor of the training data.
  BootstrapConfig boot = cfg.boot;
  boot.seed = derive_seed(seed, "itle.bootstrap");
  const BootstrapResult lb = stage("itle.bootstrap", [&] {
    return bootstrap_lower_bound(train.features, train.class_labels, cfg.ksg,
                                 boot, &report.warnings);
  });
  report.i_lb = lb.lower_bound;
  report.mi_replicates = lb.replicates;
  report.h_y = discrete_entropy(train.class_labels);
  report.p_e_lb =
      fano_floor(report.h_y, report.i_lb, report.n_classes, &report.warnings);

  // Trained-model probes, either computed here or imported.
  LossKind loss = LossKind::cross_entropy;
  if (std::holds_alternative<ModelSpec>(model)) {
    const ModelSpec& spec = std::get<ModelSpec>(model);
    loss = spec.loss;
    const TrainedModel trained = stage(
        "itle.fit", [&] { return fit(spec, split, derive_seed(seed, "itle.fit")); });
    const Metrics metrics =
        stage("itle.test", [&] { return test_error(trained, split.test()); });
    report.e_test = metrics.test_error;
    const RademacherResult rad = stage("itle.rademacher", [&] {
      return empirical_rademacher(spec, train.features, cfg.rademacher_iterations,
                                  derive_seed(seed, "itle.rademacher"));
    });
    report.r_hat = rad.mean;
    report.rademacher_replicates = rad.replicates;
    report.spectral = spectral_complexity(trained);
  } else {
    const ModelProbes& probes = std::get<ModelProbes>(model);
    if (probes.task != Task::classification)
      throw Error(errc::invalid_argument, "probes were computed for regression");
    if (probes.n_train != report.n_train)
      warn(&report.warnings, "ProbesTrainSizeMismatch",
           "probes n_train=" + std::to_string(probes.n_train) +
               " differs from the split (" + std::to_string(report.n_train) + ")");
    report.e_test = probes.test_error;
    report.r_hat = probes.rademacher_mean;
    report.rademacher_replicates = probes.rademacher_replicates;
    if (report.rademacher_replicates.size() < 2)
      report.rademacher_replicates = {probes.rademacher_mean,
                                      probes.rademacher_mean};
    report.spectral = probes.spectral;
  }

  report.bias = information_gap(report.e_test, report.p_e_lb);
  report.kappa_emp =
      scale_complexity(report.r_hat, static_cast<double>(report.n_train));
  report.n_eff = invert_generalization_bound(report.kappa_emp, cfg.bound);
  report.alpha =
      alpha_correction(report.rademacher_replicates, report.n_classes,
                       report.spectral, report.kappa_emp, loss);
  report.rho = stage("itle.rho", [&] {
    return info_contribution_ratio(train, aug, gen, cfg.rho, cfg.ksg,
                                   &report.warnings);
  });
  report.interval = itle_interval(report.bias, report.n_eff, report.n_train,
                                  report.alpha.alpha, report.rho.rho);
  report.n_c = std::max(0L, round_half_up(report.n_eff) - report.n_train);
  if (report.interval.saturated)
    warn(&report.warnings, "Saturated",
         "the model already exploits the dataset; no augmentation needed");
  return report;
}

}  // namespace augsize
