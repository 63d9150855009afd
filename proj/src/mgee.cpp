#include "augsize/mgee.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

double effective_sample_size(double a, double rho, double n_train) {
  if (a < 0) throw Error(errc::invalid_argument, "ratio a must be >= 0");
  if (rho < 0 || rho > 1)
    throw Error(errc::invalid_argument, "rho must lie in [0, 1]");
  if (n_train < 1) throw Error(errc::invalid_argument, "n_train must be >= 1");
  return n_train * (1.0 + a) / (1.0 + a * (1.0 - rho));
}

double generalization_value(double a_pb, double n_eff) {
  if (a_pb < 0) throw Error(errc::invalid_argument, "complexity must be >= 0");
  if (!(n_eff > 0)) throw Error(errc::invalid_argument, "n_eff must be > 0");
  return std::sqrt(a_pb / n_eff);
}

double derivative_g(double a, double a_pb, double rho, double n_train) {
  if (a_pb < 0) throw Error(errc::invalid_argument, "complexity must be >= 0");
  if (rho < 0 || rho > 1)
    throw Error(errc::invalid_argument, "rho must lie in [0, 1]");
  if (n_train < 1) throw Error(errc::invalid_argument, "n_train must be >= 1");
  const double scale = std::sqrt(a_pb / n_train) * rho;
  const double denom =
      2.0 * std::pow(1.0 + a, 1.5) * std::sqrt(1.0 + a * (1.0 - rho));
  return -scale / denom;
}

SaturationResult saturation_ratio(double a_pb, double rho, double n_train,
                                  const MgeeConfig& cfg, WarningList* warnings) {
  if (!(cfg.iota > 0)) throw Error(errc::invalid_argument, "iota must be > 0");
  if (!(cfg.a_max > 0)) throw Error(errc::invalid_argument, "a_max must be > 0");

  SaturationResult result;
  auto slope = [&](double a) { return std::abs(derivative_g(a, a_pb, rho, n_train)); };

  if (slope(0.0) <= cfg.iota) {
    result.a_star = 0.0;
    return result;
  }
  if (slope(cfg.a_max) > cfg.iota) {
    warn(warnings, "CeilingHit",
         "|dG/da| stays above iota up to a_max; returning the ceiling");
    result.a_star = cfg.a_max;
    result.ceiling_hit = true;
    return result;
  }
  // |dG/da| is strictly decreasing in a for rho > 0, so bisection finds the
  // crossing. 64 halvings put the bracket width at machine precision,
  // well inside the configured grid step.
  double lo = 0.0, hi = cfg.a_max;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) <= cfg.iota)
      hi = mid;
    else
      lo = mid;
  }
  result.a_star = hi;
  return result;
}

namespace {
double clamp12(double v) { return std::clamp(v, 1.0, 2.0); }
}  // namespace

BetaBreakdown beta_correction(double a_pb, long param_count, double rho,
                              const std::vector<double>& errors,
                              const MgeeConfig& cfg, WarningList* warnings) {
  if (param_count < 1)
    throw Error(errc::invalid_argument, "param_count must be >= 1");
  BetaBreakdown b;
  b.beta_pac =
      clamp12(1.0 + cfg.c1 * std::tanh(a_pb / static_cast<double>(param_count)));
  b.beta_rho = clamp12(1.0 + cfg.c2 * rho * rho);
  if (errors.empty()) {
    warn(warnings, "BetaEmpUnavailable",
         "no repeated augmentation errors; beta_emp falls back to 1");
    b.beta_emp = 1.0;
  } else if (errors.size() < 2) {
    warn(warnings, "BetaEmpUnavailable",
         "a single augmentation error cannot measure spread; beta_emp is 1");
    b.beta_emp = 1.0;
  } else {
    const double mean = mean_of(errors);
    const double rel = mean > 1e-12 ? stddev_pop(errors) / mean : 0.0;
    b.beta_emp = clamp12(1.0 + cfg.c3 * rel);
  }
  b.beta = b.beta_pac * b.beta_rho * b.beta_emp;
  return b;
}

OssInterval mgee_interval(long n_train, double a_star, double beta) {
  if (n_train < 1) throw Error(errc::invalid_argument, "n_train must be >= 1");
  if (a_star < 0) throw Error(errc::invalid_argument, "a_star must be >= 0");
  if (beta < 1) throw Error(errc::invalid_argument, "beta must be >= 1");
  OssInterval interval;
  interval.lower = round_half_up(static_cast<double>(n_train) * a_star);
  interval.upper = round_half_up(static_cast<double>(interval.lower) * beta);
  interval.saturated = interval.lower == 0;
  if (interval.saturated) interval.upper = 0;
  return interval;
}

nlohmann::ordered_json MgeeReport::to_json() const {
  nlohmann::ordered_json j;
  j["A_PB"] = a_pb;
  j["rho"] = {{"rho", rho.rho},
              {"raw", rho.raw},
              {"xi", rho.xi},
              {"param_count", rho.param_count},
              {"cond_mi", rho.cond_mi},
              {"cond_entropy", rho.cond_entropy}};
  j["n_train"] = n_train;
  j["model_param_count"] = param_count;
  nlohmann::ordered_json curve_json = nlohmann::ordered_json::array();
  for (const CurveSample& s : curve)
    curve_json.push_back({{"a", s.a}, {"G", s.g}, {"dG_da", s.dg_da}});
  j["G_curve"] = curve_json;
  j["a_star"] = a_star;
  j["ceiling_hit"] = ceiling_hit;
  j["N_r"] = n_r;
  j["beta"] = {{"beta_PAC", beta.beta_pac},
               {"beta_rho", beta.beta_rho},
               {"beta_emp", beta.beta_emp},
               {"beta", beta.beta}};
  j["beta_errors"] = beta_errors;
  j["OSS"] = {interval.lower, interval.upper};
  j["saturated"] = interval.saturated;
  j["seed"] = seed;
  return j;
}

std::string MgeeReport::curve_csv() const {
  std::ostringstream out;
  out << "a,G,dG_da\n";
  out.precision(12);
  for (const CurveSample& s : curve)
    out << s.a << "," << s.g << "," << s.dg_da << "\n";
  return out.str();
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

std::vector<CurveSample> sample_curve(double a_pb, double rho, double n_train,
                                      const MgeeConfig& cfg) {
  std::vector<CurveSample> curve;
  auto push = [&](double a) {
    CurveSample s;
    s.a = a;
    s.g = generalization_value(a_pb, effective_sample_size(a, rho, n_train));
    s.dg_da = derivative_g(a, a_pb, rho, n_train);
    curve.push_back(s);
  };
  push(0.0);
  const int points = std::max(cfg.curve_points, 2);
  const double lo = std::max(cfg.grid_step, 1e-2);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(cfg.a_max);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    push(std::exp(log_lo + t * (log_hi - log_lo)));
  }
  return curve;
}

}  // namespace

MgeeReport run_mgee(const SplitDataset& split, const ModelInput& model,
                    const AugmentedSet& aug, const GeneratorSpec& gen,
                    const MgeeConfig& cfg, const KsgConfig& ksg,
                    const RhoConfig& rho_cfg, std::uint64_t seed) {
  if (split.parent.task != Task::regression)
    throw Error(errc::invalid_argument, "the MGEE path needs a regression task");

  MgeeReport report;
  report.seed = seed;
  const Dataset train = split.train();
  report.n_train = static_cast<long>(train.n());

  // Model complexity, trained here or imported.
  if (std::holds_alternative<ModelSpec>(model)) {
    const ModelSpec& spec = std::get<ModelSpec>(model);
    const TrainedModel trained = stage(
        "mgee.fit", [&] { return fit(spec, split, derive_seed(seed, "mgee.fit")); });
    const PacBayesPosterior posterior = stage("mgee.posterior", [&] {
      return collect_posterior(trained, cfg.posterior_window, cfg.prior_std,
                               &report.warnings);
    });
    report.a_pb = pac_bayes_complexity(posterior);
    report.param_count = trained.param_count();

    // Repeated augmentation experiments at a one-to-one probe ratio feed the
    // empirical stability component of beta. Validation error avoids
    // touching the test partition.
    if (cfg.beta_repeats > 0) {
      report.beta_errors.assign(static_cast<std::size_t>(cfg.beta_repeats), 0.0);
      const Dataset val = split.val();
      stage("mgee.beta_emp", [&] {
        parallel_for(cfg.beta_repeats, [&](std::int64_t r) {
          GeneratorSpec probe_gen = gen;
          probe_gen.seed =
              derive_seed(seed, "mgee.beta.gen", static_cast<std::uint64_t>(r));
          AugmentedSet probe =
              generate(train, probe_gen, report.n_train);
          Dataset combined = train;
          combined.features.conservativeResize(train.n() + probe.n(), train.dim());
          combined.features.bottomRows(probe.n()) = probe.features;
          Eigen::VectorXd merged(train.n() + probe.n());
          merged << train.targets, probe.targets;
          combined.targets = merged;
          TrainedModel m =
              fit(spec, combined, val,
                  derive_seed(seed, "mgee.beta.fit", static_cast<std::uint64_t>(r)));
          report.beta_errors[static_cast<std::size_t>(r)] = test_error(m, val).mape;
        });
        return 0;
      });
    }
  } else {
    const ModelProbes& probes = std::get<ModelProbes>(model);
    if (probes.task != Task::regression)
      throw Error(errc::invalid_argument, "probes were computed for classification");
    report.a_pb = probes.pac_bayes;
    report.param_count = probes.param_count;
  }

  report.rho = stage("mgee.rho", [&] {
    return info_contribution_ratio(train, aug, gen, rho_cfg, ksg,
                                   &report.warnings);
  });

  const double n_train_d = static_cast<double>(report.n_train);
  report.curve = sample_curve(report.a_pb, report.rho.rho, n_train_d, cfg);
  const SaturationResult sat = saturation_ratio(report.a_pb, report.rho.rho,
                                                n_train_d, cfg, &report.warnings);
  report.a_star = sat.a_star;
  report.ceiling_hit = sat.ceiling_hit;
  report.n_r = round_half_up(n_train_d * report.a_star);

  report.beta = beta_correction(report.a_pb, std::max(report.param_count, 1L),
                                report.rho.rho, report.beta_errors, cfg,
                                &report.warnings);
  report.interval = mgee_interval(report.n_train, report.a_star, report.beta.beta);
  if (report.interval.saturated)
    warn(&report.warnings, "Saturated",
         "the generalization curve is already flat; no augmentation needed");
  return report;
}

}  // namespace augsize
