#include <doctest.h>

#include <cmath>

#include "augsize/generators.hpp"
#include "augsize/itle.hpp"
#include "test_support.hpp"

using namespace augsize;

TEST_CASE("fano_floor") {
  SUBCASE("full information clamps to zero") {
    CHECK(fano_floor(std::log(3.0), std::log(3.0), 3) == 0.0);
  }
  SUBCASE("no information leaves the hand-computed floor") {
    const double expected = (std::log(3.0) - 1.0) / std::log(2.0);
    CHECK(std::abs(fano_floor(std::log(3.0), 0.0, 3) - expected) < 1e-9);
    CHECK(std::abs(fano_floor(2.0, 0.0, 5) - 1.0 / std::log(4.0)) < 1e-9);
  }
  SUBCASE("binary tasks degenerate with a warning") {
    WarningList warnings;
    CHECK(fano_floor(std::log(2.0), 0.1, 2, &warnings) == 0.0);
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().code == "BinaryFanoDegenerate");
  }
  SUBCASE("non-increasing in the information lower bound") {
    double prev = 2.0;
    for (double i_lb : {0.0, 0.2, 0.5, 0.9, 1.2}) {
      const double p = fano_floor(1.0986, i_lb, 3);
      CHECK(p <= prev);
      prev = p;
    }
  }
}

TEST_CASE("information_gap") {
  CHECK(information_gap(0.091, 0.059) == doctest::Approx(0.032).epsilon(1e-12));
  CHECK(information_gap(0.252, 0.059) == doctest::Approx(0.193).epsilon(1e-12));
  CHECK(information_gap(0.05, 0.059) == 0.0);
}

TEST_CASE("invert_generalization_bound") {
  BoundConfig cfg;  // C = 1, delta = 0.05, gamma = 0.03

  SUBCASE("zero complexity leaves the confidence term") {
    CHECK(std::abs(invert_generalization_bound(0.0, cfg) - 1664.3) < 0.5);
  }
  SUBCASE("delta = 1 with zero kappa gives zero") {
    BoundConfig sure = cfg;
    sure.delta = 1.0;
    CHECK(invert_generalization_bound(0.0, sure) == 0.0);
  }
  SUBCASE("doubling gamma divides the size by exactly four") {
    BoundConfig wide = cfg;
    wide.gamma = 2.0 * cfg.gamma;
    const double n1 = invert_generalization_bound(2.0, cfg);
    const double n2 = invert_generalization_bound(2.0, wide);
    CHECK(n1 == doctest::Approx(4.0 * n2).epsilon(1e-12));
  }
}

TEST_CASE("alpha_correction") {
  SUBCASE("identical replicates pin alpha_R at 1") {
    const AlphaBreakdown a =
        alpha_correction({0.3, 0.3, 0.3, 0.3}, 3, 0.0, 1.0, LossKind::cross_entropy);
    CHECK(a.alpha_r == 1.0);
    CHECK(a.alpha == doctest::Approx(a.alpha_r * a.alpha_bound * a.alpha_opt *
                                     a.alpha_loss)
                         .epsilon(1e-9));
  }
  SUBCASE("three classes set the bound factor") {
    const AlphaBreakdown a =
        alpha_correction({0.3, 0.3}, 3, 0.0, 1.0, LossKind::cross_entropy);
    CHECK(std::abs(a.alpha_bound - (1.0 + 0.1 * std::log(3.0))) < 1e-9);
  }
  SUBCASE("spectral below kappa floors alpha_opt") {
    const AlphaBreakdown a =
        alpha_correction({0.2, 0.4}, 3, 0.5, 2.0, LossKind::cross_entropy);
    CHECK(a.alpha_opt == 1.0);
  }
  SUBCASE("mse loss widens the loss factor") {
    const AlphaBreakdown a = alpha_correction({0.2, 0.4}, 3, 0.5, 2.0, LossKind::mse);
    CHECK(a.alpha_loss == 1.1);
  }
  SUBCASE("every component clamps into [1, 3]") {
    const AlphaBreakdown a =
        alpha_correction({0.001, 10.0}, 1000000, 1e9, 1e-9, LossKind::mse);
    for (double v : {a.alpha_r, a.alpha_bound, a.alpha_opt, a.alpha_loss}) {
      CHECK(v >= 1.0);
      CHECK(v <= 3.0);
    }
    CHECK(a.alpha <= 81.0 * 1.0 + 1e-9);
  }
  SUBCASE("fewer than two replicates is an error") {
    CHECK_THROWS_AS(alpha_correction({0.3}, 3, 0.0, 1.0, LossKind::cross_entropy),
                    Error);
  }
}

TEST_CASE("itle_interval") {
  SUBCASE("reference arithmetic reproduces the published interval") {
    const OssInterval i = itle_interval(0.062, 552.0, 198, 1.50, 1.0);
    CHECK(i.lower == 354);
    CHECK(i.upper == 531);  // printed 530; half-up rounding lands one above
    CHECK_FALSE(i.saturated);
  }
  SUBCASE("zero bias saturates") {
    const OssInterval i = itle_interval(0.0, 5000.0, 198, 1.5, 1.0);
    CHECK(i.lower == 0);
    CHECK(i.upper == 0);
    CHECK(i.saturated);
  }
  SUBCASE("n_eff below the train size saturates despite positive bias") {
    const OssInterval i = itle_interval(0.123, 150.0, 198, 1.5, 1.0);
    CHECK(i.saturated);
    CHECK(i.lower == 0);
    CHECK(i.upper == 0);
  }
  SUBCASE("shrinking rho never shrinks the interval") {
    const OssInterval base = itle_interval(0.1, 600.0, 198, 1.4, 0.8);
    const OssInterval wider = itle_interval(0.1, 600.0, 198, 1.4, 0.4);
    CHECK(wider.lower >= base.lower);
    CHECK(wider.upper >= base.upper);
  }
  SUBCASE("endpoints are ordered for alpha >= 1") {
    for (double alpha : {1.0, 1.2, 2.9}) {
      const OssInterval i = itle_interval(0.1, 700.0, 198, alpha, 0.7);
      CHECK(i.lower <= i.upper);
    }
  }
}

TEST_CASE("run_itle end to end") {
  ItleConfig cfg;
  cfg.boot.replicates = 40;  // keep the suite fast
  cfg.rademacher_iterations = 10;
  cfg.rho.pairing = Pairing::nearest_same_class;

  ModelSpec spec;
  spec.kind = ModelKind::linear_logistic;
  spec.learning_rate = 0.05;
  spec.max_epochs = 200;
  spec.patience = 30;
  spec.loss = LossKind::cross_entropy;

  SUBCASE("a strong model on separable clusters saturates") {
    Dataset ds = testsupport::make_blobs(110, 3, 3, 0.3, 10.0, 61);
    SplitPolicy policy;
    policy.test_fraction = 0.25;
    SplitDataset sd = split(ds, policy, 13);
    GeneratorSpec gen =
        GeneratorSpec::make(GeneratorKind::class_gaussian, {}, 900);
    AugmentedSet aug = generate(sd.train(), gen, sd.n_train());
    const ItleReport report = run_itle(sd, spec, aug, aug.spec, cfg, 5);
    CHECK(report.bias == 0.0);
    CHECK(report.interval.saturated);
    CHECK(report.interval.lower == 0);
    CHECK(report.interval.upper == 0);
  }

  SUBCASE("a weak model on overlapping clusters needs augmentation") {
    Dataset ds = testsupport::make_blobs(70, 3, 2, 3.0, 1.0, 62);
    SplitPolicy policy;
    policy.test_fraction = 0.25;
    SplitDataset sd = split(ds, policy, 14);
    ModelSpec weak = spec;
    weak.l2 = 100.0;  // heavy regularization keeps the model weak
    weak.max_epochs = 60;
    GeneratorSpec gen =
        GeneratorSpec::make(GeneratorKind::class_gaussian, {}, 901);
    AugmentedSet aug = generate(sd.train(), gen, sd.n_train());
    const ItleReport report = run_itle(sd, weak, aug, aug.spec, cfg, 6);
    CHECK(report.bias > 0.0);
    CHECK(report.interval.lower > 0);
    CHECK(report.interval.lower <= report.interval.upper);
  }

  SUBCASE("identical seeds give byte-identical reports") {
    Dataset ds = testsupport::make_blobs(50, 3, 2, 1.0, 3.0, 63);
    SplitPolicy policy;
    policy.test_fraction = 0.25;
    SplitDataset sd = split(ds, policy, 15);
    GeneratorSpec gen = GeneratorSpec::make(GeneratorKind::jitter,
                                            {{"sigma", 0.3}}, 902);
    AugmentedSet aug = generate(sd.train(), gen, sd.n_train());
    const ItleReport a = run_itle(sd, spec, aug, aug.spec, cfg, 7);
    const ItleReport b = run_itle(sd, spec, aug, aug.spec, cfg, 7);
    CHECK(a.to_json().dump() == b.to_json().dump());
  }

  SUBCASE("probes replace in-repo training") {
    Dataset ds = testsupport::make_blobs(50, 3, 2, 1.5, 2.0, 64);
    SplitPolicy policy;
    policy.test_fraction = 0.25;
    SplitDataset sd = split(ds, policy, 16);
    ModelProbes probes;
    probes.task = Task::classification;
    probes.test_error = 0.4;
    probes.rademacher_mean = 0.3;
    probes.rademacher_replicates = {0.25, 0.3, 0.35};
    probes.n_train = sd.n_train();
    probes.kappa = scale_complexity(0.3, static_cast<double>(sd.n_train()));
    probes.spectral = 1.0;
    probes.param_count = 10;
    GeneratorSpec gen = GeneratorSpec::make(GeneratorKind::jitter,
                                            {{"sigma", 0.3}}, 903);
    AugmentedSet aug = generate(sd.train(), gen, sd.n_train());
    const ItleReport report = run_itle(sd, probes, aug, aug.spec, cfg, 8);
    CHECK(report.e_test == 0.4);
    CHECK(report.r_hat == 0.3);
    CHECK(report.bias > 0.0);
  }

  SUBCASE("regression input is rejected") {
    Dataset ds = testsupport::make_regression(60, 2, 0.1, false, 65);
    SplitPolicy policy;
    policy.test_fraction = 0.25;
    SplitDataset sd = split(ds, policy, 17);
    GeneratorSpec gen = GeneratorSpec::make(GeneratorKind::jitter,
                                            {{"sigma", 0.3}}, 904);
    AugmentedSet aug = generate(sd.train(), gen, sd.n_train());
    CHECK_THROWS_AS(run_itle(sd, spec, aug, aug.spec, cfg, 9), Error);
  }
}
