#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "augsize/generators.hpp"
#include "augsize/infotheory.hpp"
#include "augsize/rng.hpp"
#include "augsize/util.hpp"
#include "test_support.hpp"

using namespace augsize;

namespace {

// Correlated standard bivariate normal columns.
void gaussian_pair(int n, double r, std::uint64_t seed, Eigen::MatrixXd& x,
                   Eigen::MatrixXd& y) {
  Rng rng(seed);
  x.resize(n, 1);
  y.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    x(i, 0) = z1;
    y(i, 0) = r * z1 + std::sqrt(1 - r * r) * z2;
  }
}

}  // namespace

TEST_CASE("digamma reference values") {
  constexpr double kEuler = 0.5772156649015329;
  CHECK(std::abs(digamma(1.0) + kEuler) < 1e-10);
  CHECK(std::abs(digamma(2.0) - (1.0 - kEuler)) < 1e-10);
  // psi(1/2) = -gamma - 2 ln 2, evaluated independently.
  const double half = -kEuler - 2.0 * std::log(2.0);
  CHECK(std::abs(digamma(0.5) - half) < 1e-9);

  SUBCASE("recurrence psi(x+1) = psi(x) + 1/x") {
    for (double x : {0.3, 1.7, 4.2, 25.0})
      CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
  }
  SUBCASE("domain error") {
    CHECK_THROWS_AS(digamma(0.0), Error);
    CHECK_THROWS_AS(digamma(-3.0), Error);
  }
}

TEST_CASE("ksg_mi on the correlated Gaussian benchmark") {
  Eigen::MatrixXd x, y;
  gaussian_pair(2000, 0.9, 42, x, y);
  KsgConfig cfg;
  const double analytic = -0.5 * std::log(1.0 - 0.81);
  const MiEstimate e = ksg_mi(x, y, cfg);
  CHECK(std::abs(e.value - analytic) < 0.06);

  SUBCASE("symmetric in (X, Y)") {
    const MiEstimate swapped = ksg_mi(y, x, cfg);
    CHECK(std::abs(e.value - swapped.value) < 1e-9);
  }
  SUBCASE("invariant under monotone rescaling up to estimator noise") {
    Eigen::MatrixXd x2 = 2.0 * x.array() + 1.0;
    const MiEstimate rescaled = ksg_mi(x2, y, cfg);
    CHECK(std::abs(e.value - rescaled.value) < 0.05);
  }
}

TEST_CASE("ksg_mi on independent inputs is near zero") {
  Rng rng(7);
  Eigen::MatrixXd x(1000, 2), y(1000, 1);
  for (int i = 0; i < 1000; ++i) {
    x(i, 0) = rng.uniform();
    x(i, 1) = rng.uniform();
    y(i, 0) = rng.uniform();
  }
  CHECK(std::abs(ksg_mi(x, y, {}).value) <= 0.05);
}

TEST_CASE("ksg_mi with labels recovers the cluster entropy") {
  Dataset ds = testsupport::make_blobs(200, 3, 2, 0.3, 10.0, 99);
  const MiEstimate e = ksg_mi(ds.features, ds.class_labels, {});
  CHECK(std::abs(e.value - std::log(3.0)) < 0.05);
}

TEST_CASE("ksg_mi preconditions") {
  Eigen::MatrixXd x(4, 1), y(4, 1);
  x.setRandom();
  y.setRandom();
  KsgConfig cfg;
  cfg.k = 5;
  CHECK_THROWS_AS(ksg_mi(x, y, cfg), Error);  // n < k + 2
  Eigen::MatrixXd y3(3, 1);
  CHECK_THROWS_AS(ksg_mi(x, y3, {}), Error);  // arity mismatch
}

TEST_CASE("percentile uses linear interpolation with order-statistic edges") {
  // Two points at p = 5 reduce to the lower order statistic.
  CHECK(percentile({3.0, 9.0}, 5.0) == 3.0);
  CHECK(percentile({3.0, 9.0}, 50.0) == 6.0);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 100.0) == 4.0);
  // Monotone in p.
  std::vector<double> sample{0.3, 1.2, 0.7, 2.0, 1.6};
  double prev = -1e300;
  for (double p : {5.0, 25.0, 50.0, 75.0, 95.0}) {
    const double v = percentile(sample, p);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bootstrap_lower_bound basics") {
  KsgConfig ksg;
  BootstrapConfig boot;
  boot.replicates = 40;
  boot.seed = 5;

  SUBCASE("constant X carries no information") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(60, 2, 1.0);
    Eigen::MatrixXd y(60, 1);
    Rng rng(1);
    for (int i = 0; i < 60; ++i) y(i, 0) = rng.normal();
    const BootstrapResult r = bootstrap_lower_bound(x, y, ksg, boot);
    CHECK(r.lower_bound == 0.0);
  }

  SUBCASE("deterministic given the seed") {
    Eigen::MatrixXd x, y;
    gaussian_pair(150, 0.8, 3, x, y);
    const BootstrapResult a = bootstrap_lower_bound(x, y, ksg, boot);
    const BootstrapResult b = bootstrap_lower_bound(x, y, ksg, boot);
    CHECK(a.replicates == b.replicates);
    CHECK(a.lower_bound == b.lower_bound);
  }

  SUBCASE("thread cap does not change the result") {
    Eigen::MatrixXd x, y;
    gaussian_pair(120, 0.8, 4, x, y);
    set_thread_cap(1);
    const BootstrapResult serial = bootstrap_lower_bound(x, y, ksg, boot);
    set_thread_cap(0);
    const BootstrapResult parallel = bootstrap_lower_bound(x, y, ksg, boot);
    CHECK(serial.replicates == parallel.replicates);
  }

  SUBCASE("percentile monotonicity on the Gaussian benchmark") {
    Eigen::MatrixXd x, y;
    gaussian_pair(400, 0.9, 11, x, y);
    BootstrapConfig b200 = boot;
    b200.replicates = 200;
    const BootstrapResult r = bootstrap_lower_bound(x, y, ksg, b200);
    const double median = percentile(r.replicates, 50.0);
    CHECK(r.lower_bound <= median);
    CHECK(r.lower_bound <= 0.90);  // analytic MI + slack
    CHECK(percentile(r.replicates, 5.0) <= percentile(r.replicates, 50.0));
  }
}

TEST_CASE("discrete_entropy") {
  CHECK(discrete_entropy({0, 1, 2}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(discrete_entropy({5, 5, 5, 5}) == 0.0);
  // Counts {2,1,1}: -(1/2 ln 1/2 + 2 * 1/4 ln 1/4) computed by hand.
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(4.0);
  CHECK(discrete_entropy({0, 0, 1, 2}) == doctest::Approx(expected).epsilon(1e-9));

  SUBCASE("bounded by ln of the class count") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform_int(6));
      std::vector<int> labels;
      for (int i = 0; i < 50; ++i)
        labels.push_back(static_cast<int>(rng.uniform_int(k)));
      CHECK(discrete_entropy(labels) <= std::log(static_cast<double>(k)) + 1e-12);
    }
  }
}

TEST_CASE("conditional_entropy_binned") {
  RhoConfig cfg;

  SUBCASE("constant per class is deterministic given the label") {
    Eigen::MatrixXd x(9, 3);
    std::vector<int> y;
    for (int i = 0; i < 9; ++i) {
      const int c = i / 3;
      x.row(i) = Eigen::RowVector3d(c * 1.0, c * 2.0, -c * 1.0);
      y.push_back(c);
    }
    CHECK(conditional_entropy_binned(x, y, cfg) == 0.0);
  }

  SUBCASE("uniform occupancy approaches q ln(bins)") {
    RhoConfig uniform_cfg;
    uniform_cfg.pca_dims = 2;
    uniform_cfg.bins = 4;
    Rng rng(12);
    Eigen::MatrixXd x(6400, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      x(i, 0) = rng.normal();
      x(i, 1) = rng.normal();
    }
    std::vector<int> y(6400, 0);
    const double h = conditional_entropy_binned(x, y, uniform_cfg);
    CHECK(std::abs(h - 2.0 * std::log(4.0)) < 0.1);
  }

  SUBCASE("coin-flip cells give ln 2") {
    RhoConfig flip;
    flip.pca_dims = 1;
    flip.bins = 2;
    Rng rng(13);
    Eigen::MatrixXd x(1000, 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = rng.uniform();
    std::vector<int> y(1000, 0);
    CHECK(std::abs(conditional_entropy_binned(x, y, flip) - std::log(2.0)) < 0.05);
  }

  SUBCASE("singleton class contributes zero with a warning") {
    Eigen::MatrixXd x(5, 2);
    x.setRandom();
    std::vector<int> y{0, 0, 0, 0, 1};
    WarningList warnings;
    conditional_entropy_binned(x, y, cfg, &warnings);
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().code == "SingletonClassEntropy");
  }
}

namespace {

AugmentedSet copy_augmented(const Dataset& ds) {
  AugmentedSet aug;
  aug.task = ds.task;
  aug.features = ds.features;
  aug.class_labels = ds.class_labels;
  aug.targets = ds.targets;
  aug.source_index.resize(static_cast<std::size_t>(ds.n()));
  for (std::size_t i = 0; i < aug.source_index.size(); ++i)
    aug.source_index[i] = static_cast<long>(i);
  aug.spec.kind = GeneratorKind::interpolate;
  aug.spec.param_count = 0;
  return aug;
}

}  // namespace

TEST_CASE("conditional_mi") {
  Dataset real = testsupport::make_blobs(200, 3, 3, 0.5, 8.0, 21);
  RhoConfig cfg;
  KsgConfig ksg;

  SUBCASE("independent noise carries no shared information") {
    AugmentedSet aug;
    aug.task = Task::classification;
    Rng rng(31);
    aug.features.resize(real.n(), real.dim());
    for (Eigen::Index i = 0; i < aug.features.rows(); ++i) {
      for (Eigen::Index c = 0; c < aug.features.cols(); ++c)
        aug.features(i, c) = rng.normal();
      aug.class_labels.push_back(
          real.class_labels[static_cast<std::size_t>(i)]);
    }
    aug.source_index.assign(static_cast<std::size_t>(real.n()), -1);
    aug.spec.kind = GeneratorKind::external;
    aug.spec.param_count = 0;
    cfg.pairing = Pairing::nearest_same_class;
    CHECK(std::abs(conditional_mi(real, aug, cfg, ksg)) <= 0.05);
  }

  SUBCASE("an exact copy dominates the binned entropy") {
    AugmentedSet aug = copy_augmented(real);
    WarningList warnings;
    const double mi = conditional_mi(real, aug, cfg, ksg, &warnings);
    const double h = conditional_entropy_binned(real.features,
                                                real.class_labels, cfg);
    CHECK(mi >= 0.5 * h);
  }

  SUBCASE("regression targets are binned into conditioning bands") {
    Dataset reg = testsupport::make_regression(150, 3, 0.05, true, 22);
    GeneratorSpec spec = GeneratorSpec::make(
        GeneratorKind::jitter, {{"sigma", 0.2}}, 77);
    AugmentedSet aug = transform_augment(reg, spec, 150);
    const double mi = conditional_mi(reg, aug, cfg, ksg);
    CHECK(std::isfinite(mi));
    CHECK(mi >= -0.1);
  }

  SUBCASE("missing source indices fall back to nearest pairing with a warning") {
    AugmentedSet aug = copy_augmented(real);
    aug.source_index.assign(aug.source_index.size(), -1);
    WarningList warnings;
    cfg.pairing = Pairing::source_paired;
    conditional_mi(real, aug, cfg, ksg, &warnings);
    bool found = false;
    for (const Warning& w : warnings) found |= w.code == "PairingFallback";
    CHECK(found);
  }

  SUBCASE("classes below k + 2 pairs are excluded; all excluded is an error") {
    Dataset tiny = testsupport::make_blobs(4, 2, 2, 0.3, 5.0, 5);
    AugmentedSet aug = copy_augmented(tiny);
    CHECK_THROWS_AS(conditional_mi(tiny, aug, cfg, ksg), Error);
  }
}

TEST_CASE("info_contribution_ratio") {
  Dataset real = testsupport::make_blobs(200, 3, 3, 0.5, 8.0, 21);
  RhoConfig cfg;
  KsgConfig ksg;

  SUBCASE("formula-level trivia") {
    CHECK(rho_formula(0.0, 2.0, 1.0) == 1.0);
    CHECK(rho_formula(5.0, 2.0, 0.0) == 1.0);  // xi -> 0 as K grows
    CHECK(rho_formula(10.0, 1.0, 1.0) == 1e-3);  // clamped at the floor
    // Monotone decreasing in the conditional MI.
    double prev = 2.0;
    for (double mi : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      const double r = rho_formula(mi, 3.0, 1.0);
      CHECK(r <= prev);
      prev = r;
    }
  }

  SUBCASE("a huge declared parameter count drives rho to 1") {
    AugmentedSet aug = copy_augmented(real);
    aug.spec.kind = GeneratorKind::external;
    aug.spec.param_count = 1000000000L;
    RhoConfig tight = cfg;
    tight.tau = 1e3;  // xi = exp(-1e6) == 0
    const RhoResult r = info_contribution_ratio(real, aug, aug.spec, tight, ksg);
    CHECK(r.rho == 1.0);
    CHECK(r.xi == 0.0);
  }

  SUBCASE("identity copy with zero-parameter generator hits the floor") {
    AugmentedSet aug = copy_augmented(real);
    KsgConfig k1;
    k1.k = 1;
    const RhoResult r = info_contribution_ratio(real, aug, aug.spec, cfg, k1);
    CHECK(r.param_count == 0);
    CHECK(r.xi == 1.0);
    CHECK(r.cond_mi > r.cond_entropy);  // copy saturates the redundancy ratio
    CHECK(r.rho == cfg.rho_min);
  }

  SUBCASE("independent generator keeps rho near 1") {
    AugmentedSet aug;
    aug.task = Task::classification;
    Rng rng(55);
    aug.features.resize(real.n(), real.dim());
    for (Eigen::Index i = 0; i < aug.features.rows(); ++i) {
      for (Eigen::Index c = 0; c < aug.features.cols(); ++c)
        aug.features(i, c) = rng.normal();
      aug.class_labels.push_back(real.class_labels[static_cast<std::size_t>(i)]);
    }
    aug.source_index.assign(static_cast<std::size_t>(real.n()), -1);
    aug.spec.kind = GeneratorKind::external;
    aug.spec.param_count = 0;
    RhoConfig nearest = cfg;
    nearest.pairing = Pairing::nearest_same_class;
    const RhoResult r = info_contribution_ratio(real, aug, aug.spec, nearest, ksg);
    CHECK(r.rho > 0.9);
    CHECK(r.rho <= 1.0);
  }
}
