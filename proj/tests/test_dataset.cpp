#include <doctest.h>

#include <filesystem>
#include <set>

#include "augsize/dataset.hpp"
#include "augsize/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace augsize;
namespace fs = std::filesystem;

TEST_CASE("load_table parses a sensor-style classification file") {
  auto dir = testsupport::temp_dir("load");
  Dataset blobs = testsupport::make_blobs(99, 3, 10, 0.5, 5.0, 11);
  testsupport::write_file(dir / "rice.csv", testsupport::to_csv(blobs, true));

  TableSchema schema;
  schema.label_column = "label";
  schema.has_header = true;
  Dataset ds = load_table((dir / "rice.csv").string(), schema);
  CHECK(ds.n() == 297);
  CHECK(ds.dim() == 10);
  CHECK(ds.n_classes() == 3);
  // Codes follow first appearance.
  CHECK(ds.class_labels.front() == 0);
  CHECK(ds.class_names[0] == "c0");

  SUBCASE("label column by negative index") {
    TableSchema byidx;
    byidx.label_column = "-1";
    byidx.has_header = true;
    Dataset same = load_table((dir / "rice.csv").string(), byidx);
    CHECK(same.n_classes() == 3);
  }
}

TEST_CASE("load_table error taxonomy") {
  auto dir = testsupport::temp_dir("loaderr");

  SUBCASE("missing file") {
    try {
      load_table((dir / "nope.csv").string(), {});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_file);
    }
  }
  SUBCASE("empty file") {
    testsupport::write_file(dir / "empty.csv", "");
    try {
      load_table((dir / "empty.csv").string(), {});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == errc::empty_input);
    }
  }
  SUBCASE("non-numeric cell names its row") {
    std::string csv = "1,2,a\n3,4,b\n5,6,a\n7,8,b\n9,10,a\nabc,12,b\n";
    testsupport::write_file(dir / "bad.csv", csv);
    TableSchema schema;
    schema.label_column = "-1";
    try {
      load_table((dir / "bad.csv").string(), schema);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == errc::parse_error);
      CHECK(e.row() == 5);
    }
  }
  SUBCASE("ragged row") {
    testsupport::write_file(dir / "ragged.csv", "1,2,a\n3,b\n");
    try {
      load_table((dir / "ragged.csv").string(), {});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == errc::ragged_row);
      CHECK(e.row() == 1);
    }
  }
  SUBCASE("unknown label column") {
    testsupport::write_file(dir / "ok.csv", "f0,f1,label\n1,2,a\n3,4,b\n");
    TableSchema schema;
    schema.label_column = "class";
    schema.has_header = true;
    try {
      load_table((dir / "ok.csv").string(), schema);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == errc::unknown_label_column);
    }
  }
}

TEST_CASE("split carves 7:2 with the remainder going to val") {
  // 198-sample balanced training pool plus a separate test file.
  Dataset pool = testsupport::make_blobs(66, 3, 4, 0.4, 4.0, 5);
  Dataset external = testsupport::make_blobs(33, 3, 4, 0.4, 4.0, 6);
  SplitPolicy policy;
  policy.external_test = external;
  SplitDataset sd = split(pool, policy, 7);
  CHECK(sd.train_idx.size() == 154);
  CHECK(sd.val_idx.size() == 44);
  CHECK(sd.test_idx.size() == 99);

  SUBCASE("same seed gives identical index lists") {
    SplitDataset again = split(pool, policy, 7);
    CHECK(again.train_idx == sd.train_idx);
    CHECK(again.val_idx == sd.val_idx);
    CHECK(again.test_idx == sd.test_idx);
  }
  SUBCASE("different seed moves indices") {
    SplitDataset other = split(pool, policy, 8);
    CHECK(other.train_idx != sd.train_idx);
  }
  SUBCASE("partitions are disjoint and within the parent") {
    std::set<Eigen::Index> seen;
    for (auto* part : {&sd.train_idx, &sd.val_idx, &sd.test_idx})
      for (Eigen::Index i : *part) {
        CHECK(seen.insert(i).second);
        CHECK(i >= 0);
        CHECK(i < sd.parent.n());
      }
  }
  SUBCASE("stratification keeps per-class train share within one sample") {
    std::vector<long> total(3, 0), in_train(3, 0);
    for (Eigen::Index i = 0; i < pool.n(); ++i)
      ++total[static_cast<std::size_t>(
          pool.class_labels[static_cast<std::size_t>(i)])];
    for (Eigen::Index i : sd.train_idx)
      ++in_train[static_cast<std::size_t>(
          sd.parent.class_labels[static_cast<std::size_t>(i)])];
    const double global = 154.0 / 198.0;
    for (int c = 0; c < 3; ++c) {
      const double expected = global * static_cast<double>(total[c]);
      CHECK(std::abs(static_cast<double>(in_train[c]) - expected) <= 1.0);
    }
  }
}

TEST_CASE("split rejects an empty test partition") {
  Dataset ds = testsupport::make_blobs(20, 2, 3, 0.3, 3.0, 1);
  SplitPolicy policy;
  policy.test_fraction = 0.0;
  try {
    split(ds, policy, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_partition);
  }
}

TEST_CASE("split by fraction on regression data") {
  Dataset ds = testsupport::make_regression(100, 3, 0.1, false, 3);
  SplitPolicy policy;
  policy.test_fraction = 0.2;
  SplitDataset sd = split(ds, policy, 9);
  CHECK(sd.test_idx.size() == 20);
  CHECK(sd.train_idx.size() + sd.val_idx.size() == 80);
  CHECK(sd.train_idx.size() == 62);  // floor(80 * 7/9)
}

TEST_CASE("fit_pca matches an independent Jacobi eigensolver") {
  Rng rng(17);
  Eigen::MatrixXd x(100, 10);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal();
  // Unequal column variances keep the eigenvalue ordering unambiguous.
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    x.col(c) *= 1.0 + 0.5 * static_cast<double>(c);

  PcaModel model = fit_pca(x, 3);

  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / (x.rows() - 1.0);
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  oracles::jacobi_eigen(cov, values, vectors);

  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd ours = model.components.row(j);
    Eigen::VectorXd ref = vectors.col(j);
    // Align the oracle's sign with the library convention.
    Eigen::Index arg = 0;
    ref.cwiseAbs().maxCoeff(&arg);
    if (ref(arg) < 0) ref = -ref;
    CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(model.explained(j) ==
          doctest::Approx(values(j) / values.sum()).epsilon(1e-6));
  }
  Eigen::MatrixXd ours_proj = model.project(x);
  Eigen::MatrixXd ref_proj = centered * vectors.leftCols(3);
  for (int j = 0; j < 3; ++j) {
    const double diff =
        (ours_proj.col(j) - ref_proj.col(j)).cwiseAbs().maxCoeff();
    const double diff_flipped =
        (ours_proj.col(j) + ref_proj.col(j)).cwiseAbs().maxCoeff();
    CHECK(std::min(diff, diff_flipped) < 1e-6);
  }
}

TEST_CASE("fit_pca rank-1 data explains everything with one component") {
  Rng rng(2);
  Eigen::VectorXd v = Eigen::VectorXd::Random(6);
  Eigen::MatrixXd x(40, 6);
  for (Eigen::Index r = 0; r < x.rows(); ++r) x.row(r) = rng.normal() * v;
  PcaModel model = fit_pca(x, 1);
  CHECK(model.explained(0) >= 1.0 - 1e-8);
}

TEST_CASE("fit_pca full basis is orthonormal and distance preserving") {
  Rng rng(3);
  Eigen::MatrixXd x(30, 5);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform();
  PcaModel model = fit_pca(x, 5);
  CHECK(model.explained.sum() == doctest::Approx(1.0).epsilon(1e-8));
  Eigen::MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);

  Eigen::MatrixXd proj = model.project(x);
  for (int i = 0; i < 10; ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(29 - i);
    const double orig = (x.row(a) - x.row(b)).norm();
    const double mapped = (proj.row(a) - proj.row(b)).norm();
    CHECK(orig == doctest::Approx(mapped).epsilon(1e-8));
  }
}

TEST_CASE("fit_pca rejects q out of range") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
  CHECK_THROWS_AS(fit_pca(x, 0), Error);
  CHECK_THROWS_AS(fit_pca(x, 4), Error);
}

TEST_CASE("fit_pca tolerates zero-variance input") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(8, 3, 2.5);
  PcaModel model = fit_pca(x, 2);
  CHECK(model.explained.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("minmax_normalize") {
  Eigen::MatrixXd x(3, 3);
  x << 2, 5, 0, 4, 5, 0.5, 6, 5, 1;
  Eigen::MatrixXd out = minmax_normalize(x);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 0.5);
  CHECK(out(2, 0) == 1.0);
  // Constant column maps to zero.
  CHECK(out.col(1).cwiseAbs().maxCoeff() == 0.0);
  // Already-[0,1] column is unchanged.
  CHECK((out.col(2) - x.col(2)).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("idempotent and bounded") {
    Rng rng(4);
    Eigen::MatrixXd r(50, 4);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index c = 0; c < r.cols(); ++c) r(i, c) = rng.normal(3, 10);
    Eigen::MatrixXd once = minmax_normalize(r);
    CHECK(once.minCoeff() >= 0.0);
    CHECK(once.maxCoeff() <= 1.0);
    Eigen::MatrixXd twice = minmax_normalize(once);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-15);
  }
}
