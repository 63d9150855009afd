#include <doctest.h>

#include <cmath>

#include "augsize/icd.hpp"

using namespace augsize;

TEST_CASE("reference_quantile") {
  CHECK(reference_quantile(198) == 100);
  CHECK(reference_quantile(70) == 100);  // log10(70) = 1.845 rounds to 2
  CHECK(reference_quantile(1000) == 1000);
  CHECK(reference_quantile(1) == 1);
  CHECK(reference_quantile(3) == 1);  // log10(3) = 0.477 rounds down
  CHECK(reference_quantile(4) == 10);  // log10(4) = 0.602 rounds up
  CHECK_THROWS_AS(reference_quantile(0), Error);
}

TEST_CASE("snap_true") {
  CHECK(snap_true(480, 100) == 500);
  CHECK(snap_true(150, 100) == 200);  // half-way ties round up
  CHECK(snap_true(149, 100) == 100);
  CHECK(snap_true(0, 100) == 0);
  CHECK_THROWS_AS(snap_true(-1, 100), Error);
}

namespace {
OssInterval interval(long lo, long hi) {
  OssInterval i;
  i.lower = lo;
  i.upper = hi;
  return i;
}
}  // namespace

TEST_CASE("icd_score on reference rows") {
  SUBCASE("covered interval with midpoint slack") {
    const IcdScore s = icd_score(interval(354, 530), 500, 100);
    CHECK(s.cov == 1);
    CHECK(s.dev == doctest::Approx(0.116).epsilon(1e-12));
  }
  SUBCASE("uncovered interval above the truth") {
    const IcdScore s = icd_score(interval(256, 314), 200, 100);
    CHECK(s.cov == 0);
    CHECK(s.dev == doctest::Approx(0.425).epsilon(1e-12));
  }
  SUBCASE("saturated interval on a zero truth") {
    const IcdScore s = icd_score(interval(0, 0), 0, 100);
    CHECK(s.cov == 1);
    CHECK(s.dev == 0.0);
  }
}

TEST_CASE("icd reproduces the full reference score table") {
  struct Row {
    long lo, hi, n_true;
    int cov;
    double dev;
  };
  // Twelve published rows: six per estimation path, both scenarios share
  // Q = 100.
  const Row rows[] = {
      {0, 0, 0, 1, 0.0},        {354, 530, 500, 1, 0.1160},
      {273, 333, 300, 1, 0.0100}, {0, 0, 0, 1, 0.0},
      {84, 124, 100, 1, 0.0400},  {138, 168, 100, 0, 0.5300},
      {0, 0, 0, 1, 0.0},        {0, 0, 0, 1, 0.0},
      {256, 314, 200, 0, 0.4250}, {295, 365, 300, 1, 0.1000},
      {326, 399, 300, 0, 0.2083}, {474, 578, 400, 0, 0.3150},
  };
  for (const Row& row : rows) {
    const IcdScore s = icd_score(interval(row.lo, row.hi), row.n_true, 100);
    CHECK(s.cov == row.cov);
    CHECK(std::abs(s.dev - row.dev) <= 5e-5);  // printed precision
  }
}

TEST_CASE("icd_score invariants") {
  SUBCASE("depends only on the midpoint") {
    const IcdScore a = icd_score(interval(200, 400), 200, 100);
    const IcdScore b = icd_score(interval(250, 350), 200, 100);
    CHECK(a.dev == b.dev);
  }
  SUBCASE("degenerate interval on the truth scores perfectly") {
    const IcdScore s = icd_score(interval(300, 300), 300, 100);
    CHECK(s.cov == 1);
    CHECK(s.dev == 0.0);
  }
  SUBCASE("scaling everything by ten leaves dev unchanged") {
    const IcdScore small = icd_score(interval(120, 180), 200, 100);
    const IcdScore big = icd_score(interval(1200, 1800), 2000, 1000);
    CHECK(small.dev == doctest::Approx(big.dev).epsilon(1e-12));
  }
  SUBCASE("a ground truth off the quantile grid is rejected") {
    CHECK_THROWS_AS(icd_score(interval(0, 10), 150, 100), Error);
  }
}
