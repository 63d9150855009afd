#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "augsize/cli.hpp"
#include "test_support.hpp"

using namespace augsize;
namespace fs = std::filesystem;

namespace {

std::string csv_path(const fs::path& dir, const std::string& name,
                     const Dataset& ds) {
  const fs::path p = dir / name;
  testsupport::write_file(p, testsupport::to_csv(ds, true));
  return p.string();
}

nlohmann::json read_json(const fs::path& path) {
  return nlohmann::json::parse(testsupport::read_file(path));
}

}  // namespace

TEST_CASE("cli usage errors exit with 1") {
  CHECK(cli::run_command({"frobnicate"}) == 1);
  CHECK(cli::run_command({"icd", "--interval", "1", "2", "--true", "3", "--n",
                          "10", "--no-such-flag"}) == 1);
  CHECK(cli::run_command({}) == 1);
}

TEST_CASE("cli data errors exit with 2") {
  auto dir = testsupport::temp_dir("cli2");
  CHECK(cli::run_command({"mi", "--data", (dir / "missing.csv").string()}) == 2);
}

TEST_CASE("cli icd matches the reference arithmetic") {
  auto dir = testsupport::temp_dir("cliicd");
  const fs::path out = dir / "icd.json";
  CHECK(cli::run_command({"icd", "--interval", "354", "530", "--true", "480",
                          "--n", "198", "--out", out.string()}) == 0);
  const nlohmann::json report = read_json(out);
  CHECK(report["payload"]["icd_cov"] == 1);
  CHECK(report["payload"]["icd_dev"] == doctest::Approx(0.116));
  CHECK(report["payload"]["n_true"] == 500);
  CHECK(report["schema"] == 1);
}

TEST_CASE("cli mi runs happy path and is byte-identical across reruns") {
  auto dir = testsupport::temp_dir("climi");
  Dataset ds = testsupport::make_blobs(40, 3, 3, 0.5, 5.0, 91);
  const std::string data = csv_path(dir, "blobs.csv", ds);
  const fs::path out1 = dir / "mi1.json";
  const fs::path out2 = dir / "mi2.json";
  const std::vector<std::string> base{
      "mi",       "--data",  data,     "--label", "label",
      "--header", "--task",  "classification", "--bootstrap", "20",
      "--seed",   "7"};
  std::vector<std::string> run1 = base;
  run1.push_back("--out");
  run1.push_back(out1.string());
  std::vector<std::string> run2 = base;
  run2.push_back("--out");
  run2.push_back(out2.string());
  CHECK(cli::run_command(run1) == 0);
  CHECK(cli::run_command(run2) == 0);
  CHECK(testsupport::read_file(out1) == testsupport::read_file(out2));
  const nlohmann::json report = read_json(out1);
  CHECK(report["payload"].contains("I_lb"));
  CHECK(report["payload"]["mi"].get<double>() > 0.5);
}

TEST_CASE("cli itle produces a schema-complete report") {
  auto dir = testsupport::temp_dir("cliitle");
  Dataset ds = testsupport::make_blobs(40, 3, 3, 1.5, 2.0, 92);
  const std::string data = csv_path(dir, "blobs.csv", ds);
  const fs::path out = dir / "itle.json";
  CHECK(cli::run_command({"itle", "--data", data, "--label", "label",
                          "--header", "--model", "logistic", "--gen",
                          "class-gaussian", "--bootstrap", "20", "--seed", "7",
                          "--out", out.string()}) == 0);
  const nlohmann::json report = read_json(out);
  for (const char* key : {"I_lb", "H_Y", "p_e_lb", "e_test", "Bias", "R_hat",
                          "kappa_emp", "n_eff", "alpha", "rho", "OSS",
                          "saturated", "split"})
    CHECK(report["payload"].contains(key));
  CHECK(report["config"]["model"]["model"] == "logistic");
}

TEST_CASE("cli mgee with probes writes a companion curve CSV") {
  auto dir = testsupport::temp_dir("climgee");
  Dataset ds = testsupport::make_regression(90, 2, 0.2, true, 93);
  const std::string data = csv_path(dir, "reg.csv", ds);
  testsupport::write_file(dir / "probes.json", R"({
    "schema": 1, "task": "regression", "mape": 0.1, "pac_bayes": 12.0,
    "rademacher": {"mean": 0.2}, "n_train": 62, "param_count": 50
  })");
  const fs::path out = dir / "mgee.json";
  CHECK(cli::run_command({"mgee", "--data", data, "--label", "label",
                          "--header", "--task", "regression", "--probes",
                          (dir / "probes.json").string(), "--gen", "jitter",
                          "--gen-sigma", "0.5", "--seed", "3", "--out",
                          out.string(), "--csv"}) == 0);
  const nlohmann::json report = read_json(out);
  CHECK(report["payload"]["A_PB"] == 12.0);
  CHECK(report["payload"].contains("G_curve"));
  // beta_emp falls back without a trainable model, with a warning.
  CHECK(!report["warnings"].empty());
  CHECK(fs::exists(dir / "mgee.csv"));
  const std::string curve = testsupport::read_file(dir / "mgee.csv");
  CHECK(curve.rfind("a,G,dG_da", 0) == 0);
}

TEST_CASE("cli augment exports a CSV with source indices") {
  auto dir = testsupport::temp_dir("cliaug");
  Dataset ds = testsupport::make_blobs(30, 2, 3, 0.4, 4.0, 94);
  const std::string data = csv_path(dir, "blobs.csv", ds);
  const fs::path out_csv = dir / "aug.csv";
  CHECK(cli::run_command({"augment", "--data", data, "--label", "label",
                          "--header", "--gen", "jitter", "--gen-sigma", "0.1",
                          "--n", "25", "--out-csv", out_csv.string(), "--out",
                          (dir / "aug.json").string()}) == 0);
  const std::string text = testsupport::read_file(out_csv);
  CHECK(text.find("source_index") != std::string::npos);
  const nlohmann::json report = read_json(dir / "aug.json");
  CHECK(report["payload"]["rows"] == 25);
}

TEST_CASE("cli sweep and report round trip") {
  auto dir = testsupport::temp_dir("clisweep");
  Dataset ds = testsupport::make_blobs(30, 3, 2, 1.0, 2.5, 95);
  const std::string data = csv_path(dir, "blobs.csv", ds);
  const fs::path out = dir / "sweep.json";
  CHECK(cli::run_command({"sweep", "--data", data, "--label", "label",
                          "--header", "--model", "logistic", "--epochs", "60",
                          "--gen", "jitter", "--gen-sigma", "0.2", "--grid",
                          "0,30", "--repeats", "2", "--seed", "11", "--out",
                          out.string()}) == 0);
  const nlohmann::json report = read_json(out);
  CHECK(report["payload"].contains("ground_truth"));
  CHECK(report["payload"]["cells"].size() == 2);

  // report subcommand validates and re-emits canonically.
  const fs::path reemit = dir / "reemit.json";
  CHECK(cli::run_command({"report", "--in", out.string(), "--out",
                          reemit.string(), "--csv", "--csv-path",
                          (dir / "cells.csv").string()}) == 0);
  CHECK(testsupport::read_file(out) == testsupport::read_file(reemit));
  CHECK(fs::exists(dir / "cells.csv"));

  // Malformed reports are rejected as data errors.
  testsupport::write_file(dir / "broken.json", "{\"schema\": 1}");
  CHECK(cli::run_command({"report", "--in", (dir / "broken.json").string()}) == 2);
}
