#include "augsize/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <sstream>

#include "augsize/dataset.hpp"
#include "augsize/generators.hpp"
#include "augsize/icd.hpp"
#include "augsize/infotheory.hpp"
#include "augsize/itle.hpp"
#include "augsize/mgee.hpp"
#include "augsize/modeling.hpp"
#include "augsize/report.hpp"
#include "augsize/rng.hpp"
#include "augsize/sweep.hpp"
#include "augsize/util.hpp"

namespace augsize::cli {

namespace {

using nlohmann::ordered_json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::invalid_argument:
      return 1;
    case errc::missing_file:
    case errc::empty_input:
    case errc::ragged_row:
    case errc::parse_error:
    case errc::unknown_label_column:
    case errc::empty_partition:
    case errc::class_missing:
    case errc::schema_violation:
    case errc::inconsistent_kappa:
    case errc::missing_field:
    case errc::io_error:
      return 2;
    default:
      return 3;
  }
}

Task task_from(const std::string& name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  throw Error(errc::invalid_argument, "unknown task '" + name + "'");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stol(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

struct DataOpts {
  std::string path;
  std::string label = "-1";
  std::string task = "classification";
  bool header = false;
};

struct SplitOpts {
  double test_fraction = 0.25;
  std::string test_file;
  double val_train = 7.0;
  double val_val = 2.0;
};

struct ModelOpts {
  std::string model = "logistic";
  std::string hidden = "16";
  double lr = 1e-2;
  int epochs = 200;
  int patience = 20;
  double l2 = 0.0;
  double norm_bound = 1.0;
  int rademacher_iters = 20;
  int rademacher_epochs = 60;
  std::string lr_grid;
  std::string l2_grid;
  std::string probes;
};

struct GenOpts {
  std::string kind = "jitter";
  double sigma = 0.1;
  double scale = 0.1;
  double strength = 0.2;
  int knots = 4;
  double weight = -1.0;  // negative means "draw at random"
  std::string data;      // external generated data CSV
  long params_count = -1;
  long n = -1;  // generated rows used for rho; default: train size
};

struct KsgOpts {
  int k = 5;
  int bootstrap = 200;
  double percentile = 5.0;
  int resample = 0;
};

struct RhoOpts {
  int pca_dims = 3;
  int bins = 8;
  double epsilon = 1e-10;
  double tau = 1e6;
  std::string pairing = "source";
};

struct BoundOpts {
  double compensation = 1.0;
  double delta = 0.05;
  double gamma = 0.03;
};

struct MgeeOpts {
  double iota = 1e-3;
  double a_max = 50.0;
  double grid_step = 1e-3;
  double c1 = 0.05;
  double c2 = 0.25;
  double c3 = 0.5;
  int beta_repeats = 5;
  int window = 20;
  double prior_std = 1.0;
};

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out = "-";
  bool csv = false;
  std::string csv_path;
  int threads = 0;
  bool timing = false;
};

void add_data_flags(CLI::App* sub, DataOpts& d, const char* default_task) {
  d.task = default_task;
  sub->add_option("--data", d.path, "Input CSV (features + one label column)")
      ->required();
  sub->add_option("--label", d.label,
                  "Label column: header name or integer index (negative from the end)")
      ->capture_default_str();
  sub->add_option("--task", d.task, "classification or regression")
      ->capture_default_str();
  sub->add_flag("--header", d.header, "First CSV row is a header");
}

void add_split_flags(CLI::App* sub, SplitOpts& s) {
  sub->add_option("--test-fraction", s.test_fraction,
                  "Fraction of rows carved out as the test set")
      ->capture_default_str();
  sub->add_option("--test-file", s.test_file,
                  "Separate test CSV (overrides --test-fraction)");
  sub->add_option("--val-train", s.val_train, "Train share of the train:val ratio")
      ->capture_default_str();
  sub->add_option("--val-val", s.val_val, "Val share of the train:val ratio")
      ->capture_default_str();
}

void add_model_flags(CLI::App* sub, ModelOpts& m) {
  sub->add_option("--model", m.model, "logistic | linear | ridge | mlp")
      ->capture_default_str();
  sub->add_option("--hidden", m.hidden, "MLP hidden sizes, comma separated")
      ->capture_default_str();
  sub->add_option("--lr", m.lr, "Learning rate")->capture_default_str();
  sub->add_option("--epochs", m.epochs, "Training epoch cap")->capture_default_str();
  sub->add_option("--patience", m.patience, "Early-stopping patience")
      ->capture_default_str();
  sub->add_option("--l2", m.l2, "L2 penalty")->capture_default_str();
  sub->add_option("--norm-bound", m.norm_bound,
                  "Norm bound B of the linear family")
      ->capture_default_str();
  sub->add_option("--rademacher-iters", m.rademacher_iters,
                  "Sign-vector iterations M")
      ->capture_default_str();
  sub->add_option("--rademacher-epochs", m.rademacher_epochs,
                  "Training budget per sign-fitting replicate")
      ->capture_default_str();
  sub->add_option("--lr-grid", m.lr_grid, "Grid-search learning rates, comma separated");
  sub->add_option("--l2-grid", m.l2_grid, "Grid-search L2 penalties, comma separated");
  sub->add_option("--probes", m.probes,
                  "Import externally computed model probes (JSON)");
}

void add_gen_flags(CLI::App* sub, GenOpts& g) {
  sub->add_option("--gen", g.kind,
                  "jitter | scale | warp | interpolate | class-gaussian | "
                  "class-kde | external")
      ->capture_default_str();
  sub->add_option("--gen-sigma", g.sigma, "Jitter noise scale (per column std)")
      ->capture_default_str();
  sub->add_option("--gen-scale", g.scale, "Scale span s: factor in [1-s, 1+s]")
      ->capture_default_str();
  sub->add_option("--gen-strength", g.strength, "Warp speed perturbation")
      ->capture_default_str();
  sub->add_option("--gen-knots", g.knots, "Warp knot count")->capture_default_str();
  sub->add_option("--gen-weight", g.weight,
                  "Fixed interpolation weight in (0, 1); omit to draw at random");
  sub->add_option("--gen-data", g.data, "External generated data CSV");
  sub->add_option("--gen-params-count", g.params_count,
                  "Declared parameter count of an external generator");
  sub->add_option("--gen-n", g.n, "Generated rows used for rho (default: train size)");
}

void add_ksg_flags(CLI::App* sub, KsgOpts& k) {
  sub->add_option("--k", k.k, "KSG neighborhood size")->capture_default_str();
  sub->add_option("--bootstrap", k.bootstrap, "Bootstrap replicate count B")
      ->capture_default_str();
  sub->add_option("--percentile", k.percentile, "Lower-bound percentile p")
      ->capture_default_str();
  sub->add_option("--resample-size", k.resample,
                  "Bootstrap resample size m (0 = n)")
      ->capture_default_str();
}

void add_rho_flags(CLI::App* sub, RhoOpts& r) {
  sub->add_option("--pca-dims", r.pca_dims, "PCA dimensions q for rho")
      ->capture_default_str();
  sub->add_option("--bins", r.bins, "Bins per dimension for discrete entropy")
      ->capture_default_str();
  sub->add_option("--epsilon", r.epsilon, "Stability term in the rho denominator")
      ->capture_default_str();
  sub->add_option("--tau", r.tau, "Generator complexity scaling factor")
      ->capture_default_str();
  sub->add_option("--pairing", r.pairing, "source | nearest")->capture_default_str();
}

void add_bound_flags(CLI::App* sub, BoundOpts& b) {
  sub->add_option("--compensation", b.compensation, "Bound compensation constant C")
      ->capture_default_str();
  sub->add_option("--delta", b.delta, "Confidence parameter delta")
      ->capture_default_str();
  sub->add_option("--gamma", b.gamma, "Target tolerance gamma")->capture_default_str();
}

void add_mgee_flags(CLI::App* sub, MgeeOpts& m) {
  sub->add_option("--iota", m.iota, "Derivative threshold iota")->capture_default_str();
  sub->add_option("--a-max", m.a_max, "Augmentation-ratio search ceiling")
      ->capture_default_str();
  sub->add_option("--grid-step", m.grid_step, "Curve/oracle grid step")
      ->capture_default_str();
  sub->add_option("--c1", m.c1, "beta_PAC constant")->capture_default_str();
  sub->add_option("--c2", m.c2, "beta_rho constant")->capture_default_str();
  sub->add_option("--c3", m.c3, "beta_emp constant")->capture_default_str();
  sub->add_option("--beta-repeats", m.beta_repeats,
                  "Repeated augmentation experiments behind beta_emp")
      ->capture_default_str();
  sub->add_option("--window", m.window, "Posterior snapshot window")
      ->capture_default_str();
  sub->add_option("--prior-std", m.prior_std, "PAC-Bayes prior std")
      ->capture_default_str();
}

void add_common_flags(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--out", c.out, "Report path ('-' = stdout)")->capture_default_str();
  sub->add_flag("--csv", c.csv, "Write a companion CSV beside the JSON report");
  sub->add_option("--csv-path", c.csv_path, "Explicit companion CSV path");
  sub->add_option("--threads", c.threads, "Worker thread cap (0 = hardware)")
      ->capture_default_str();
  sub->add_flag("--timing", c.timing,
                "Record wall-clock duration in the report (breaks byte-identity)");
}

Dataset load_data(const DataOpts& d) {
  TableSchema schema;
  schema.label_column = d.label;
  schema.task = task_from(d.task);
  schema.has_header = d.header;
  return load_table(d.path, schema);
}

SplitPolicy make_policy(const SplitOpts& s, const DataOpts& d) {
  SplitPolicy policy;
  policy.test_fraction = s.test_fraction;
  policy.val_ratio_train = s.val_train;
  policy.val_ratio_val = s.val_val;
  if (!s.test_file.empty()) {
    TableSchema schema;
    schema.label_column = d.label;
    schema.task = task_from(d.task);
    schema.has_header = d.header;
    policy.external_test = load_table(s.test_file, schema);
  }
  return policy;
}

ModelSpec make_model_spec(const ModelOpts& m, Task task) {
  ModelSpec spec;
  spec.kind = model_kind_from(m.model);
  spec.hidden = parse_int_list(m.hidden);
  spec.learning_rate = m.lr;
  spec.max_epochs = m.epochs;
  spec.patience = m.patience;
  spec.l2 = m.l2;
  if (spec.kind == ModelKind::ridge && spec.l2 == 0.0) spec.l2 = 1e-2;
  spec.norm_bound = m.norm_bound;
  spec.loss = task == Task::classification ? LossKind::cross_entropy : LossKind::mse;
  if (!m.lr_grid.empty()) spec.lr_grid = parse_double_list(m.lr_grid);
  if (!m.l2_grid.empty()) spec.l2_grid = parse_double_list(m.l2_grid);
  spec.rademacher_epochs = m.rademacher_epochs;
  return spec;
}

GeneratorSpec make_generator_spec(const GenOpts& g, std::uint64_t master_seed) {
  GeneratorSpec spec;
  spec.kind = generator_kind_from(g.kind);
  spec.seed = derive_seed(master_seed, "generator");
  switch (spec.kind) {
    case GeneratorKind::jitter:
      spec.params["sigma"] = g.sigma;
      break;
    case GeneratorKind::scale:
      spec.params["scale"] = g.scale;
      break;
    case GeneratorKind::warp:
      spec.params["strength"] = g.strength;
      spec.params["knots"] = g.knots;
      break;
    case GeneratorKind::interpolate:
      if (g.weight >= 0) spec.params["weight"] = g.weight;
      break;
    case GeneratorKind::external:
      if (g.params_count < 0)
        throw Error(errc::invalid_argument,
                    "external generators need --gen-params-count");
      spec.param_count = g.params_count;
      break;
    default:
      break;
  }
  return spec;
}

// Generated rows for the rho pipeline: either imported or drawn here.
AugmentedSet make_augmented(const GenOpts& g, const GeneratorSpec& spec,
                            const Dataset& train) {
  if (!g.data.empty())
    return import_augmented_csv(g.data, train, g.params_count, true);
  if (spec.kind == GeneratorKind::external)
    throw Error(errc::invalid_argument, "external generators need --gen-data");
  const long n = g.n > 0 ? g.n : static_cast<long>(train.n());
  return generate(train, spec, n);
}

Pairing pairing_from(const std::string& name) {
  if (name == "source") return Pairing::source_paired;
  if (name == "nearest") return Pairing::nearest_same_class;
  throw Error(errc::invalid_argument, "unknown pairing '" + name + "'");
}

ordered_json warnings_json(const WarningList& warnings) {
  ordered_json arr = ordered_json::array();
  for (const Warning& w : warnings)
    arr.push_back({{"code", w.code}, {"message", w.message}});
  return arr;
}

ordered_json split_manifest(const SplitDataset& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["train"] = s.train_idx;
  j["val"] = s.val_idx;
  j["test"] = s.test_idx;
  return j;
}

ordered_json data_config(const DataOpts& d) {
  return {{"data", d.path}, {"label", d.label}, {"task", d.task}, {"header", d.header}};
}

ordered_json ksg_config(const KsgOpts& k) {
  return {{"k", k.k},
          {"bootstrap", k.bootstrap},
          {"percentile", k.percentile},
          {"resample_size", k.resample}};
}

ordered_json rho_config(const RhoOpts& r) {
  return {{"pca_dims", r.pca_dims},
          {"bins", r.bins},
          {"epsilon", r.epsilon},
          {"tau", r.tau},
          {"pairing", r.pairing}};
}

ordered_json gen_config(const GenOpts& g) {
  ordered_json j{{"gen", g.kind}};
  if (g.kind == "jitter") j["sigma"] = g.sigma;
  if (g.kind == "scale") j["scale"] = g.scale;
  if (g.kind == "warp") {
    j["strength"] = g.strength;
    j["knots"] = g.knots;
  }
  if (g.kind == "interpolate" && g.weight >= 0) j["weight"] = g.weight;
  if (!g.data.empty()) j["gen_data"] = g.data;
  if (g.params_count >= 0) j["gen_params_count"] = g.params_count;
  if (g.n > 0) j["gen_n"] = g.n;
  return j;
}

ordered_json model_config(const ModelOpts& m) {
  if (!m.probes.empty()) return {{"probes", m.probes}};
  ordered_json j{{"model", m.model},           {"hidden", m.hidden},
                 {"lr", m.lr},                 {"epochs", m.epochs},
                 {"patience", m.patience},     {"l2", m.l2},
                 {"norm_bound", m.norm_bound}, {"rademacher_iters", m.rademacher_iters},
                 {"rademacher_epochs", m.rademacher_epochs}};
  if (!m.lr_grid.empty()) j["lr_grid"] = m.lr_grid;
  if (!m.l2_grid.empty()) j["l2_grid"] = m.l2_grid;
  return j;
}

std::string companion_csv_path(const CommonOpts& c) {
  if (!c.csv_path.empty()) return c.csv_path;
  if (c.out == "-" || c.out.empty())
    throw Error(errc::invalid_argument,
                "--csv with stdout output needs --csv-path");
  const std::size_t dot = c.out.find_last_of('.');
  return dot == std::string::npos ? c.out + ".csv" : c.out.substr(0, dot) + ".csv";
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Optimal sample size estimation for data augmentation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file with key=value lines; flags win");
  app.get_config_formatter_base()->comment('#');

  DataOpts data;
  SplitOpts split_opts;
  ModelOpts model_opts;
  GenOpts gen_opts;
  KsgOpts ksg_opts;
  RhoOpts rho_opts;
  BoundOpts bound_opts;
  MgeeOpts mgee_opts;
  CommonOpts common;

  // itle
  CLI::App* itle_cmd = app.add_subcommand(
      "itle", "Classification OSS interval (extended augmentation)");
  add_data_flags(itle_cmd, data, "classification");
  add_split_flags(itle_cmd, split_opts);
  add_model_flags(itle_cmd, model_opts);
  add_gen_flags(itle_cmd, gen_opts);
  add_ksg_flags(itle_cmd, ksg_opts);
  add_rho_flags(itle_cmd, rho_opts);
  add_bound_flags(itle_cmd, bound_opts);
  add_common_flags(itle_cmd, common);

  // mgee
  CLI::App* mgee_cmd = app.add_subcommand(
      "mgee", "Regression OSS interval (non-extended augmentation)");
  DataOpts mgee_data;
  ModelOpts mgee_model;
  GenOpts mgee_gen;
  KsgOpts mgee_ksg;
  RhoOpts mgee_rho;
  SplitOpts mgee_split;
  add_data_flags(mgee_cmd, mgee_data, "regression");
  add_split_flags(mgee_cmd, mgee_split);
  add_model_flags(mgee_cmd, mgee_model);
  add_gen_flags(mgee_cmd, mgee_gen);
  add_ksg_flags(mgee_cmd, mgee_ksg);
  add_rho_flags(mgee_cmd, mgee_rho);
  add_mgee_flags(mgee_cmd, mgee_opts);
  CommonOpts mgee_common;
  add_common_flags(mgee_cmd, mgee_common);

  // icd
  CLI::App* icd_cmd = app.add_subcommand("icd", "Score an OSS interval against the ground truth");
  std::vector<long> icd_interval;
  long icd_true = 0;
  long icd_n = 0;
  icd_cmd->add_option("--interval", icd_interval, "OSS interval: lower upper")
      ->expected(2)
      ->required();
  icd_cmd->add_option("--true", icd_true, "Raw ground-truth augmented count")
      ->required();
  icd_cmd->add_option("--n", icd_n, "Dataset sample size behind Q(N)")->required();
  CommonOpts icd_common;
  add_common_flags(icd_cmd, icd_common);

  // mi
  CLI::App* mi_cmd = app.add_subcommand("mi", "KSG mutual information and bootstrap lower bound");
  DataOpts mi_data;
  KsgOpts mi_ksg;
  add_data_flags(mi_cmd, mi_data, "classification");
  add_ksg_flags(mi_cmd, mi_ksg);
  CommonOpts mi_common;
  add_common_flags(mi_cmd, mi_common);

  // rho
  CLI::App* rho_cmd = app.add_subcommand("rho", "Information contribution ratio of a generator");
  DataOpts rho_data;
  GenOpts rho_gen;
  KsgOpts rho_ksg;
  RhoOpts rho_rho;
  add_data_flags(rho_cmd, rho_data, "classification");
  add_gen_flags(rho_cmd, rho_gen);
  add_ksg_flags(rho_cmd, rho_ksg);
  add_rho_flags(rho_cmd, rho_rho);
  CommonOpts rho_common;
  add_common_flags(rho_cmd, rho_common);

  // augment
  CLI::App* aug_cmd = app.add_subcommand("augment", "Generate augmented samples to CSV");
  DataOpts aug_data;
  GenOpts aug_gen;
  long aug_n = 0;
  std::string aug_out_csv;
  add_data_flags(aug_cmd, aug_data, "classification");
  add_gen_flags(aug_cmd, aug_gen);
  aug_cmd->add_option("--n", aug_n, "Rows to generate")->required();
  aug_cmd->add_option("--out-csv", aug_out_csv, "Generated data CSV path")->required();
  CommonOpts aug_common;
  add_common_flags(aug_cmd, aug_common);

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Exhaustive-search baseline over augmented sample sizes");
  DataOpts sweep_data;
  SplitOpts sweep_split;
  ModelOpts sweep_model;
  GenOpts sweep_gen;
  std::string sweep_grid;
  int sweep_repeats = 3;
  add_data_flags(sweep_cmd, sweep_data, "classification");
  add_split_flags(sweep_cmd, sweep_split);
  add_model_flags(sweep_cmd, sweep_model);
  add_gen_flags(sweep_cmd, sweep_gen);
  sweep_cmd->add_option("--grid", sweep_grid,
                        "Comma-separated sizes (default 0..7Q from n_train)");
  sweep_cmd->add_option("--repeats", sweep_repeats, "Repeats per size")
      ->capture_default_str();
  CommonOpts sweep_common;
  add_common_flags(sweep_cmd, sweep_common);

  // report
  CLI::App* report_cmd =
      app.add_subcommand("report", "Validate, summarize and re-emit a report");
  std::string report_in;
  report_cmd->add_option("--in", report_in, "Report JSON to read")->required();
  CommonOpts report_common;
  add_common_flags(report_cmd, report_common);

  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    Timer timer;
    if (itle_cmd->parsed()) {
      set_thread_cap(common.threads);
      if (!model_opts.probes.empty() && itle_cmd->count("--model") > 0)
        throw Error(errc::invalid_argument, "give either --model or --probes, not both");
      const Dataset ds = load_data(data);
      const SplitDataset sd = split(ds, make_policy(split_opts, data),
                                    derive_seed(common.seed, "split"));
      const GeneratorSpec gen = make_generator_spec(gen_opts, common.seed);
      const AugmentedSet aug = make_augmented(gen_opts, gen, sd.train());
      ItleConfig cfg;
      cfg.ksg.k = ksg_opts.k;
      cfg.boot.replicates = ksg_opts.bootstrap;
      cfg.boot.percentile = ksg_opts.percentile;
      cfg.boot.resample_size = ksg_opts.resample;
      cfg.rho.pca_dims = rho_opts.pca_dims;
      cfg.rho.bins = rho_opts.bins;
      cfg.rho.epsilon = rho_opts.epsilon;
      cfg.rho.tau = rho_opts.tau;
      cfg.rho.pairing = pairing_from(rho_opts.pairing);
      cfg.bound.compensation = bound_opts.compensation;
      cfg.bound.delta = bound_opts.delta;
      cfg.bound.gamma = bound_opts.gamma;
      cfg.rademacher_iterations = model_opts.rademacher_iters;
      ModelInput model_input;
      if (!model_opts.probes.empty())
        model_input = import_probes(model_opts.probes);
      else
        model_input = make_model_spec(model_opts, Task::classification);
      const ItleReport result =
          run_itle(sd, model_input, aug, aug.spec, cfg, common.seed);
      ordered_json config = data_config(data);
      config.update(ordered_json{{"seed", common.seed},
                                 {"test_fraction", split_opts.test_fraction},
                                 {"val_train", split_opts.val_train},
                                 {"val_val", split_opts.val_val}});
      config["model"] = model_config(model_opts);
      config["generator"] = gen_config(gen_opts);
      config["ksg"] = ksg_config(ksg_opts);
      config["rho"] = rho_config(rho_opts);
      config["bound"] = {{"compensation", bound_opts.compensation},
                         {"delta", bound_opts.delta},
                         {"gamma", bound_opts.gamma}};
      ordered_json payload = result.to_json();
      payload["split"] = split_manifest(sd);
      emit_report(make_run_report("itle", config, payload,
                                  warnings_json(result.warnings),
                                  common.timing ? timer.seconds() : -1.0),
                  common.out);
      return 0;
    }

    if (mgee_cmd->parsed()) {
      set_thread_cap(mgee_common.threads);
      if (!mgee_model.probes.empty() && mgee_cmd->count("--model") > 0)
        throw Error(errc::invalid_argument, "give either --model or --probes, not both");
      if (mgee_model.probes.empty() && mgee_cmd->count("--model") == 0)
        mgee_model.model = "linear";
      const Dataset ds = load_data(mgee_data);
      const SplitDataset sd = split(ds, make_policy(mgee_split, mgee_data),
                                    derive_seed(mgee_common.seed, "split"));
      const GeneratorSpec gen = make_generator_spec(mgee_gen, mgee_common.seed);
      const AugmentedSet aug = make_augmented(mgee_gen, gen, sd.train());
      MgeeConfig cfg;
      cfg.iota = mgee_opts.iota;
      cfg.a_max = mgee_opts.a_max;
      cfg.grid_step = mgee_opts.grid_step;
      cfg.c1 = mgee_opts.c1;
      cfg.c2 = mgee_opts.c2;
      cfg.c3 = mgee_opts.c3;
      cfg.beta_repeats = mgee_opts.beta_repeats;
      cfg.posterior_window = mgee_opts.window;
      cfg.prior_std = mgee_opts.prior_std;
      KsgConfig ksg;
      ksg.k = mgee_ksg.k;
      RhoConfig rho_cfg;
      rho_cfg.pca_dims = mgee_rho.pca_dims;
      rho_cfg.bins = mgee_rho.bins;
      rho_cfg.epsilon = mgee_rho.epsilon;
      rho_cfg.tau = mgee_rho.tau;
      rho_cfg.pairing = pairing_from(mgee_rho.pairing);
      ModelInput model_input;
      if (!mgee_model.probes.empty())
        model_input = import_probes(mgee_model.probes);
      else
        model_input = make_model_spec(mgee_model, Task::regression);
      const MgeeReport result =
          run_mgee(sd, model_input, aug, aug.spec, cfg, ksg, rho_cfg, mgee_common.seed);
      ordered_json config = data_config(mgee_data);
      config.update(ordered_json{{"seed", mgee_common.seed},
                                 {"test_fraction", mgee_split.test_fraction},
                                 {"val_train", mgee_split.val_train},
                                 {"val_val", mgee_split.val_val}});
      config["model"] = model_config(mgee_model);
      config["generator"] = gen_config(mgee_gen);
      config["ksg"] = ksg_config(mgee_ksg);
      config["rho"] = rho_config(mgee_rho);
      config["mgee"] = {{"iota", mgee_opts.iota},
                        {"a_max", mgee_opts.a_max},
                        {"grid_step", mgee_opts.grid_step},
                        {"c1", mgee_opts.c1},
                        {"c2", mgee_opts.c2},
                        {"c3", mgee_opts.c3},
                        {"beta_repeats", mgee_opts.beta_repeats},
                        {"window", mgee_opts.window},
                        {"prior_std", mgee_opts.prior_std}};
      ordered_json payload = result.to_json();
      payload["split"] = split_manifest(sd);
      emit_report(make_run_report("mgee", config, payload,
                                  warnings_json(result.warnings),
                                  mgee_common.timing ? timer.seconds() : -1.0),
                  mgee_common.out);
      if (mgee_common.csv)
        write_text_file(companion_csv_path(mgee_common), result.curve_csv());
      return 0;
    }

    if (icd_cmd->parsed()) {
      const long q = reference_quantile(icd_n);
      const long n_true = snap_true(icd_true, q);
      OssInterval interval;
      interval.lower = icd_interval[0];
      interval.upper = icd_interval[1];
      const IcdScore score = icd_score(interval, n_true, q);
      ordered_json config{{"interval", icd_interval},
                          {"true", icd_true},
                          {"n", icd_n},
                          {"seed", icd_common.seed}};
      emit_report(make_run_report("icd", config, score.to_json(),
                                  ordered_json::array(),
                                  icd_common.timing ? timer.seconds() : -1.0),
                  icd_common.out);
      return 0;
    }

    if (mi_cmd->parsed()) {
      set_thread_cap(mi_common.threads);
      const Dataset ds = load_data(mi_data);
      KsgConfig ksg;
      ksg.k = mi_ksg.k;
      WarningList warnings;
      MiEstimate estimate;
      BootstrapResult lb;
      const bool with_bootstrap = mi_ksg.bootstrap >= 2;
      if (ds.task == Task::classification) {
        estimate = ksg_mi(ds.features, ds.class_labels, ksg, &warnings);
      } else {
        Eigen::MatrixXd y = ds.targets;
        estimate = ksg_mi(ds.features, y, ksg);
      }
      if (with_bootstrap) {
        BootstrapConfig boot;
        boot.replicates = mi_ksg.bootstrap;
        boot.percentile = mi_ksg.percentile;
        boot.resample_size = mi_ksg.resample;
        boot.seed = derive_seed(mi_common.seed, "mi.bootstrap");
        if (ds.task == Task::classification)
          lb = bootstrap_lower_bound(ds.features, ds.class_labels, ksg, boot,
                                     &warnings);
        else {
          Eigen::MatrixXd y = ds.targets;
          lb = bootstrap_lower_bound(ds.features, y, ksg, boot, &warnings);
        }
      }
      ordered_json config = data_config(mi_data);
      config.update(ksg_config(mi_ksg));
      config["seed"] = mi_common.seed;
      ordered_json payload{{"mi", estimate.value},
                           {"mi_raw", estimate.raw},
                           {"n", ds.n()},
                           {"k", mi_ksg.k}};
      if (with_bootstrap) {
        payload["I_lb"] = lb.lower_bound;
        payload["replicates"] = lb.replicates;
      }
      emit_report(make_run_report("mi", config, payload, warnings_json(warnings),
                                  mi_common.timing ? timer.seconds() : -1.0),
                  mi_common.out);
      return 0;
    }

    if (rho_cmd->parsed()) {
      set_thread_cap(rho_common.threads);
      const Dataset ds = load_data(rho_data);
      const GeneratorSpec gen = make_generator_spec(rho_gen, rho_common.seed);
      const AugmentedSet aug = make_augmented(rho_gen, gen, ds);
      KsgConfig ksg;
      ksg.k = rho_ksg.k;
      RhoConfig cfg;
      cfg.pca_dims = rho_rho.pca_dims;
      cfg.bins = rho_rho.bins;
      cfg.epsilon = rho_rho.epsilon;
      cfg.tau = rho_rho.tau;
      cfg.pairing = pairing_from(rho_rho.pairing);
      WarningList warnings;
      const RhoResult result =
          info_contribution_ratio(ds, aug, aug.spec, cfg, ksg, &warnings);
      ordered_json config = data_config(rho_data);
      config["generator"] = gen_config(rho_gen);
      config["ksg"] = ksg_config(rho_ksg);
      config.update(rho_config(rho_rho));
      config["seed"] = rho_common.seed;
      ordered_json payload{{"rho", result.rho},
                           {"raw", result.raw},
                           {"xi", result.xi},
                           {"param_count", result.param_count},
                           {"cond_mi", result.cond_mi},
                           {"cond_entropy", result.cond_entropy}};
      emit_report(make_run_report("rho", config, payload, warnings_json(warnings),
                                  rho_common.timing ? timer.seconds() : -1.0),
                  rho_common.out);
      return 0;
    }

    if (aug_cmd->parsed()) {
      set_thread_cap(aug_common.threads);
      const Dataset ds = load_data(aug_data);
      const GeneratorSpec gen = make_generator_spec(aug_gen, aug_common.seed);
      AugmentedSet set;
      if (!aug_gen.data.empty())
        set = import_augmented_csv(aug_gen.data, ds, aug_gen.params_count, true);
      else
        set = generate(ds, gen, aug_n);
      export_augmented_csv(set, aug_out_csv);
      ordered_json config = data_config(aug_data);
      config["generator"] = gen_config(aug_gen);
      config["n"] = aug_n;
      config["seed"] = aug_common.seed;
      ordered_json payload{{"rows", set.n()},
                           {"param_count", set.spec.param_count},
                           {"out_csv", aug_out_csv}};
      emit_report(make_run_report("augment", config, payload,
                                  ordered_json::array(),
                                  aug_common.timing ? timer.seconds() : -1.0),
                  aug_common.out);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      set_thread_cap(sweep_common.threads);
      const Dataset ds = load_data(sweep_data);
      const SplitDataset sd = split(ds, make_policy(sweep_split, sweep_data),
                                    derive_seed(sweep_common.seed, "split"));
      if (sweep_model.probes.empty() && sweep_cmd->count("--model") == 0 &&
          ds.task == Task::regression)
        sweep_model.model = "linear";
      const ModelSpec spec = make_model_spec(sweep_model, ds.task);
      const GeneratorSpec gen = make_generator_spec(sweep_gen, sweep_common.seed);
      std::vector<long> grid = sweep_grid.empty() ? default_grid(sd.n_train())
                                                  : parse_long_list(sweep_grid);
      const SweepCurve curve = exhaustive_sweep(sd, spec, gen, grid, sweep_repeats,
                                                sweep_common.seed);
      const long truth = ground_truth(curve);
      ordered_json config = data_config(sweep_data);
      config["model"] = model_config(sweep_model);
      config["generator"] = gen_config(sweep_gen);
      config["repeats"] = sweep_repeats;
      config["seed"] = sweep_common.seed;
      ordered_json payload = curve.to_json();
      payload["ground_truth"] = truth;
      payload["split"] = split_manifest(sd);
      emit_report(make_run_report("sweep", config, payload,
                                  ordered_json::array(),
                                  sweep_common.timing ? timer.seconds() : -1.0),
                  sweep_common.out);
      if (sweep_common.csv)
        write_text_file(companion_csv_path(sweep_common), curve.to_csv());
      return 0;
    }

    if (report_cmd->parsed()) {
      ordered_json report = load_json(report_in);
      for (const char* key : {"schema", "tool", "command", "payload"})
        if (!report.contains(key))
          throw Error(errc::schema_violation,
                      std::string("report missing '") + key + "'");
      std::cerr << "command: " << report["command"] << "\n";
      if (report["payload"].contains("OSS"))
        std::cerr << "OSS: " << report["payload"]["OSS"] << "\n";
      if (report["payload"].contains("ground_truth"))
        std::cerr << "ground truth: " << report["payload"]["ground_truth"] << "\n";
      emit_report(report, report_common.out);
      if (report_common.csv) {
        const auto& payload = report["payload"];
        std::ostringstream csv;
        if (payload.contains("G_curve")) {
          csv << "a,G,dG_da\n";
          for (const auto& row : payload["G_curve"])
            csv << row["a"].dump() << "," << row["G"].dump() << ","
                << row["dG_da"].dump() << "\n";
        } else if (payload.contains("cells")) {
          csv << "size,mean,std\n";
          for (const auto& row : payload["cells"])
            csv << row["size"].dump() << "," << row["mean"].dump() << ","
                << row["std"].dump() << "\n";
        } else {
          throw Error(errc::invalid_argument, "report carries no curve to export");
        }
        write_text_file(companion_csv_path(report_common), csv.str());
      }
      return 0;
    }

    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace augsize::cli
