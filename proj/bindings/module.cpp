#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "augsize/cli.hpp"
#include "augsize/icd.hpp"
#include "augsize/infotheory.hpp"
#include "augsize/itle.hpp"
#include "augsize/mgee.hpp"
#include "augsize/modeling.hpp"
#include "augsize/report.hpp"

namespace py = pybind11;
using namespace augsize;

namespace {

KsgConfig make_ksg(int k) {
  KsgConfig cfg;
  cfg.k = k;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal sample size estimation for data augmentation";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "AugsizeError");

  m.def("digamma", &digamma, py::arg("x"));

  m.def(
      "ksg_mi",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int k) {
        const MiEstimate e = ksg_mi(x, y, make_ksg(k));
        return py::make_tuple(e.value, e.raw);
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5,
      "KSG mutual information between continuous X and Y; returns (value, raw)");

  m.def(
      "ksg_mi_labels",
      [](const Eigen::MatrixXd& x, const std::vector<int>& y, int k) {
        const MiEstimate e = ksg_mi(x, y, make_ksg(k));
        return py::make_tuple(e.value, e.raw);
      },
      py::arg("x"), py::arg("labels"), py::arg("k") = 5,
      "Mixed discrete-continuous KSG variant for categorical labels");

  m.def(
      "bootstrap_mi_lower_bound",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int k,
         int replicates, double percentile, std::uint64_t seed) {
        BootstrapConfig boot;
        boot.replicates = replicates;
        boot.percentile = percentile;
        boot.seed = seed;
        const BootstrapResult r = bootstrap_lower_bound(x, y, make_ksg(k), boot);
        return py::make_tuple(r.lower_bound, r.replicates);
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5, py::arg("replicates") = 200,
      py::arg("percentile") = 5.0, py::arg("seed") = 0);

  m.def("discrete_entropy", &discrete_entropy, py::arg("labels"));
  m.def("minmax_normalize", &minmax_normalize, py::arg("x"));

  m.def(
      "pca_fit_transform",
      [](const Eigen::MatrixXd& x, int q) {
        const PcaModel model = fit_pca(x, q);
        return py::make_tuple(model.project(x), model.explained);
      },
      py::arg("x"), py::arg("q"),
      "Returns (projected, explained_variance_fractions)");

  m.def(
      "fano_floor",
      [](double h_y, double i_lb, int n_classes) {
        return fano_floor(h_y, i_lb, n_classes);
      },
      py::arg("h_y"), py::arg("i_lb"), py::arg("n_classes"));
  m.def("information_gap", &information_gap, py::arg("e_test"), py::arg("p_e_lb"));

  m.def(
      "invert_generalization_bound",
      [](double kappa, double compensation, double delta, double gamma) {
        BoundConfig cfg;
        cfg.compensation = compensation;
        cfg.delta = delta;
        cfg.gamma = gamma;
        return invert_generalization_bound(kappa, cfg);
      },
      py::arg("kappa"), py::arg("compensation") = 1.0, py::arg("delta") = 0.05,
      py::arg("gamma") = 0.03);

  m.def(
      "itle_interval",
      [](double bias, double n_eff, long n_train, double alpha, double rho) {
        const OssInterval i = itle_interval(bias, n_eff, n_train, alpha, rho);
        return py::make_tuple(i.lower, i.upper, i.saturated);
      },
      py::arg("bias"), py::arg("n_eff"), py::arg("n_train"), py::arg("alpha"),
      py::arg("rho"), "Returns (lower, upper, saturated)");

  m.def("scale_complexity", &scale_complexity, py::arg("r_hat"), py::arg("n_train"));

  m.def(
      "pac_bayes_complexity",
      [](const Eigen::VectorXd& means, const Eigen::VectorXd& stds,
         double prior_std) {
        PacBayesPosterior post;
        post.means = means;
        post.stds = stds;
        post.prior_std = prior_std;
        return pac_bayes_complexity(post);
      },
      py::arg("means"), py::arg("stds"), py::arg("prior_std") = 1.0);

  m.def("effective_sample_size", &effective_sample_size, py::arg("a"),
        py::arg("rho"), py::arg("n_train"));
  m.def("generalization_value", &generalization_value, py::arg("a_pb"),
        py::arg("n_eff"));
  m.def("derivative_g", &derivative_g, py::arg("a"), py::arg("a_pb"),
        py::arg("rho"), py::arg("n_train"));

  m.def(
      "saturation_ratio",
      [](double a_pb, double rho, double n_train, double iota, double a_max) {
        MgeeConfig cfg;
        cfg.iota = iota;
        cfg.a_max = a_max;
        const SaturationResult r = saturation_ratio(a_pb, rho, n_train, cfg);
        return py::make_tuple(r.a_star, r.ceiling_hit);
      },
      py::arg("a_pb"), py::arg("rho"), py::arg("n_train"),
      py::arg("iota") = 1e-3, py::arg("a_max") = 50.0,
      "Returns (a_star, ceiling_hit)");

  m.def(
      "beta_correction",
      [](double a_pb, long param_count, double rho,
         const std::vector<double>& errors, double c1, double c2, double c3) {
        MgeeConfig cfg;
        cfg.c1 = c1;
        cfg.c2 = c2;
        cfg.c3 = c3;
        const BetaBreakdown b = beta_correction(a_pb, param_count, rho, errors, cfg);
        py::dict out;
        out["beta_pac"] = b.beta_pac;
        out["beta_rho"] = b.beta_rho;
        out["beta_emp"] = b.beta_emp;
        out["beta"] = b.beta;
        return out;
      },
      py::arg("a_pb"), py::arg("param_count"), py::arg("rho"), py::arg("errors"),
      py::arg("c1") = 0.05, py::arg("c2") = 0.25, py::arg("c3") = 0.5);

  m.def(
      "mgee_interval",
      [](long n_train, double a_star, double beta) {
        const OssInterval i = mgee_interval(n_train, a_star, beta);
        return py::make_tuple(i.lower, i.upper, i.saturated);
      },
      py::arg("n_train"), py::arg("a_star"), py::arg("beta"),
      "Returns (lower, upper, saturated)");

  m.def("reference_quantile", &reference_quantile, py::arg("n"));
  m.def("snap_true", &snap_true, py::arg("n_true_raw"), py::arg("q"));

  m.def(
      "icd_score",
      [](long lower, long upper, long n_true, long q) {
        OssInterval interval;
        interval.lower = lower;
        interval.upper = upper;
        const IcdScore s = icd_score(interval, n_true, q);
        return py::make_tuple(s.cov, s.dev);
      },
      py::arg("lower"), py::arg("upper"), py::arg("n_true"), py::arg("q"),
      "Returns (cov, dev)");

  m.def("run_command", &cli::run_command, py::arg("args"),
        "Run a CLI subcommand; returns the process exit code");
}
