#include "augsize/modeling.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "augsize/rng.hpp"
#include "augsize/util.hpp"

namespace augsize {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::linear_logistic: return "logistic";
    case ModelKind::linear_regressor: return "linear";
    case ModelKind::ridge: return "ridge";
    case ModelKind::mlp: return "mlp";
  }
  return "unknown";
}

ModelKind model_kind_from(const std::string& name) {
  if (name == "logistic") return ModelKind::linear_logistic;
  if (name == "linear") return ModelKind::linear_regressor;
  if (name == "ridge") return ModelKind::ridge;
  if (name == "mlp") return ModelKind::mlp;
  throw Error(errc::invalid_argument, "unknown model kind '" + name + "'");
}

namespace {

constexpr int kSnapshotCap = 64;
constexpr double kStdFloor = 1e-6;

std::vector<Layer> init_layers(const std::vector<Eigen::Index>& dims,
                               std::uint64_t seed, bool zero_init) {
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights.resize(dims[l + 1], dims[l]);
    layer.bias = Eigen::VectorXd::Zero(dims[l + 1]);
    if (zero_init) {
      layer.weights.setZero();
    } else {
      Rng rng = Rng::derive(seed, "init", l);
      const double s =
          std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
          layer.weights(r, c) = rng.uniform(-s, s);
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

// Forward pass with ReLU between affine layers and a linear head.
Eigen::MatrixXd forward_layers(const std::vector<Layer>& layers,
                               const Eigen::MatrixXd& x,
                               std::vector<Eigen::MatrixXd>* activations) {
  Eigen::MatrixXd h = x;
  if (activations) activations->push_back(h);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    h = (h * layers[l].weights.transpose()).rowwise() +
        layers[l].bias.transpose();
    if (l + 1 < layers.size()) h = h.cwiseMax(0.0);
    if (activations) activations->push_back(h);
  }
  return h;
}

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;

  explicit AdamState(const std::vector<Layer>& layers) {
    for (const Layer& l : layers) {
      mw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      vw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      mb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
      vb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
  }
};

void adam_step(std::vector<Layer>& layers, const std::vector<Layer>& grads,
               AdamState& state, double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++state.t;
  const double c1 = 1.0 - std::pow(b1, state.t);
  const double c2 = 1.0 - std::pow(b2, state.t);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    state.mw[l] = b1 * state.mw[l] + (1 - b1) * grads[l].weights;
    state.vw[l] =
        b2 * state.vw[l].array() + (1 - b2) * grads[l].weights.array().square();
    layers[l].weights.array() -=
        lr * (state.mw[l].array() / c1) /
        ((state.vw[l].array() / c2).sqrt() + eps);
    state.mb[l] = b1 * state.mb[l] + (1 - b1) * grads[l].bias;
    state.vb[l] =
        b2 * state.vb[l].array() + (1 - b2) * grads[l].bias.array().square();
    layers[l].bias.array() -= lr * (state.mb[l].array() / c1) /
                              ((state.vb[l].array() / c2).sqrt() + eps);
  }
}

// Gradients for dLoss/dOutput already divided by the batch size.
std::vector<Layer> backward_layers(const std::vector<Layer>& layers,
                                   const std::vector<Eigen::MatrixXd>& acts,
                                   Eigen::MatrixXd delta, double l2) {
  std::vector<Layer> grads(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads[l].weights = delta.transpose() * acts[l];
    if (l2 > 0) grads[l].weights += l2 * layers[l].weights;
    grads[l].bias = delta.colwise().sum();
    if (l > 0) {
      delta = delta * layers[l].weights;
      delta.array() *= (acts[l].array() > 0.0).cast<double>();
    }
  }
  return grads;
}

double cross_entropy_loss(const Eigen::MatrixXd& logits,
                          const std::vector<int>& labels,
                          Eigen::MatrixXd* dlogits) {
  const Eigen::Index n = logits.rows();
  double loss = 0.0;
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double zmax = logits.row(i).maxCoeff();
    Eigen::RowVectorXd shifted = logits.row(i).array() - zmax;
    Eigen::RowVectorXd expo = shifted.array().exp();
    const double sum = expo.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    loss += std::log(sum) - shifted(y);
    if (dlogits) {
      Eigen::RowVectorXd p = expo / sum;
      p(y) -= 1.0;
      dlogits->row(i) = p / static_cast<double>(n);
    }
  }
  return loss / static_cast<double>(n);
}

double mse_loss(const Eigen::MatrixXd& out, const Eigen::VectorXd& target,
                Eigen::MatrixXd* dout) {
  const Eigen::Index n = out.rows();
  Eigen::VectorXd diff = out.col(0) - target;
  if (dout) {
    dout->resize(n, 1);
    dout->col(0) = 2.0 * diff / static_cast<double>(n);
  }
  return diff.squaredNorm() / static_cast<double>(n);
}

struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x) {
    Standardizer s;
    s.mean = x.colwise().mean();
    Eigen::VectorXd var =
        (x.rowwise() - s.mean.transpose()).array().square().colwise().sum() /
        static_cast<double>(x.rows());
    s.scale = var.cwiseSqrt();
    for (Eigen::Index c = 0; c < s.scale.size(); ++c)
      if (s.scale(c) < 1e-12) s.scale(c) = 1.0;
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
  }
};

struct CellResult {
  std::vector<Layer> best_layers;
  TrainTrace trace;
  bool diverged = false;
  std::string failure;
};

// One full training run with early stopping on the validation loss.
CellResult train_cell(const ModelSpec& spec, Task task,
                      const std::vector<Eigen::Index>& dims,
                      const Eigen::MatrixXd& xtr, const std::vector<int>& ytr_c,
                      const Eigen::VectorXd& ytr_r, const Eigen::MatrixXd& xval,
                      const std::vector<int>& yval_c,
                      const Eigen::VectorXd& yval_r, double lr, double l2,
                      std::uint64_t seed) {
  CellResult result;
  std::vector<Layer> layers = init_layers(dims, seed, false);
  AdamState adam(layers);
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;

  for (int epoch = 0; epoch < spec.max_epochs; ++epoch) {
    std::vector<Eigen::MatrixXd> acts;
    Eigen::MatrixXd out = forward_layers(layers, xtr, &acts);
    Eigen::MatrixXd delta;
    double train_loss = task == Task::classification
                            ? cross_entropy_loss(out, ytr_c, &delta)
                            : mse_loss(out, ytr_r, &delta);
    if (!std::isfinite(train_loss)) {
      result.diverged = true;
      result.failure = "non-finite loss at epoch " + std::to_string(epoch);
      return result;
    }
    std::vector<Layer> grads = backward_layers(layers, acts, delta, l2);
    adam_step(layers, grads, adam, lr);

    Eigen::MatrixXd vout = forward_layers(layers, xval, nullptr);
    const double val_loss = task == Task::classification
                                ? cross_entropy_loss(vout, yval_c, nullptr)
                                : mse_loss(vout, yval_r, nullptr);
    if (!std::isfinite(val_loss)) {
      result.diverged = true;
      result.failure = "non-finite loss at epoch " + std::to_string(epoch);
      return result;
    }
    result.trace.val_loss.push_back(val_loss);
    Eigen::VectorXd flat;
    {
      long total = 0;
      for (const Layer& l : layers)
        total += static_cast<long>(l.weights.size() + l.bias.size());
      flat.resize(total);
      long at = 0;
      for (const Layer& l : layers) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
          for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
            flat(at++) = l.weights(r, c);
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat(at++) = l.bias(r);
      }
    }
    result.trace.snapshots.push_back(std::move(flat));
    if (static_cast<int>(result.trace.snapshots.size()) > kSnapshotCap)
      result.trace.snapshots.pop_front();

    if (val_loss < best_val) {
      best_val = val_loss;
      best_epoch = epoch;
      result.best_layers = layers;
    }
    if (epoch - best_epoch >= spec.patience) break;
  }
  result.trace.best_epoch = best_epoch;
  result.trace.best_val_loss = best_val;
  result.trace.chosen_lr = lr;
  result.trace.chosen_l2 = l2;
  return result;
}

std::vector<Eigen::Index> layer_dims(const ModelSpec& spec, Eigen::Index d,
                                     int n_outputs) {
  std::vector<Eigen::Index> dims{d};
  if (spec.kind == ModelKind::mlp) {
    if (spec.hidden.empty())
      throw Error(errc::invalid_argument, "mlp needs at least one hidden layer");
    for (int h : spec.hidden) {
      if (h < 1) throw Error(errc::invalid_argument, "hidden sizes must be >= 1");
      dims.push_back(h);
    }
  }
  dims.push_back(n_outputs);
  return dims;
}

void check_spec(const ModelSpec& spec, Task task) {
  if (!(spec.learning_rate > 0))
    throw Error(errc::invalid_argument, "learning rate must be positive");
  if (spec.patience < 1)
    throw Error(errc::invalid_argument, "patience must be >= 1");
  if (spec.max_epochs < 1)
    throw Error(errc::invalid_argument, "max epochs must be >= 1");
  if (task == Task::classification) {
    if (spec.kind == ModelKind::linear_regressor || spec.kind == ModelKind::ridge)
      throw Error(errc::invalid_argument,
                  "regression model kind on a classification task");
    if (spec.loss != LossKind::cross_entropy)
      throw Error(errc::invalid_argument,
                  "classification training uses the cross-entropy loss");
  } else {
    if (spec.kind == ModelKind::linear_logistic)
      throw Error(errc::invalid_argument,
                  "logistic model kind on a regression task");
    if (spec.loss != LossKind::mse)
      throw Error(errc::invalid_argument, "regression training uses the mse loss");
  }
}

}  // namespace

Eigen::MatrixXd TrainedModel::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd xs = (x.rowwise() - feature_mean.transpose()).array().rowwise() /
                       feature_scale.transpose().array();
  return forward_layers(layers, xs, nullptr);
}

std::vector<int> TrainedModel::predict_class(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd logits = forward(x);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int arg = 0;
    double best = logits(i, 0);
    for (Eigen::Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > best) {
        best = logits(i, c);
        arg = static_cast<int>(c);
      }
    out[static_cast<std::size_t>(i)] = arg;
  }
  return out;
}

Eigen::VectorXd TrainedModel::predict_value(const Eigen::MatrixXd& x) const {
  return forward(x).col(0);
}

Eigen::VectorXd TrainedModel::flatten() const {
  long total = param_count();
  Eigen::VectorXd flat(total);
  long at = 0;
  for (const Layer& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
        flat(at++) = l.weights(r, c);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat(at++) = l.bias(r);
  }
  return flat;
}

long TrainedModel::param_count() const {
  long total = 0;
  for (const Layer& l : layers)
    total += static_cast<long>(l.weights.size() + l.bias.size());
  return total;
}

TrainedModel fit(const ModelSpec& spec, const Dataset& train, const Dataset& val,
                 std::uint64_t seed) {
  if (train.n() == 0 || val.n() == 0)
    throw Error(errc::empty_partition, "fit needs nonempty train and val sets");
  check_spec(spec, train.task);

  const Standardizer std_x = Standardizer::fit(train.features);
  const Eigen::MatrixXd xtr = std_x.apply(train.features);
  const Eigen::MatrixXd xval = std_x.apply(val.features);
  const int n_outputs =
      train.task == Task::classification ? train.n_classes() : 1;
  const std::vector<Eigen::Index> dims = layer_dims(spec, train.dim(), n_outputs);

  std::vector<double> lrs = spec.lr_grid.empty()
                                ? std::vector<double>{spec.learning_rate}
                                : spec.lr_grid;
  std::vector<double> l2s =
      spec.l2_grid.empty() ? std::vector<double>{spec.l2} : spec.l2_grid;

  CellResult best;
  bool have_best = false;
  std::string last_failure;
  std::size_t cell_index = 0;
  for (double lr : lrs)
    for (double l2 : l2s) {
      CellResult cell = train_cell(spec, train.task, dims, xtr,
                                   train.class_labels, train.targets, xval,
                                   val.class_labels, val.targets, lr, l2,
                                   derive_seed(seed, "fit.cell", cell_index));
      ++cell_index;
      if (cell.diverged) {
        last_failure = cell.failure;
        continue;
      }
      if (!have_best || cell.trace.best_val_loss < best.trace.best_val_loss) {
        best = std::move(cell);
        have_best = true;
      }
    }
  if (!have_best) throw Error(errc::divergence, last_failure);

  TrainedModel model;
  model.spec = spec;
  model.task = train.task;
  model.n_outputs = n_outputs;
  model.layers = std::move(best.best_layers);
  model.feature_mean = std_x.mean;
  model.feature_scale = std_x.scale;
  model.trace = std::move(best.trace);
  model.seed = seed;
  return model;
}

TrainedModel fit(const ModelSpec& spec, const SplitDataset& split,
                 std::uint64_t seed) {
  return fit(spec, split.train(), split.val(), seed);
}

Metrics test_error(const TrainedModel& model, const Dataset& test) {
  if (test.n() == 0) throw Error(errc::empty_input, "empty test set");
  if (test.task != model.task)
    throw Error(errc::invalid_argument, "task mismatch between model and data");
  Metrics m;
  m.task = test.task;
  if (test.task == Task::classification) {
    if (test.n_classes() > model.n_outputs)
      throw Error(errc::invalid_argument, "label arity mismatch");
    const std::vector<int> pred = model.predict_class(test.features);
    long correct = 0;
    const int k = model.n_outputs;
    std::vector<long> tp(static_cast<std::size_t>(k), 0),
        fp(static_cast<std::size_t>(k), 0), fn(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const int y = test.class_labels[i];
      if (pred[i] == y) {
        ++correct;
        ++tp[static_cast<std::size_t>(y)];
      } else {
        ++fp[static_cast<std::size_t>(pred[i])];
        ++fn[static_cast<std::size_t>(y)];
      }
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(test.n());
    m.test_error = 1.0 - m.accuracy;
    double f1 = 0.0;
    for (int c = 0; c < k; ++c) {
      const double denom = 2.0 * tp[static_cast<std::size_t>(c)] +
                           fp[static_cast<std::size_t>(c)] +
                           fn[static_cast<std::size_t>(c)];
      f1 += denom > 0 ? 2.0 * tp[static_cast<std::size_t>(c)] / denom : 0.0;
    }
    m.macro_f1 = f1 / k;
  } else {
    const Eigen::VectorXd pred = model.predict_value(test.features);
    double ape = 0.0, se = 0.0;
    for (Eigen::Index i = 0; i < test.n(); ++i) {
      const double denom = std::max(std::abs(test.targets(i)), 1e-12);
      ape += std::abs(pred(i) - test.targets(i)) / denom;
      se += (pred(i) - test.targets(i)) * (pred(i) - test.targets(i));
    }
    m.mape = ape / static_cast<double>(test.n());
    m.mse = se / static_cast<double>(test.n());
    m.rmse = std::sqrt(m.mse);
    m.test_error = m.mape;
  }
  return m;
}

namespace {

// MSE fit of a single-output net toward the sign vector; no validation,
// fixed epoch budget.
std::vector<Layer> fit_signs(const std::vector<Eigen::Index>& dims,
                             const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& signs, int epochs,
                             double lr, std::uint64_t seed, bool zero_init) {
  std::vector<Layer> layers = init_layers(dims, seed, zero_init);
  AdamState adam(layers);
  for (int e = 0; e < epochs; ++e) {
    std::vector<Eigen::MatrixXd> acts;
    Eigen::MatrixXd out = forward_layers(layers, x, &acts);
    Eigen::MatrixXd delta;
    const double loss = mse_loss(out, signs, &delta);
    if (!std::isfinite(loss))
      throw Error(errc::divergence, "non-finite loss at epoch " + std::to_string(e));
    std::vector<Layer> grads = backward_layers(layers, acts, delta, 0.0);
    adam_step(layers, grads, adam, lr);
  }
  return layers;
}

}  // namespace

double linear_rademacher_value(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& sigma, double bound) {
  if (x.rows() != sigma.size())
    throw Error(errc::invalid_argument, "sign vector arity mismatch");
  return bound * (x.transpose() * sigma).norm() / static_cast<double>(x.rows());
}

RademacherResult empirical_rademacher_family(RadFamily family,
                                             const ModelSpec& spec,
                                             const Eigen::MatrixXd& x,
                                             int iterations,
                                             std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(errc::too_few_samples, "need at least 2 samples");
  if (iterations < 2)
    throw Error(errc::invalid_argument, "need at least 2 iterations");

  const Standardizer std_x = Standardizer::fit(x);
  const Eigen::MatrixXd xs = std_x.apply(x);

  std::vector<double> values(static_cast<std::size_t>(iterations), 0.0);
  std::vector<char> failed(static_cast<std::size_t>(iterations), 0);

  parallel_for(iterations, [&](std::int64_t j) {
    Rng rng = Rng::derive(seed, "rademacher", static_cast<std::uint64_t>(j));
    Eigen::VectorXd sigma(n);
    for (Eigen::Index i = 0; i < n; ++i)
      sigma(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;

    try {
      switch (family) {
        case RadFamily::zero:
          values[static_cast<std::size_t>(j)] = 0.0;
          break;
        case RadFamily::constant:
          // sup over {f == c, |c| <= 1} is |mean sigma|.
          values[static_cast<std::size_t>(j)] =
              std::abs(sigma.mean());
          break;
        case RadFamily::linear_closed_form:
          values[static_cast<std::size_t>(j)] =
              linear_rademacher_value(xs, sigma, spec.norm_bound);
          break;
        case RadFamily::linear_trained: {
          std::vector<Layer> layers =
              fit_signs({xs.cols(), 1}, xs, sigma, spec.rademacher_epochs, 1e-2,
                        derive_seed(seed, "rademacher.fit", static_cast<std::uint64_t>(j)),
                        true);
          Eigen::VectorXd w = layers[0].weights.row(0);
          const double norm = w.norm();
          if (norm < 1e-300) {
            values[static_cast<std::size_t>(j)] = 0.0;
            break;
          }
          // Rescale to the constraint boundary; the objective is linear in w.
          values[static_cast<std::size_t>(j)] =
              std::abs(spec.norm_bound * (w / norm).dot(xs.transpose() * sigma) /
                       static_cast<double>(n));
          break;
        }
        case RadFamily::mlp_trained: {
          std::vector<Eigen::Index> dims{xs.cols()};
          for (int h : spec.hidden) dims.push_back(h);
          if (spec.hidden.empty()) dims.push_back(16);
          dims.push_back(1);
          std::vector<Layer> layers =
              fit_signs(dims, xs, sigma, spec.rademacher_epochs, 1e-2,
                        derive_seed(seed, "rademacher.fit", static_cast<std::uint64_t>(j)),
                        false);
          Eigen::VectorXd out = forward_layers(layers, xs, nullptr).col(0);
          out = out.cwiseMax(-1.0).cwiseMin(1.0);
          values[static_cast<std::size_t>(j)] =
              std::abs(sigma.dot(out) / static_cast<double>(n));
          break;
        }
      }
    } catch (const Error&) {
      failed[static_cast<std::size_t>(j)] = 1;
    }
  });

  RademacherResult result;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (failed[j])
      ++result.failed;
    else
      result.replicates.push_back(values[j]);
  }
  if (result.failed * 2 >= iterations)
    throw Error(errc::numerical_failure,
                "more than half of the Rademacher replicates failed");
  result.mean = mean_of(result.replicates);
  return result;
}

RademacherResult empirical_rademacher(const ModelSpec& spec,
                                      const Eigen::MatrixXd& x, int iterations,
                                      std::uint64_t seed) {
  const RadFamily family = spec.kind == ModelKind::mlp
                               ? RadFamily::mlp_trained
                               : RadFamily::linear_closed_form;
  return empirical_rademacher_family(family, spec, x, iterations, seed);
}

PacBayesPosterior collect_posterior(const TrainedModel& model, int window,
                                    double prior_std, WarningList* warnings) {
  if (!(prior_std > 0))
    throw Error(errc::invalid_argument, "prior std must be positive");
  const auto& snaps = model.trace.snapshots;
  if (snaps.size() < 2)
    throw Error(errc::too_few_samples,
                "posterior needs at least 2 trajectory snapshots");
  std::size_t use = static_cast<std::size_t>(std::max(window, 2));
  if (use > snaps.size()) {
    warn(warnings, "PosteriorWindowClamped",
         "window " + std::to_string(window) + " exceeds the " +
             std::to_string(snaps.size()) + "-snapshot trace; using all of it");
    use = snaps.size();
  }
  const std::size_t first = snaps.size() - use;
  const Eigen::Index p = snaps.back().size();

  PacBayesPosterior post;
  post.prior_std = prior_std;
  post.means = snaps.back();
  post.stds.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t s = first; s < snaps.size(); ++s) mean += snaps[s](j);
    mean /= static_cast<double>(use);
    double var = 0.0;
    for (std::size_t s = first; s < snaps.size(); ++s)
      var += (snaps[s](j) - mean) * (snaps[s](j) - mean);
    var /= static_cast<double>(use);
    post.stds(j) = std::max(std::sqrt(var), kStdFloor);
  }
  return post;
}

double pac_bayes_complexity(const PacBayesPosterior& posterior) {
  if (posterior.means.size() != posterior.stds.size())
    throw Error(errc::invalid_argument, "posterior mean/std arity mismatch");
  const double sp2 = posterior.prior_std * posterior.prior_std;
  double kl = 0.0;
  for (Eigen::Index j = 0; j < posterior.means.size(); ++j) {
    const double sq = posterior.stds(j);
    const double w = posterior.means(j);
    kl += std::log(posterior.prior_std / sq) + (sq * sq + w * w) / (2.0 * sp2) -
          0.5;
  }
  return kl;
}

double spectral_complexity(const TrainedModel& model) {
  double product = 1.0;
  for (const Layer& l : model.layers) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(l.weights);
    product *= svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  }
  return model.layers.empty() ? 0.0 : product;
}

ModelProbes import_probes(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open())
    throw Error(errc::missing_file, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    file >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::schema_violation, std::string("probes JSON: ") + e.what());
  }

  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key))
      throw Error(errc::missing_field, std::string("probes missing '") + key + "'");
    return j.at(key);
  };

  if (!j.contains("schema") || j["schema"] != 1)
    throw Error(errc::schema_violation, "probes schema must be 1");

  ModelProbes p;
  const std::string task = require("task").get<std::string>();
  if (task == "classification")
    p.task = Task::classification;
  else if (task == "regression")
    p.task = Task::regression;
  else
    throw Error(errc::schema_violation, "unknown task '" + task + "'");

  const auto& rad = require("rademacher");
  if (!rad.contains("mean"))
    throw Error(errc::missing_field, "probes missing 'rademacher.mean'");
  p.rademacher_mean = rad["mean"].get<double>();
  if (rad.contains("replicates"))
    p.rademacher_replicates = rad["replicates"].get<std::vector<double>>();
  if (p.rademacher_mean < 0)
    throw Error(errc::schema_violation, "rademacher mean must be >= 0");

  p.n_train = require("n_train").get<long>();
  if (p.n_train < 1)
    throw Error(errc::schema_violation, "n_train must be >= 1");
  p.param_count = require("param_count").get<long>();
  if (p.param_count < 0)
    throw Error(errc::schema_violation, "param_count must be >= 0");

  if (p.task == Task::classification) {
    p.test_error = require("test_error").get<double>();
    if (p.test_error < 0 || p.test_error > 1)
      throw Error(errc::schema_violation, "test_error must lie in [0, 1]");
    p.pac_bayes = j.value("pac_bayes", 0.0);
  } else {
    p.mape = require("mape").get<double>();
    p.rmse = j.value("rmse", 0.0);
    p.mse = j.value("mse", 0.0);
    p.pac_bayes = require("pac_bayes").get<double>();
    p.test_error = p.mape;
  }
  if (p.pac_bayes < 0)
    throw Error(errc::schema_violation, "pac_bayes must be >= 0");
  p.spectral = j.value("spectral", 0.0);

  const double kappa =
      scale_complexity(p.rademacher_mean, static_cast<double>(p.n_train));
  if (j.contains("kappa") && std::abs(j["kappa"].get<double>() - kappa) > 1e-6)
    throw Error(errc::inconsistent_kappa,
                "declared kappa disagrees with rademacher * sqrt(n_train)");
  p.kappa = kappa;
  return p;
}

}  // namespace augsize
