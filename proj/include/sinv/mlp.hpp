#ifndef SINV_MLP_HPP
#define SINV_MLP_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sinv/common.hpp"

namespace sinv {

struct MlpArchitecture {
  int input_dim = 0;
  int hidden_layers = 6;
  int hidden_width = 512;
  int output_dim = 6;
  double dropout_input = 0.1;
  double dropout_hidden = 0.2;

  long param_count() const;
  void validate() const;
};

struct TrainConfig {
  int batch_size = 256;
  int max_epochs = 100;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int patience = 10;
  std::uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> train_mse;
  std::vector<double> dev_mse;
  std::vector<double> seconds;
  int best_epoch = -1;  // 0-based index into the vectors
  double best_dev_mse = 0.0;
  double wall_time_s = 0.0;
};

/// Feed-forward regressor, ReLU hidden layers, identity output. Scalar is
/// float for training/inference and double for gradient checks. Features and
/// targets are z-scored with train-set statistics; the loss lives in
/// normalized target space, predictions are de-normalized.
template <typename Scalar>
struct Mlp {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  struct Layer {
    Mat w;  // out x in
    Vec b;
  };

  MlpArchitecture arch;
  std::vector<Layer> layers;  // hidden x arch.hidden_layers, then output
  Eigen::VectorXd feat_mean, feat_std;      // input_dim
  Eigen::VectorXd target_mean, target_std;  // output_dim
  std::uint64_t init_seed = 0;
  std::string provenance;

  long param_count() const;
};

template <typename Scalar>
Mlp<Scalar> init_mlp(const MlpArchitecture& arch, std::uint64_t seed);

/// Forward pass in normalized space. rng == nullptr: eval mode. Otherwise
/// inverted dropout masks are drawn from it (train mode).
template <typename Scalar>
typename Mlp<Scalar>::Mat forward_normalized(const Mlp<Scalar>& m,
                                             const typename Mlp<Scalar>::Mat& xn,
                                             Rng* rng);

/// Eval-mode, physical units in and out (rows = frames).
template <typename Scalar>
Eigen::MatrixXd predict(const Mlp<Scalar>& m, const Eigen::MatrixXd& x);

/// MSE over N*output_dim entries in normalized space plus parameter
/// gradients. Dropout masks (train mode) are shared between the returned
/// value and the gradients.
template <typename Scalar>
double loss_and_grads(const Mlp<Scalar>& m, const typename Mlp<Scalar>::Mat& xn,
                      const typename Mlp<Scalar>::Mat& tn, Rng* rng,
                      std::vector<typename Mlp<Scalar>::Layer>& grads);

template <typename Scalar>
struct AdamState {
  std::vector<typename Mlp<Scalar>::Layer> m1, m2;
  long step = 0;
};

template <typename Scalar>
AdamState<Scalar> make_adam_state(const Mlp<Scalar>& m);

template <typename Scalar>
void adam_step(Mlp<Scalar>& model, const std::vector<typename Mlp<Scalar>::Layer>& grads,
               AdamState<Scalar>& state, const TrainConfig& config);

/// Mini-batch training with seeded shuffling, dev-based model selection and
/// early stopping. x/y are physical units; normalization statistics are
/// computed from the train arguments only.
template <typename Scalar>
std::pair<Mlp<Scalar>, TrainReport> train_mlp(
    const MlpArchitecture& arch, const Eigen::MatrixXd& x_train,
    const Eigen::MatrixXd& y_train, const Eigen::MatrixXd& x_dev,
    const Eigen::MatrixXd& y_dev, const TrainConfig& config);

/// Checkpoint: magic "MLP1", architecture header, f64 normalization stats,
/// f32 parameters, trailing fnv1a64 checksum. Round trip is bit-exact.
void save_model(const Mlp<float>& m, const std::string& path);
Mlp<float> load_model(const std::string& path);

void save_train_log(const std::string& path, const TrainReport& report);

// ---------------------------------------------------------------------------
// Template definitions
// ---------------------------------------------------------------------------

template <typename Scalar>
long Mlp<Scalar>::param_count() const {
  long n = 0;
  for (const Layer& l : layers) n += static_cast<long>(l.w.size()) + l.b.size();
  return n;
}

template <typename Scalar>
Mlp<Scalar> init_mlp(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  using Vec = typename Mlp<Scalar>::Vec;
  Mlp<Scalar> m;
  m.arch = arch;
  m.init_seed = seed;
  Rng rng(seed);
  int in = arch.input_dim;
  for (int l = 0; l <= arch.hidden_layers; ++l) {
    const int out = l == arch.hidden_layers ? arch.output_dim : arch.hidden_width;
    typename Mlp<Scalar>::Layer layer;
    layer.w.resize(out, in);
    const double sd = std::sqrt(2.0 / in);
    for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.w.cols(); ++j)
        layer.w(i, j) = static_cast<Scalar>(rng.gauss() * sd);
    layer.b = Vec::Zero(out);
    m.layers.push_back(std::move(layer));
    in = out;
  }
  m.feat_mean = Eigen::VectorXd::Zero(arch.input_dim);
  m.feat_std = Eigen::VectorXd::Ones(arch.input_dim);
  m.target_mean = Eigen::VectorXd::Zero(arch.output_dim);
  m.target_std = Eigen::VectorXd::Ones(arch.output_dim);
  return m;
}

namespace detail {

template <typename Mat>
void apply_dropout(Mat& a, double p, Rng& rng) {
  if (p <= 0.0) return;
  using Scalar = typename Mat::Scalar;
  const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - p));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = rng.uniform01() < p ? Scalar(0) : a(i, j) * keep_scale;
}

}  // namespace detail

template <typename Scalar>
typename Mlp<Scalar>::Mat forward_normalized(const Mlp<Scalar>& m,
                                             const typename Mlp<Scalar>::Mat& xn,
                                             Rng* rng) {
  if (xn.cols() != m.arch.input_dim) throw DataError("input width mismatch");
  using Mat = typename Mlp<Scalar>::Mat;
  Mat a = xn;
  if (rng) detail::apply_dropout(a, m.arch.dropout_input, *rng);
  const int n_layers = static_cast<int>(m.layers.size());
  for (int l = 0; l < n_layers; ++l) {
    Mat z = (a * m.layers[l].w.transpose()).rowwise() + m.layers[l].b.transpose();
    if (l + 1 < n_layers) {
      a = z.cwiseMax(Scalar(0));
      if (rng) detail::apply_dropout(a, m.arch.dropout_hidden, *rng);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

template <typename Scalar>
Eigen::MatrixXd predict(const Mlp<Scalar>& m, const Eigen::MatrixXd& x) {
  if (x.cols() != m.arch.input_dim) throw DataError("input width mismatch");
  using Mat = typename Mlp<Scalar>::Mat;
  Mat xn = ((x.rowwise() - m.feat_mean.transpose()).array().rowwise() /
            m.feat_std.transpose().array())
               .template cast<Scalar>()
               .matrix();
  Mat yn = forward_normalized(m, xn, nullptr);
  Eigen::MatrixXd y = yn.template cast<double>();
  y = ((y.array().rowwise() * m.target_std.transpose().array()).rowwise() +
       m.target_mean.transpose().array())
          .matrix();
  return y;
}

template <typename Scalar>
double loss_and_grads(const Mlp<Scalar>& m, const typename Mlp<Scalar>::Mat& xn,
                      const typename Mlp<Scalar>::Mat& tn, Rng* rng,
                      std::vector<typename Mlp<Scalar>::Layer>& grads) {
  using Mat = typename Mlp<Scalar>::Mat;
  if (xn.cols() != m.arch.input_dim) throw DataError("input width mismatch");
  if (tn.rows() != xn.rows() || tn.cols() != m.arch.output_dim)
    throw DataError("target shape mismatch");
  const int n_layers = static_cast<int>(m.layers.size());
  grads.resize(n_layers);

  // Forward, caching each layer's (post-dropout) input and the dropout masks
  // baked into them.
  std::vector<Mat> inputs(n_layers);  // input to layer l
  std::vector<Mat> gates(n_layers);   // relu/dropout derivative factor per layer input
  Mat a = xn;
  if (rng) {
    Mat mask = Mat::Ones(a.rows(), a.cols());
    detail::apply_dropout(mask, m.arch.dropout_input, *rng);
    a = a.cwiseProduct(mask);
    gates[0] = std::move(mask);
  }
  inputs[0] = a;
  for (int l = 0; l < n_layers; ++l) {
    Mat z = (inputs[l] * m.layers[l].w.transpose()).rowwise() +
            m.layers[l].b.transpose();
    if (l + 1 < n_layers) {
      Mat act = z.cwiseMax(Scalar(0));
      Mat gate = (z.array() > Scalar(0)).template cast<Scalar>().matrix();
      if (rng) {
        Mat mask = Mat::Ones(act.rows(), act.cols());
        detail::apply_dropout(mask, m.arch.dropout_hidden, *rng);
        act = act.cwiseProduct(mask);
        gate = gate.cwiseProduct(mask);
      }
      inputs[l + 1] = std::move(act);
      gates[l + 1] = std::move(gate);
    } else {
      a = std::move(z);
    }
  }

  const double inv_n = 1.0 / (static_cast<double>(xn.rows()) * m.arch.output_dim);
  Mat resid = a - tn;
  const double loss = static_cast<double>(
                          resid.template cast<double>().array().square().sum()) *
                      inv_n;

  Mat dz = resid * static_cast<Scalar>(2.0 * inv_n);
  for (int l = n_layers - 1; l >= 0; --l) {
    grads[static_cast<std::size_t>(l)].w.noalias() = dz.transpose() * inputs[l];
    grads[static_cast<std::size_t>(l)].b = dz.colwise().sum().transpose();
    if (l > 0) {
      Mat da = dz * m.layers[l].w;
      dz = da.cwiseProduct(gates[l]);
    }
  }
  return loss;
}

template <typename Scalar>
AdamState<Scalar> make_adam_state(const Mlp<Scalar>& m) {
  using Mat = typename Mlp<Scalar>::Mat;
  using Vec = typename Mlp<Scalar>::Vec;
  AdamState<Scalar> st;
  for (const auto& l : m.layers) {
    typename Mlp<Scalar>::Layer z;
    z.w = Mat::Zero(l.w.rows(), l.w.cols());
    z.b = Vec::Zero(l.b.size());
    st.m1.push_back(z);
    st.m2.push_back(std::move(z));
  }
  return st;
}

template <typename Scalar>
void adam_step(Mlp<Scalar>& model, const std::vector<typename Mlp<Scalar>::Layer>& grads,
               AdamState<Scalar>& state, const TrainConfig& config) {
  if (grads.size() != model.layers.size()) throw DataError("gradient shape mismatch");
  state.step += 1;
  const double b1 = config.beta1, b2 = config.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const Scalar lr = static_cast<Scalar>(config.learning_rate);
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto upd = [&](auto& p, const auto& g, auto& m1, auto& m2) {
      m1 = m1 * static_cast<Scalar>(b1) + g * static_cast<Scalar>(1.0 - b1);
      m2 = (m2.array() * static_cast<Scalar>(b2) +
            g.array().square() * static_cast<Scalar>(1.0 - b2))
               .matrix();
      p.array() -= lr * (m1.array() / static_cast<Scalar>(bc1)) /
                   ((m2.array() / static_cast<Scalar>(bc2)).sqrt() + eps);
    };
    upd(model.layers[l].w, grads[l].w, state.m1[l].w, state.m2[l].w);
    upd(model.layers[l].b, grads[l].b, state.m1[l].b, state.m2[l].b);
  }
}

namespace detail {

inline void norm_stats(const Eigen::MatrixXd& x, Eigen::VectorXd& mean,
                       Eigen::VectorXd& std_dev) {
  mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  std_dev = (centered.array().square().colwise().sum() / x.rows())
                .sqrt()
                .transpose()
                .matrix();
  std_dev = std_dev.cwiseMax(1e-8);
}

}  // namespace detail

template <typename Scalar>
std::pair<Mlp<Scalar>, TrainReport> train_mlp(
    const MlpArchitecture& arch, const Eigen::MatrixXd& x_train,
    const Eigen::MatrixXd& y_train, const Eigen::MatrixXd& x_dev,
    const Eigen::MatrixXd& y_dev, const TrainConfig& config) {
  using Mat = typename Mlp<Scalar>::Mat;
  if (x_train.rows() == 0 || x_dev.rows() == 0)
    throw DataError("empty train or dev set");
  if (x_train.rows() != y_train.rows() || x_dev.rows() != y_dev.rows())
    throw DataError("feature/target row mismatch");
  if (x_train.cols() != arch.input_dim || y_train.cols() != arch.output_dim)
    throw DataError("train matrix width mismatch");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");

  Mlp<Scalar> model = init_mlp<Scalar>(arch, config.seed);
  detail::norm_stats(x_train, model.feat_mean, model.feat_std);
  detail::norm_stats(y_train, model.target_mean, model.target_std);

  auto normalize = [](const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                      const Eigen::VectorXd& sd) {
    return Mat(((x.rowwise() - mean.transpose()).array().rowwise() /
                sd.transpose().array())
                   .template cast<Scalar>()
                   .matrix());
  };
  Mat xtr = normalize(x_train, model.feat_mean, model.feat_std);
  Mat ytr = normalize(y_train, model.target_mean, model.target_std);
  Mat xdv = normalize(x_dev, model.feat_mean, model.feat_std);
  Mat ydv = normalize(y_dev, model.target_mean, model.target_std);

  const Eigen::Index n = xtr.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  Rng shuffle_rng = Rng(config.seed).fork(0x5f17);
  Rng dropout_rng = Rng(config.seed).fork(0xd0b0);

  AdamState<Scalar> adam = make_adam_state(model);
  std::vector<typename Mlp<Scalar>::Layer> grads;
  TrainReport report;
  std::vector<typename Mlp<Scalar>::Layer> best_layers = model.layers;
  double best_dev = std::numeric_limits<double>::infinity();
  int best_epoch = -1, since_best = 0;

  const auto t_start = std::chrono::steady_clock::now();
  Mat xb, yb;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto t_epoch = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    long n_batches = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, n - start);
      xb.resize(bs, xtr.cols());
      yb.resize(bs, ytr.cols());
      for (Eigen::Index i = 0; i < bs; ++i) {
        xb.row(i) = xtr.row(order[static_cast<std::size_t>(start + i)]);
        yb.row(i) = ytr.row(order[static_cast<std::size_t>(start + i)]);
      }
      const double loss = loss_and_grads(model, xb, yb, &dropout_rng, grads);
      if (!std::isfinite(loss))
        throw DataError("training diverged: non-finite loss at epoch " +
                        std::to_string(epoch + 1));
      adam_step(model, grads, adam, config);
      loss_sum += loss;
      ++n_batches;
    }

    Mat dev_pred = forward_normalized(model, xdv, nullptr);
    const double dev_mse =
        (dev_pred - ydv).template cast<double>().array().square().sum() /
        (static_cast<double>(xdv.rows()) * arch.output_dim);
    report.train_mse.push_back(loss_sum / std::max(1L, n_batches));
    report.dev_mse.push_back(dev_mse);
    report.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_epoch)
            .count());

    if (dev_mse < best_dev) {
      best_dev = dev_mse;
      best_epoch = epoch;
      best_layers = model.layers;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best > config.patience) break;
    }
  }

  model.layers = std::move(best_layers);
  report.best_epoch = best_epoch;
  report.best_dev_mse = best_dev;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(model), std::move(report)};
}

}  // namespace sinv

#endif  // SINV_MLP_HPP
