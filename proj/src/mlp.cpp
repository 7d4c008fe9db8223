#include "marcsinh/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <span>

#include <fmt/format.h>

#include "marcsinh/errors.hpp"

namespace marcsinh {

namespace {

constexpr double kProbEps = std::numeric_limits<double>::epsilon();

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void output_transform_inplace(OutputTransform t, Matrix& z) {
  if (t == OutputTransform::Logistic) {
    z = z.unaryExpr([](double v) { return logistic(v); });
    return;
  }
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

double log_loss(OutputTransform t, const Matrix& p, const Matrix& targets) {
  // Clipping would hide NaN outputs, so they are reported first.
  if (!p.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const Matrix clipped = p.cwiseMax(kProbEps).cwiseMin(1.0 - kProbEps);
  double s = 0.0;
  if (t == OutputTransform::Logistic) {
    s = (targets.array() * clipped.array().log() + (1.0 - targets.array()) * (1.0 - clipped.array()).log()).sum();
  } else {
    s = (targets.array() * clipped.array().log()).sum();
  }
  return -s / static_cast<double>(p.rows());
}

double weight_penalty(const std::vector<Matrix>& weights, double l2_alpha, double n) {
  double sq = 0.0;
  for (const auto& W : weights) sq += W.squaredNorm();
  return 0.5 * l2_alpha * sq / n;
}

Matrix one_hot(const Labels& y, std::size_t k, OutputTransform t) {
  if (t == OutputTransform::Logistic) {
    Matrix out(static_cast<Eigen::Index>(y.size()), 1);
    for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = y[i] == 1 ? 1.0 : 0.0;
    return out;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  return out;
}

struct Adam {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
  double beta1, beta2, eps, lr;
  std::size_t t = 0;

  Adam(const Network& net, const MlpConfig& c) : beta1(c.adam_beta1), beta2(c.adam_beta2), eps(c.adam_eps), lr(c.learning_rate) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      mw.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
      vw.push_back(mw.back());
      mb.push_back(Vector::Zero(net.biases[l].size()));
      vb.push_back(mb.back());
    }
  }

  void step(Network& net, const Network::Gradients& g) {
    ++t;
    const double td = static_cast<double>(t);
    const double lr_t = lr * std::sqrt(1.0 - std::pow(beta2, td)) / (1.0 - std::pow(beta1, td));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      mw[l] = beta1 * mw[l] + (1.0 - beta1) * g.weights[l];
      vw[l] = beta2 * vw[l] + (1.0 - beta2) * g.weights[l].cwiseAbs2();
      net.weights[l].array() -= lr_t * mw[l].array() / (vw[l].array().sqrt() + eps);
      mb[l] = beta1 * mb[l] + (1.0 - beta1) * g.biases[l];
      vb[l] = beta2 * vb[l] + (1.0 - beta2) * g.biases[l].cwiseAbs2();
      net.biases[l].array() -= lr_t * mb[l].array() / (vb[l].array().sqrt() + eps);
    }
  }
};

Matrix gather_rows(const Matrix& X, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

}  // namespace

void MlpConfig::validate() const {
  if (hidden_sizes.empty()) throw InvalidConfig("hidden_sizes must not be empty");
  for (auto h : hidden_sizes) {
    if (h == 0) throw InvalidConfig("hidden layer sizes must be positive");
  }
  if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
  if (max_batch_size < 1) throw InvalidConfig("batch size must be >= 1");
  if (n_iter_no_change < 1) throw InvalidConfig("n_iter_no_change must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidConfig(fmt::format("learning_rate must be > 0, got {}", learning_rate));
  if (!(l2_alpha > 0.0)) throw InvalidConfig(fmt::format("l2_alpha must be > 0, got {}", l2_alpha));
  if (!(tol > 0.0)) throw InvalidConfig(fmt::format("tol must be > 0, got {}", tol));
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw InvalidConfig("adam_beta1 must be in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw InvalidConfig("adam_beta2 must be in (0, 1)");
  if (!(adam_eps > 0.0)) throw InvalidConfig("adam_eps must be > 0");
}

Matrix Network::forward(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_inputs()) {
    throw DimensionMismatch(fmt::format("network expects {} features, got {}", n_inputs(), X.cols()));
  }
  Matrix a = X;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix z = a * weights[l];
    z.rowwise() += biases[l].transpose();
    if (l + 1 < weights.size()) {
      apply_activation_inplace(activation, z);
    } else {
      output_transform_inplace(output, z);
    }
    a = std::move(z);
  }
  return a;
}

double Network::loss(const Matrix& X, const Matrix& targets, double l2_alpha) const {
  const Matrix p = forward(X);
  if (p.rows() != targets.rows() || p.cols() != targets.cols()) throw DimensionMismatch("loss: targets shape");
  return log_loss(output, p, targets) + weight_penalty(weights, l2_alpha, static_cast<double>(X.rows()));
}

double Network::loss_and_gradients(const Matrix& X, const Matrix& targets, double l2_alpha, Gradients& grads) const {
  if (static_cast<std::size_t>(X.cols()) != n_inputs()) {
    throw DimensionMismatch(fmt::format("network expects {} features, got {}", n_inputs(), X.cols()));
  }
  const std::size_t L = weights.size();
  const bool keep_pre = activation.wants_pre_activation();

  // acts[0] = X, acts[l + 1] = output of layer l; pre[l] kept only when the
  // derivative needs it.
  std::vector<Matrix> acts;
  std::vector<Matrix> pre(L);
  acts.reserve(L + 1);
  acts.push_back(X);
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = acts.back() * weights[l];
    z.rowwise() += biases[l].transpose();
    if (l + 1 < L) {
      if (keep_pre) pre[l] = z;
      apply_activation_inplace(activation, z);
    } else {
      output_transform_inplace(output, z);
    }
    acts.push_back(std::move(z));
  }
  const Matrix& p = acts.back();
  if (p.rows() != targets.rows() || p.cols() != targets.cols()) throw DimensionMismatch("loss: targets shape");

  const double n = static_cast<double>(X.rows());
  const double value = log_loss(output, p, targets) + weight_penalty(weights, l2_alpha, n);

  grads.weights.resize(L);
  grads.biases.resize(L);
  Matrix delta = p - targets;
  for (std::size_t l = L; l-- > 0;) {
    grads.weights[l] = (acts[l].transpose() * delta + l2_alpha * weights[l]) / n;
    grads.biases[l] = delta.colwise().mean().transpose();
    if (l == 0) break;
    Matrix back = delta * weights[l].transpose();
    apply_activation_derivative_inplace(activation, keep_pre ? pre[l - 1] : acts[l], back);
    delta = std::move(back);
  }
  return value;
}

Network init_network(const std::vector<std::size_t>& layer_sizes, ActivationKind activation, OutputTransform output,
                     unsigned seed) {
  if (layer_sizes.size() < 2) throw InvalidConfig("network needs at least an input and an output layer");
  std::mt19937 rng(seed);
  Network net;
  net.activation = activation;
  net.output = output;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = layer_sizes[l];
    const auto fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix W(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = u(rng);
    Vector b(static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = u(rng);
    net.weights.push_back(std::move(W));
    net.biases.push_back(std::move(b));
  }
  return net;
}

MlpModel mlp_fit(const Dataset& train, const MlpConfig& config) {
  config.validate();
  train.validate();
  const auto counts = train.class_counts();
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) throw SingleClass();

  const std::size_t k = train.n_classes();
  const auto output = k == 2 ? OutputTransform::Logistic : OutputTransform::Softmax;
  std::vector<std::size_t> sizes{train.n_features()};
  sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  sizes.push_back(k == 2 ? 1 : k);

  MlpModel model;
  model.n_classes = k;
  model.network = init_network(sizes, config.activation, output, config.seed);
  // Separate stream for batch order so the initial weights depend on the seed alone.
  std::mt19937 shuffle_rng(config.seed + 1);

  const Matrix targets = one_hot(train.y, k, output);
  const std::size_t n = train.n_samples();
  const std::size_t batch = std::min(config.max_batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Adam adam(model.network, config);
  Network::Gradients grads;
  double best = std::numeric_limits<double>::infinity();
  std::size_t no_improvement = 0;

  for (std::size_t epoch = 1; epoch <= config.max_iter; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const auto idx = std::span<const std::size_t>(order).subspan(start, std::min(batch, n - start));
      const Matrix Xb = gather_rows(train.X, idx);
      const Matrix Tb = gather_rows(targets, idx);
      const double l = model.network.loss_and_gradients(Xb, Tb, config.l2_alpha, grads);
      if (!std::isfinite(l)) throw TrainingDiverged(epoch);
      epoch_loss += l * static_cast<double>(idx.size());
      adam.step(model.network, grads);
    }
    epoch_loss /= static_cast<double>(n);
    model.loss_curve.push_back(epoch_loss);

    if (epoch_loss > best - config.tol) {
      ++no_improvement;
    } else {
      no_improvement = 0;
    }
    best = std::min(best, epoch_loss);
    if (no_improvement >= config.n_iter_no_change) {
      model.converged = true;
      break;
    }
  }
  return model;
}

Matrix mlp_predict_proba(const MlpModel& model, const Matrix& X) {
  Matrix p = model.network.forward(X);
  if (model.network.output == OutputTransform::Softmax) return p;
  Matrix out(p.rows(), 2);
  out.col(1) = p.col(0);
  out.col(0) = (1.0 - p.col(0).array()).matrix();
  return out;
}

Labels argmax_rows(const Matrix& proba) {
  Labels out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index r = 0; r < proba.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < proba.cols(); ++c) {
      if (proba(r, c) > proba(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

Labels mlp_predict(const MlpModel& model, const Matrix& X) { return argmax_rows(mlp_predict_proba(model, X)); }

}  // namespace marcsinh
