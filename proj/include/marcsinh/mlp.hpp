#pragma once

#include <cstddef>
#include <vector>

#include "marcsinh/data.hpp"
#include "marcsinh/functions.hpp"
#include "marcsinh/matrix.hpp"

namespace marcsinh {

struct MlpConfig {
  std::vector<std::size_t> hidden_sizes{100};
  ActivationKind activation;
  std::size_t max_iter = 300;  // epochs
  unsigned seed = 1;
  double learning_rate = 1e-3;
  std::size_t max_batch_size = 200;  // batch = min(200, n_samples)
  double l2_alpha = 1e-4;
  double tol = 1e-4;
  std::size_t n_iter_no_change = 10;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

enum class OutputTransform { Logistic, Softmax };

// Dense layers with one activation on every hidden layer.
struct Network {
  std::vector<Matrix> weights;  // weights[l] is fan_in x fan_out
  std::vector<Vector> biases;
  ActivationKind activation;
  OutputTransform output = OutputTransform::Softmax;

  std::size_t n_inputs() const { return static_cast<std::size_t>(weights.front().rows()); }
  std::size_t n_outputs() const { return static_cast<std::size_t>(weights.back().cols()); }

  // Output-layer activations: one logistic column or softmax rows.
  Matrix forward(const Matrix& X) const;

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  // Mean log-loss over the rows of X plus (l2_alpha / 2) * ||W||^2 / rows.
  // `targets` is one-hot (Softmax) or a single 0/1 column (Logistic).
  double loss(const Matrix& X, const Matrix& targets, double l2_alpha) const;

  // Loss and its gradient by backprop. Hidden-layer deltas go through
  // apply_activation_derivative, so with MArcsinh in PaperFaithful mode the
  // result is the published update rule rather than the true gradient.
  double loss_and_gradients(const Matrix& X, const Matrix& targets, double l2_alpha, Gradients& grads) const;
};

// Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out)).
Network init_network(const std::vector<std::size_t>& layer_sizes, ActivationKind activation, OutputTransform output,
                     unsigned seed);

struct MlpModel {
  Network network;
  std::size_t n_classes = 0;
  std::vector<double> loss_curve;  // one entry per epoch
  bool converged = false;          // stopped by the tolerance rule, not max_iter
};

MlpModel mlp_fit(const Dataset& train, const MlpConfig& config);

// n x k probability rows; a binary model is expanded to [1 - p, p].
Matrix mlp_predict_proba(const MlpModel& model, const Matrix& X);

// Row argmax, first index on ties.
Labels mlp_predict(const MlpModel& model, const Matrix& X);
Labels argmax_rows(const Matrix& proba);

}  // namespace marcsinh
