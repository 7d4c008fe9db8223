#include "marcsinh/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "marcsinh/mlp.hpp"

namespace marcsinh {

GradCheck check_activation_derivative(Activation a, std::size_t points, double h) {
  GradCheck out;
  out.name = fmt::format("{} derivative vs central differences", to_string(a));
  out.tolerance = 1e-6;
  const ActivationKind kind{a, DerivativeMode::Exact};
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double mag = 0.01 * std::pow(50.0 / 0.01, t);  // log-spaced
    for (double x : {mag, -mag}) {
      const double fd = (activation_value(a, x + h) - activation_value(a, x - h)) / (2.0 * h);
      // Exact mode means the factor is taken at the input itself, which is
      // what a pointwise derivative check needs for every activation.
      const double analytic = a == Activation::MArcsinh ? m_arcsinh_derivative(x)
                                                        : activation_derivative_factor(kind, activation_value(a, x));
      out.max_error = std::max(out.max_error, std::abs(analytic - fd));
      ++out.points;
    }
  }
  return out;
}

GradCheck check_network_gradients(const std::vector<std::size_t>& layer_sizes, ActivationKind activation,
                                  unsigned seed, double h) {
  const std::size_t k = layer_sizes.back() == 1 ? 2 : layer_sizes.back();
  const auto output = layer_sizes.back() == 1 ? OutputTransform::Logistic : OutputTransform::Softmax;
  Network net = init_network(layer_sizes, activation, output, seed);

  std::mt19937 rng(seed + 100);
  std::normal_distribution<double> normal(0.0, 1.5);
  const Eigen::Index n = 6;
  Matrix X(n, static_cast<Eigen::Index>(layer_sizes.front()));
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = normal(rng);
  Matrix T = Matrix::Zero(n, static_cast<Eigen::Index>(layer_sizes.back()));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto c = static_cast<Eigen::Index>(static_cast<std::size_t>(r) % k);
    if (output == OutputTransform::Logistic) T(r, 0) = c == 1 ? 1.0 : 0.0;
    else T(r, c) = 1.0;
  }
  const double alpha = 1e-2;

  Network::Gradients g;
  net.loss_and_gradients(X, T, alpha, g);

  GradCheck out;
  out.name = fmt::format("{}-layer network ({}, {}) gradients vs central differences", layer_sizes.size(),
                         to_string(activation.tag),
                         activation.derivative_mode == DerivativeMode::Exact ? "exact" : "paper");
  out.tolerance = 1e-4;
  auto compare = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = net.loss(X, T, alpha);
    param = saved - h;
    const double down = net.loss(X, T, alpha);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
    out.max_error = std::max(out.max_error, std::abs(analytic - fd) / scale);
    ++out.points;
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) compare(net.weights[l].data()[i], g.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) compare(net.biases[l][i], g.biases[l][i]);
  }
  return out;
}

std::vector<GradCheck> default_gradient_checks() {
  std::vector<GradCheck> out;
  out.push_back(check_activation_derivative(Activation::MArcsinh));
  out.push_back(check_network_gradients({2, 3, 2}, {Activation::MArcsinh, DerivativeMode::Exact}));
  out.push_back(check_network_gradients({4, 5, 3}, {Activation::MArcsinh, DerivativeMode::Exact}));
  out.push_back(check_network_gradients({4, 5, 3}, {Activation::Tanh, DerivativeMode::Exact}));
  out.push_back(check_network_gradients({4, 5, 3}, {Activation::Logistic, DerivativeMode::Exact}));
  return out;
}

}  // namespace marcsinh
