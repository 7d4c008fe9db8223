#pragma once

#include <string>
#include <vector>

#include "marcsinh/functions.hpp"

namespace marcsinh {

struct GradCheck {
  std::string name;
  double max_error = 0.0;  // worst entry, in the check's own error measure
  double tolerance = 0.0;
  std::size_t points = 0;

  bool passed() const noexcept { return max_error <= tolerance; }
};

// m_arcsinh_derivative against central differences on [-50, -0.01] and
// [0.01, 50], absolute error.
GradCheck check_activation_derivative(Activation a, std::size_t points = 2000, double h = 1e-5);

// Backprop weight and bias gradients of a small seeded network against
// central differences of the loss, error |a - f| / max(|a|, |f|, 1e-6).
GradCheck check_network_gradients(const std::vector<std::size_t>& layer_sizes, ActivationKind activation,
                                  unsigned seed = 7, double h = 1e-5);

// The fixed suite run by the `gradcheck` subcommand.
std::vector<GradCheck> default_gradient_checks();

}  // namespace marcsinh
