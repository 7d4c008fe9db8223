#pragma once

#include <string_view>

#include "marcsinh/matrix.hpp"

namespace marcsinh {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class Activation { Identity, Logistic, Tanh, Relu, MArcsinh };

// How the m-arcsinh derivative factor is evaluated during backprop.
//
// PaperFaithful evaluates the closed-form derivative at the activation
// *output* (the values cached by the forward pass), as the published
// scikit-learn extension does. Exact evaluates it at the pre-activation
// input, which is the true gradient; the caller is then responsible for
// passing pre-activations.
enum class DerivativeMode { PaperFaithful, Exact };

struct ActivationKind {
  Activation tag = Activation::Relu;
  DerivativeMode derivative_mode = DerivativeMode::PaperFaithful;

  // True when apply_activation_derivative expects pre-activation values.
  bool wants_pre_activation() const noexcept {
    return tag == Activation::MArcsinh && derivative_mode == DerivativeMode::Exact;
  }
};

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

enum class Kernel { Linear, Poly, Rbf, Sigmoid, MArcsinh };

struct KernelKind {
  Kernel tag = Kernel::Rbf;
  double gamma = 0.001;  // ignored by Linear and MArcsinh
  int degree = 3;        // Poly only
  double coef0 = 0.0;    // Poly and Sigmoid

  // Throws InvalidConfig on gamma <= 0 (Poly/Rbf/Sigmoid) or degree < 1.
  void validate() const;
};

std::string_view to_string(Activation a) noexcept;
std::string_view to_string(Kernel k) noexcept;

// ---------------------------------------------------------------------------
// Scalar maps
// ---------------------------------------------------------------------------

/// m-arcsinh: arcsinh(x) * sqrt(|x|) / 12. Odd and strictly increasing.
double m_arcsinh(double x) noexcept;

/// d/dx of m_arcsinh. The second term of the closed form is 0/0 at x = 0;
/// the limit there is 0 and is returned directly.
double m_arcsinh_derivative(double x) noexcept;

double activation_value(Activation a, double z) noexcept;

// Derivative factor for one entry. `z` is the post-activation output, except
// for MArcsinh in Exact mode where it is the pre-activation input.
double activation_derivative_factor(const ActivationKind& kind, double z) noexcept;

// ---------------------------------------------------------------------------
// Matrix maps
// ---------------------------------------------------------------------------

Matrix apply_activation(const ActivationKind& kind, const Matrix& z);
void apply_activation_inplace(const ActivationKind& kind, Matrix& z);

// delta ∘ f'(z). See activation_derivative_factor for what `z` must hold.
Matrix apply_activation_derivative(const ActivationKind& kind, const Matrix& z, const Matrix& delta);
void apply_activation_derivative_inplace(const ActivationKind& kind, const Matrix& z, Matrix& delta);

/// Elementwise feature map of the m-arcsinh kernel.
Matrix m_arcsinh_features(const Matrix& x);

/// Gram matrix K(x_i, y_j) for rows of x and y. Throws DimensionMismatch
/// unless x.cols() == y.cols().
///
/// The m-arcsinh kernel is the linear kernel on m_arcsinh_features(x) and
/// m_arcsinh_features(y); gamma is not used by it.
Matrix gram_matrix(const KernelKind& kind, const Matrix& x, const Matrix& y);

}  // namespace marcsinh
