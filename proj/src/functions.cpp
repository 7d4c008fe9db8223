#include "marcsinh/functions.hpp"

#include <array>
#include <cmath>
#include <string>

#include "marcsinh/errors.hpp"

namespace marcsinh {

namespace {

double identity(double z) noexcept { return z; }
double logistic(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }
double tanh_value(double z) noexcept { return std::tanh(z); }
double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

// Derivative factors written in terms of the forward output.
double identity_prime(double) noexcept { return 1.0; }
double logistic_prime(double out) noexcept { return out * (1.0 - out); }
double tanh_prime(double out) noexcept { return 1.0 - out * out; }
double relu_prime(double out) noexcept { return out > 0.0 ? 1.0 : 0.0; }

struct ActivationOps {
  Activation tag;
  double (*forward)(double) noexcept;
  double (*derivative)(double) noexcept;
};

// One forward and one derivative map per tag, indexed by the enum value.
constexpr std::array<ActivationOps, 5> kActivations{{
    {Activation::Identity, identity, identity_prime},
    {Activation::Logistic, logistic, logistic_prime},
    {Activation::Tanh, tanh_value, tanh_prime},
    {Activation::Relu, relu, relu_prime},
    {Activation::MArcsinh, m_arcsinh, m_arcsinh_derivative},
}};

const ActivationOps& ops(Activation a) noexcept { return kActivations[static_cast<std::size_t>(a)]; }

static_assert([] {
  for (std::size_t i = 0; i < kActivations.size(); ++i) {
    if (static_cast<std::size_t>(kActivations[i].tag) != i) return false;
  }
  return true;
}());

}  // namespace

void KernelKind::validate() const {
  const bool uses_gamma = tag == Kernel::Poly || tag == Kernel::Rbf || tag == Kernel::Sigmoid;
  if (uses_gamma && !(gamma > 0.0)) {
    throw InvalidConfig("kernel gamma must be > 0, got " + std::to_string(gamma));
  }
  if (degree < 1) {
    throw InvalidConfig("kernel degree must be >= 1, got " + std::to_string(degree));
  }
}

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Logistic: return "logistic";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::MArcsinh: return "m_arcsinh";
  }
  return "?";
}

std::string_view to_string(Kernel k) noexcept {
  switch (k) {
    case Kernel::Linear: return "linear";
    case Kernel::Poly: return "poly";
    case Kernel::Rbf: return "rbf";
    case Kernel::Sigmoid: return "sigmoid";
    case Kernel::MArcsinh: return "m_arcsinh";
  }
  return "?";
}

double m_arcsinh(double x) noexcept {
  return (std::asinh(x) / 3.0) * (std::sqrt(std::abs(x)) / 4.0);
}

double m_arcsinh_derivative(double x) noexcept {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  const double root = std::sqrt(ax);
  // hypot keeps sqrt(x^2 + 1) finite for |x| beyond 1e154.
  const double first = root / (12.0 * std::hypot(x, 1.0));
  const double second = std::asinh(ax) / (24.0 * root);
  return first + second;
}

double activation_value(Activation a, double z) noexcept { return ops(a).forward(z); }

double activation_derivative_factor(const ActivationKind& kind, double z) noexcept {
  // MArcsinh uses the same closed form in both modes; only the argument the
  // caller supplies differs.
  return ops(kind.tag).derivative(z);
}

Matrix apply_activation(const ActivationKind& kind, const Matrix& z) {
  Matrix out = z;
  apply_activation_inplace(kind, out);
  return out;
}

void apply_activation_inplace(const ActivationKind& kind, Matrix& z) {
  const auto f = ops(kind.tag).forward;
  if (kind.tag == Activation::Identity) return;
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = f(z.data()[i]);
}

Matrix apply_activation_derivative(const ActivationKind& kind, const Matrix& z, const Matrix& delta) {
  Matrix out = delta;
  apply_activation_derivative_inplace(kind, z, out);
  return out;
}

void apply_activation_derivative_inplace(const ActivationKind& kind, const Matrix& z, Matrix& delta) {
  if (z.rows() != delta.rows() || z.cols() != delta.cols()) {
    throw DimensionMismatch("activation derivative: z and delta shapes differ");
  }
  if (kind.tag == Activation::Identity) return;
  const auto fprime = ops(kind.tag).derivative;
  for (Eigen::Index i = 0; i < delta.size(); ++i) delta.data()[i] *= fprime(z.data()[i]);
}

Matrix m_arcsinh_features(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = m_arcsinh(out.data()[i]);
  return out;
}

Matrix gram_matrix(const KernelKind& kind, const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw DimensionMismatch("gram_matrix: x has " + std::to_string(x.cols()) + " columns, y has " +
                            std::to_string(y.cols()));
  }
  kind.validate();

  switch (kind.tag) {
    case Kernel::Linear:
      return x * y.transpose();

    case Kernel::Poly: {
      Matrix k = ((kind.gamma * (x * y.transpose())).array() + kind.coef0).matrix();
      for (Eigen::Index i = 0; i < k.size(); ++i) {
        // Integer power by repeated multiplication; std::pow(double, int)
        // is not guaranteed to be exact for small degrees.
        const double base = k.data()[i];
        double acc = 1.0;
        for (int d = 0; d < kind.degree; ++d) acc *= base;
        k.data()[i] = acc;
      }
      return k;
    }

    case Kernel::Rbf: {
      const Vector xx = x.rowwise().squaredNorm();
      const Vector yy = y.rowwise().squaredNorm();
      Matrix k = x * y.transpose();
      for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
          // Rounding can push the expanded distance slightly below zero.
          const double d2 = std::max(0.0, xx[i] + yy[j] - 2.0 * k(i, j));
          k(i, j) = std::exp(-kind.gamma * d2);
        }
      }
      return k;
    }

    case Kernel::Sigmoid: {
      Matrix k = x * y.transpose();
      for (Eigen::Index i = 0; i < k.size(); ++i) {
        k.data()[i] = std::tanh(kind.gamma * k.data()[i] + kind.coef0);
      }
      return k;
    }

    case Kernel::MArcsinh:
      return m_arcsinh_features(x) * m_arcsinh_features(y).transpose();
  }
  throw InvalidConfig("unknown kernel");
}

}  // namespace marcsinh
