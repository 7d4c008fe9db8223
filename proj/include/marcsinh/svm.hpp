#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "marcsinh/data.hpp"
#include "marcsinh/functions.hpp"
#include "marcsinh/matrix.hpp"

namespace marcsinh {

enum class ClassWeight { Uniform, Balanced };

struct SvmConfig {
  KernelKind kernel;
  double C = 1.0;
  ClassWeight class_weight = ClassWeight::Balanced;
  double tol = 1e-3;
  std::size_t max_iter = 100000;
  // Kept for parity with the reference interface; the solver is deterministic.
  int seed = 13;

  void validate() const;
};

/// Per-class box bounds C * N / (k * n_i). Throws EmptyClass on a zero count.
std::vector<double> balanced_class_weights(std::span<const std::size_t> class_counts, double C);

struct SmoResult {
  std::vector<double> alpha;
  double b = 0.0;
  std::size_t iterations = 0;
};

/// Solves the C-SVC dual
///
///   max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
///   s.t. 0 <= a_i <= C_i,  sum(a_i y_i) = 0
///
/// by SMO, picking the maximal violating pair each step. Stops once the
/// KKT gap is at most `tol`; throws NotConverged after `max_iter` pair
/// updates. y must be +1/-1.
SmoResult binary_smo_solve(const Matrix& K, std::span<const int> y, std::span<const double> C, double tol,
                           std::size_t max_iter);

/// One-vs-one sub-model for classes (positive, negative), positive < negative.
struct PairModel {
  int positive = 0;
  int negative = 1;
  Matrix support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i for each support vector
  std::vector<double> sample_bound;  // C_i of each support vector's class
  double intercept = 0.0;
  std::size_t iterations = 0;

  // Decision values for rows of X; > 0 votes for `positive`.
  Vector decision(const KernelKind& kernel, const Matrix& X) const;
};

class SvmModel {
 public:
  SvmModel(KernelKind kernel, std::size_t n_classes, std::size_t n_features, std::vector<PairModel> pairs);

  const KernelKind& kernel() const noexcept { return kernel_; }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const std::vector<PairModel>& pairs() const noexcept { return pairs_; }

 private:
  KernelKind kernel_;
  std::size_t n_classes_;
  std::size_t n_features_;
  std::vector<PairModel> pairs_;
};

SvmModel svc_fit(const Dataset& train, const SvmConfig& config);

/// Majority vote over the pair models. See resolve_vote for tie-breaking.
Labels svc_predict(const SvmModel& model, const Matrix& X);

/// Winner of one sample's vote. Ties go to the larger sum of |decision|
/// over the contests each class won, then to the lower class index.
int resolve_vote(std::span<const int> votes, std::span<const double> decision_sums);

}  // namespace marcsinh
