#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marcsinh/matrix.hpp"

namespace marcsinh {

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassStats> per_class;
};

// Held-out metrics plus how the fit went. `metrics` is empty when the fit
// did not produce a model.
struct EvalReport {
  std::optional<ClassificationReport> metrics;
  double train_time_s = 0.0;
  bool converged = true;
};

// cm(i, j) counts samples of true class i predicted as j.
Matrix confusion_matrix(const Labels& y_true, const Labels& y_pred, std::size_t k);

// Precision, recall and F1 per class, averaged with support weights. Any 0/0
// is reported as 0.
ClassificationReport weighted_report(const Matrix& cm);

ClassificationReport evaluate(const Labels& y_true, const Labels& y_pred, std::size_t k);

// Half away from zero, two decimals: 0.125 -> "0.13".
std::string format_2dp(double value);

}  // namespace marcsinh
