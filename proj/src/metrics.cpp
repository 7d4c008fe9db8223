#include "marcsinh/metrics.hpp"

#include <cmath>
#include <fmt/format.h>

#include "marcsinh/errors.hpp"

namespace marcsinh {

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Matrix confusion_matrix(const Labels& y_true, const Labels& y_pred, std::size_t k) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionMismatch(fmt::format("confusion_matrix: {} true labels, {} predictions", y_true.size(), y_pred.size()));
  }
  Matrix cm = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = y_true[i];
    const auto p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k || static_cast<std::size_t>(p) >= k) {
      throw std::out_of_range(fmt::format("confusion_matrix: label outside 0..{}", k - 1));
    }
    cm(t, p) += 1.0;
  }
  return cm;
}

ClassificationReport weighted_report(const Matrix& cm) {
  if (cm.size() == 0 || cm.rows() != cm.cols()) throw DimensionMismatch("weighted_report: empty or non-square matrix");
  const double n = cm.sum();
  if (!(n > 0.0)) throw DimensionMismatch("weighted_report: matrix has no samples");

  ClassificationReport r;
  r.accuracy = cm.trace() / n;
  const Vector row_sums = cm.rowwise().sum();
  const Eigen::RowVectorXd col_sums = cm.colwise().sum();

  for (Eigen::Index c = 0; c < cm.rows(); ++c) {
    ClassStats s;
    const double tp = cm(c, c);
    s.precision = safe_ratio(tp, col_sums[c]);
    s.recall = safe_ratio(tp, row_sums[c]);
    s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    s.support = static_cast<std::size_t>(row_sums[c]);
    r.per_class.push_back(s);

    const double w = row_sums[c] / n;
    r.weighted_precision += w * s.precision;
    r.weighted_recall += w * s.recall;
    r.weighted_f1 += w * s.f1;
  }
  return r;
}

ClassificationReport evaluate(const Labels& y_true, const Labels& y_pred, std::size_t k) {
  return weighted_report(confusion_matrix(y_true, y_pred, k));
}

std::string format_2dp(double value) {
  // Scale by 100 in decimal first so 0.125 does not round down through its
  // binary representation.
  const double scaled = std::stod(fmt::format("{:.10f}", value * 100.0));
  return fmt::format("{:.2f}", std::round(scaled) / 100.0);
}

}  // namespace marcsinh
