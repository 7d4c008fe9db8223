#include "marcsinh/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "marcsinh/errors.hpp"

namespace marcsinh {

namespace {

constexpr double kTau = 1e-12;  // curvature floor for non-positive-definite pairs
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix gather_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

}  // namespace

void SvmConfig::validate() const {
  kernel.validate();
  if (!(C > 0.0)) throw InvalidConfig(fmt::format("C must be > 0, got {}", C));
  if (!(tol > 0.0)) throw InvalidConfig(fmt::format("tol must be > 0, got {}", tol));
  if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
}

std::vector<double> balanced_class_weights(std::span<const std::size_t> class_counts, double C) {
  std::size_t total = 0;
  for (auto n : class_counts) {
    if (n == 0) throw EmptyClass();
    total += n;
  }
  const double k = static_cast<double>(class_counts.size());
  std::vector<double> out;
  out.reserve(class_counts.size());
  for (auto n : class_counts) out.push_back(C * static_cast<double>(total) / (k * static_cast<double>(n)));
  return out;
}

SmoResult binary_smo_solve(const Matrix& K, std::span<const int> y, std::span<const double> C, double tol,
                           std::size_t max_iter) {
  const auto n = static_cast<std::size_t>(K.rows());
  if (K.rows() != K.cols()) throw DimensionMismatch("binary_smo_solve: kernel matrix is not square");
  if (y.size() != n || C.size() != n) throw DimensionMismatch("binary_smo_solve: y, C and K sizes differ");
  for (std::size_t t = 0; t < n; ++t) {
    if (y[t] != 1 && y[t] != -1) throw std::invalid_argument("binary_smo_solve: labels must be +1 or -1");
    if (!(C[t] > 0.0)) throw InvalidConfig("binary_smo_solve: per-sample C must be > 0");
  }

  std::vector<double> alpha(n, 0.0);
  // Gradient of the minimisation form 1/2 a'Qa - sum(a), Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);

  auto in_up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < C[t] : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < C[t]; };

  std::size_t iter = 0;
  for (;; ++iter) {
    // Maximal violating pair: i maximises -y G over I_up, j minimises it over I_low.
    double g_max = -kInf;
    double g_min = kInf;
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    if (i == n || j == n || g_max - g_min < tol) break;
    if (iter >= max_iter) throw NotConverged(iter);

    const auto ki = K.row(static_cast<Eigen::Index>(i));
    const auto kj = K.row(static_cast<Eigen::Index>(j));
    const double yi = y[i];
    const double yj = y[j];
    const double Ci = C[i];
    const double Cj = C[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double kii = ki[static_cast<Eigen::Index>(i)];
    const double kjj = kj[static_cast<Eigen::Index>(j)];
    const double kij = ki[static_cast<Eigen::Index>(j)];

    // Curvature along the pair direction, the same for both label cases.
    double quad = kii + kjj - 2.0 * kij;
    if (quad <= 0.0) quad = kTau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > Ci - Cj) {
        if (alpha[i] > Ci) {
          alpha[i] = Ci;
          alpha[j] = Ci - diff;
        }
      } else if (alpha[j] > Cj) {
        alpha[j] = Cj;
        alpha[i] = Cj + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > Ci) {
        if (alpha[i] > Ci) {
          alpha[i] = Ci;
          alpha[j] = sum - Ci;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > Cj) {
        if (alpha[j] > Cj) {
          alpha[j] = Cj;
          alpha[i] = sum - Cj;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    // G_t += Q_ti * d_i + Q_tj * d_j
    const double di = (alpha[i] - old_i) * yi;
    const double dj = (alpha[j] - old_j) * yj;
    for (std::size_t t = 0; t < n; ++t) {
      const auto e = static_cast<Eigen::Index>(t);
      grad[t] += static_cast<double>(y[t]) * (ki[e] * di + kj[e] * dj);
    }
  }

  // Intercept: mean over free vectors, else the midpoint of the feasible
  // interval implied by the bounded ones.
  double upper = kInf;
  double lower = -kInf;
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = static_cast<double>(y[t]) * grad[t];
    if (alpha[t] >= C[t]) {
      if (y[t] == -1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (upper + lower) / 2.0;

  return {std::move(alpha), -rho, iter};
}

Vector PairModel::decision(const KernelKind& kernel, const Matrix& X) const {
  const Eigen::Map<const Vector> coef(dual_coef.data(), static_cast<Eigen::Index>(dual_coef.size()));
  Vector out = gram_matrix(kernel, X, support_vectors) * coef;
  out.array() += intercept;
  return out;
}

SvmModel::SvmModel(KernelKind kernel, std::size_t n_classes, std::size_t n_features, std::vector<PairModel> pairs)
    : kernel_(kernel), n_classes_(n_classes), n_features_(n_features), pairs_(std::move(pairs)) {}

SvmModel svc_fit(const Dataset& train, const SvmConfig& config) {
  config.validate();
  train.validate();

  const auto counts = train.class_counts();
  std::vector<int> present;
  std::vector<std::size_t> present_counts;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) {
      present.push_back(static_cast<int>(c));
      present_counts.push_back(counts[c]);
    }
  }
  if (present.size() < 2) throw SingleClass();

  // Class bounds from the full training set, shared by every pair.
  std::vector<double> class_C(counts.size(), config.C);
  if (config.class_weight == ClassWeight::Balanced) {
    const auto w = balanced_class_weights(present_counts, config.C);
    for (std::size_t p = 0; p < present.size(); ++p) class_C[static_cast<std::size_t>(present[p])] = w[p];
  }

  std::vector<std::vector<std::size_t>> rows_of(counts.size());
  for (std::size_t r = 0; r < train.y.size(); ++r) rows_of[static_cast<std::size_t>(train.y[r])].push_back(r);

  std::vector<PairModel> pairs;
  for (std::size_t a = 0; a < present.size(); ++a) {
    for (std::size_t b = a + 1; b < present.size(); ++b) {
      const int pos = present[a];
      const int neg = present[b];
      std::vector<std::size_t> rows = rows_of[static_cast<std::size_t>(pos)];
      const auto n_pos = rows.size();
      rows.insert(rows.end(), rows_of[static_cast<std::size_t>(neg)].begin(), rows_of[static_cast<std::size_t>(neg)].end());

      std::vector<int> y(rows.size(), -1);
      std::fill_n(y.begin(), n_pos, 1);
      std::vector<double> bound(rows.size(), class_C[static_cast<std::size_t>(neg)]);
      std::fill_n(bound.begin(), n_pos, class_C[static_cast<std::size_t>(pos)]);

      const Matrix Xp = gather_rows(train.X, rows);
      const Matrix K = gram_matrix(config.kernel, Xp, Xp);
      const auto sol = binary_smo_solve(K, y, bound, config.tol, config.max_iter);

      PairModel pm;
      pm.positive = pos;
      pm.negative = neg;
      pm.intercept = sol.b;
      pm.iterations = sol.iterations;
      std::vector<std::size_t> sv;
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (sol.alpha[t] > 0.0) {
          sv.push_back(t);
          pm.dual_coef.push_back(sol.alpha[t] * y[t]);
          pm.sample_bound.push_back(bound[t]);
        }
      }
      pm.support_vectors = gather_rows(Xp, sv);
      pairs.push_back(std::move(pm));
    }
  }
  return SvmModel(config.kernel, train.n_classes(), train.n_features(), std::move(pairs));
}

int resolve_vote(std::span<const int> votes, std::span<const double> decision_sums) {
  int best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    const auto b = static_cast<std::size_t>(best);
    if (votes[c] > votes[b] || (votes[c] == votes[b] && decision_sums[c] > decision_sums[b])) {
      best = static_cast<int>(c);
    }
  }
  return best;
}

Labels svc_predict(const SvmModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.n_features()) {
    throw DimensionMismatch(fmt::format("svc_predict: model expects {} features, got {}", model.n_features(), X.cols()));
  }
  const auto n = static_cast<std::size_t>(X.rows());
  const auto k = model.n_classes();
  std::vector<int> votes(n * k, 0);
  std::vector<double> sums(n * k, 0.0);

  for (const auto& pm : model.pairs()) {
    const Vector dec = pm.decision(model.kernel(), X);
    for (std::size_t r = 0; r < n; ++r) {
      const double d = dec[static_cast<Eigen::Index>(r)];
      const auto winner = static_cast<std::size_t>(d > 0.0 ? pm.positive : pm.negative);
      ++votes[r * k + winner];
      sums[r * k + winner] += std::abs(d);
    }
  }

  Labels out(n);
  for (std::size_t r = 0; r < n; ++r) {
    out[r] = resolve_vote(std::span<const int>(votes).subspan(r * k, k), std::span<const double>(sums).subspan(r * k, k));
  }
  return out;
}

}  // namespace marcsinh
