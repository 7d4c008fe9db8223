// Acceptance suite: one verdict line per criterion, details indented below.
// Exit status 0 when everything passes, 1 on any FAIL, 77 when the only
// gaps are criteria whose datasets are not on disk.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "marcsinh/bench.hpp"
#include "marcsinh/data.hpp"
#include "marcsinh/errors.hpp"
#include "marcsinh/functions.hpp"
#include "marcsinh/metrics.hpp"
#include "marcsinh/mlp.hpp"
#include "marcsinh/svm.hpp"
#include "oracles.hpp"

using namespace marcsinh;

namespace {

enum class Verdict { Pass, Fail, Blocked };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& note) {
    notes.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", note));
    if (!ok && verdict == Verdict::Pass) verdict = Verdict::Fail;
  }
  void note(const std::string& text) { notes.push_back(text); }
  void block(const std::string& why) {
    notes.push_back("blocked: " + why);
    if (verdict == Verdict::Pass) verdict = Verdict::Blocked;
  }
};

// Closed interval with a rounding allowance, so 0.97 - 0.03 still admits 0.94.
bool within(double value, double target, double tol) { return std::abs(value - target) <= tol + 1e-9; }

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MARCSINH_DATA_DIR")) return env;
  return MARCSINH_DATA_DIR;
}

const std::vector<ManifestEntry>& manifest() {
  static const auto m = read_manifest(MARCSINH_MANIFEST);
  return m;
}

std::map<std::string, std::optional<Partitioned>> g_cache;

const Partitioned* load(const std::string& name, Outcome& out) {
  auto it = g_cache.find(name);
  if (it == g_cache.end()) {
    std::optional<Partitioned> p;
    try {
      p = load_partitions(find_entry(manifest(), name), data_dir());
      p->train.name = p->test.name = name;
    } catch (const DataError& e) {
      out.note(fmt::format("cannot load '{}': {}", name, e.what()));
    }
    it = g_cache.emplace(name, std::move(p)).first;
  }
  if (!it->second) {
    out.block(fmt::format("dataset '{}' is not available under {}", name, data_dir().string()));
    return nullptr;
  }
  return &*it->second;
}

ResultRow svm_cell(const Partitioned& d, const std::string& kernel) {
  return run_cell(d, ClassifierKind::Svm, kernel, RunSpec{});
}

ResultRow mlp_cell(const Partitioned& d, const std::string& activation) {
  return run_cell(d, ClassifierKind::Mlp, activation, RunSpec{});
}

std::string describe(const ResultRow& r) {
  if (r.error) return "error: " + *r.error;
  if (!r.report.metrics) return "did not converge";
  const auto& m = *r.report.metrics;
  return fmt::format("accuracy {:.4f}, weighted F1 {:.4f}", m.accuracy, m.weighted_f1);
}

void accuracy_check(Outcome& out, const ResultRow& r, double target, double tol) {
  const bool ok = r.report.metrics && within(r.report.metrics->accuracy, target, tol);
  out.check(ok, fmt::format("{} {} {}: {} (want {:.2f} +/- {:.2f})", r.dataset, r.classifier, r.function,
                            describe(r), target, tol));
}

// ---------------------------------------------------------------------------

Outcome c1_function_oracle() {
  Outcome out;
  double worst_value = 0.0;
  for (double x : {0.0, 1.0, -1.0, 10.0}) {
    worst_value = std::max(worst_value, std::abs(m_arcsinh(x) - oracle::m_arcsinh(x)));
  }
  out.check(worst_value <= 1e-6, fmt::format("value vs 50-digit evaluation at 0, +-1, 10: max error {:.2e}", worst_value));

  double worst_closed = 0.0;
  double worst_fd = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const double mag = 0.01 + (50.0 - 0.01) * i / (n - 1);
    for (double x : {mag, -mag}) {
      const double d = m_arcsinh_derivative(x);
      worst_closed = std::max(worst_closed, std::abs(d - oracle::m_arcsinh_derivative(x)));
      worst_fd = std::max(worst_fd, std::abs(d - oracle::m_arcsinh_central_difference(x, 1e-5)));
    }
  }
  out.check(worst_closed <= 1e-6, fmt::format("derivative vs 50-digit closed form: max error {:.2e}", worst_closed));
  out.check(worst_fd <= 1e-6, fmt::format("derivative vs central differences: max error {:.2e}", worst_fd));
  const double d0 = m_arcsinh_derivative(0.0);
  out.check(d0 == 0.0 && !std::isnan(d0), fmt::format("derivative(0) = {}", d0));
  return out;
}

Outcome c2_kernel_properties() {
  Outcome out;
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::uniform_int_distribution<int> d_dist(1, 20);
  std::normal_distribution<double> value(0.0, 5.0);
  double worst_sym = 0.0, worst_psd = 0.0, worst_factor = 0.0;
  for (int t = 0; t < 20; ++t) {
    Matrix x(n_dist(rng), d_dist(rng));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = value(rng);
    const Matrix K = gram_matrix({Kernel::MArcsinh}, x, x);
    worst_sym = std::max(worst_sym, (K - K.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(K), Eigen::EigenvaluesOnly);
    const double max_ev = eig.eigenvalues().cwiseAbs().maxCoeff();
    worst_psd = std::max(worst_psd, -eig.eigenvalues().minCoeff() / max_ev);

    // phi from the 50-digit oracle, not the library's feature map.
    Matrix phi(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) phi.data()[i] = oracle::m_arcsinh(x.data()[i]);
    worst_factor = std::max(worst_factor, (K - gram_matrix({Kernel::Linear}, phi, phi)).cwiseAbs().maxCoeff());
  }
  out.check(worst_sym <= 1e-10, fmt::format("symmetry: max |K - K'| {:.2e}", worst_sym));
  out.check(worst_psd <= 1e-8, fmt::format("PSD: worst -min_eig/max_eig {:.2e}", worst_psd));
  out.check(worst_factor <= 1e-12, fmt::format("equals linear Gram of phi(X): max diff {:.2e}", worst_factor));
  return out;
}

Outcome c3_gradient_check() {
  Outcome out;
  Network net = init_network({2, 3, 2}, {Activation::MArcsinh, DerivativeMode::Exact}, OutputTransform::Softmax, 5);
  std::mt19937 rng(9);
  std::normal_distribution<double> normal(0.0, 2.0);
  Matrix X(8, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = normal(rng);
  Matrix T = Matrix::Zero(8, 2);
  for (Eigen::Index r = 0; r < 8; ++r) T(r, r % 2) = 1.0;
  const double alpha = 1e-4;

  Network::Gradients g;
  net.loss_and_gradients(X, T, alpha, g);
  const double h = 1e-5;
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
      double& w = net.weights[l].data()[i];
      const double saved = w;
      w = saved + h;
      const double up = net.loss(X, T, alpha);
      w = saved - h;
      const double down = net.loss(X, T, alpha);
      w = saved;
      const double fd = (up - down) / (2 * h);
      const double an = g.weights[l].data()[i];
      worst = std::max(worst, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8}));
      ++count;
    }
  }
  out.check(worst <= 1e-4, fmt::format("2-3-2 m-arcsinh exact mode, {} weights: max relative error {:.2e}", count, worst));
  return out;
}

Outcome c4_metrics_oracle() {
  Outcome out;
  std::mt19937 rng(77);
  std::size_t mismatches = 0;
  double worst_identity = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int k = 2 + t % 9;
    std::uniform_int_distribution<int> count(0, 12);
    Matrix cm(k, k);
    std::vector<int> yt, yp;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const int c = count(rng) * (i == j ? 3 : 1);
        cm(i, j) = c;
        for (int s = 0; s < c; ++s) {
          yt.push_back(i);
          yp.push_back(j);
        }
      }
    }
    if (yt.empty()) continue;
    const auto r = weighted_report(cm);
    const auto o = oracle::brute_force_report(yt, yp, k);
    bool same = r.accuracy == o.accuracy && r.weighted_precision == o.wp && r.weighted_recall == o.wr &&
                r.weighted_f1 == o.wf1;
    for (int c = 0; c < k; ++c) {
      const auto& s = r.per_class[static_cast<std::size_t>(c)];
      same = same && s.precision == o.p[c] && s.recall == o.r[c] && s.f1 == o.f1[c];
    }
    mismatches += !same;
    worst_identity = std::max(worst_identity, std::abs(r.weighted_recall - r.accuracy));
  }
  out.check(mismatches == 0, fmt::format("50 random matrices vs brute force: {} mismatches", mismatches));
  out.check(worst_identity <= 1e-12, fmt::format("weighted recall vs accuracy: max diff {:.2e}", worst_identity));
  return out;
}

Outcome c5_iris() {
  Outcome out;
  const auto* d = load("iris", out);
  if (!d) return out;
  accuracy_check(out, svm_cell(*d, "linear"), 0.97, 0.03);
  accuracy_check(out, svm_cell(*d, "m_arcsinh"), 0.93, 0.04);
  const auto poly = svm_cell(*d, "poly");
  out.check(poly.report.metrics && poly.report.metrics->accuracy <= 0.45 + 1e-9,
            fmt::format("iris svm poly: {} (want <= 0.45)", describe(poly)));
  return out;
}

Outcome c6_optdigits() {
  Outcome out;
  const auto* d = load("optdigits", out);
  if (!d) return out;
  out.note(fmt::format("train {} rows, test {} rows", d->train.n_samples(), d->test.n_samples()));
  accuracy_check(out, svm_cell(*d, "m_arcsinh"), 0.97, 0.02);
  accuracy_check(out, svm_cell(*d, "rbf"), 0.98, 0.02);
  accuracy_check(out, mlp_cell(*d, "m_arcsinh"), 0.98, 0.03);
  return out;
}

Outcome c7_wifi() {
  Outcome out;
  const auto* d = load("wifi", out);
  if (!d) return out;
  accuracy_check(out, svm_cell(*d, "m_arcsinh"), 0.99, 0.01);
  const auto sig = svm_cell(*d, "sigmoid");
  out.check(sig.report.metrics && sig.report.metrics->accuracy <= 0.35 + 1e-9,
            fmt::format("wifi svm sigmoid: {} (want accuracy <= 0.35)", describe(sig)));
  return out;
}

Outcome c8_wdbc() {
  Outcome out;
  const auto* d = load("wdbc", out);
  if (!d) return out;
  const auto marc = svm_cell(*d, "m_arcsinh");
  out.check(marc.report.metrics && within(marc.report.metrics->weighted_f1, 0.97, 0.03),
            fmt::format("wdbc svm m_arcsinh: {} (want weighted F1 0.97 +/- 0.03)", describe(marc)));
  const auto sig = svm_cell(*d, "sigmoid");
  out.check(sig.report.metrics && sig.report.metrics->weighted_f1 <= 0.35 + 1e-9,
            fmt::format("wdbc svm sigmoid: {} (want weighted F1 <= 0.35)", describe(sig)));
  return out;
}

Outcome c9_heart_failure() {
  Outcome out;
  const auto* d = load("heart_failure", out);
  if (!d) return out;
  const auto poly = svm_cell(*d, "poly");
  out.check(!poly.error && !poly.report.converged && !poly.report.metrics,
            fmt::format("heart_failure svm poly: {}", describe(poly)));
  const auto md = render_table({poly}, TableFormat::Markdown);
  out.check(md.find("N/A | N/A | N/A | N/A") != std::string::npos, "rendered with N/A metric cells");
  return out;
}

Outcome c10_determinism() {
  Outcome out;
  RunSpec spec;
  spec.classifiers = {ClassifierKind::Svm};
  for (const auto& e : manifest()) {
    if (load(e.name, out)) spec.datasets.push_back(e.name);
  }
  // Missing datasets shrink the grid but do not block the property itself.
  if (out.verdict == Verdict::Blocked) out.verdict = Verdict::Pass;
  const auto loader = [](const std::string& name) { return *g_cache.at(name); };
  auto metric_columns = [&] {
    auto rows = run_suite(spec, loader).rows;
    for (auto& r : rows) r.report.train_time_s = 0.0;
    return render_table(rows, TableFormat::Csv);
  };
  const auto a = metric_columns();
  const auto b = metric_columns();
  out.check(a == b, fmt::format("{} datasets x {} kernels, two runs byte-identical", spec.datasets.size(),
                                spec.svm_functions.size()));
  return out;
}

// Paper accuracies for the MLP rows, in activation order
// identity, logistic, tanh, relu, m_arcsinh.
const std::vector<std::pair<std::string, std::vector<double>>> kMlpPaper{
    {"wdbc", {0.92, 0.92, 0.90, 0.92, 0.91}},          {"iris", {0.93, 0.93, 0.93, 0.93, 0.90}},
    {"heart_failure", {0.78, 0.78, 0.78, 0.78, 0.78}}, {"parkinsons", {0.77, 0.77, 0.77, 0.77, 0.77}},
    {"haberman", {0.76, 0.76, 0.76, 0.76, 0.76}},      {"digits", {0.91, 0.94, 0.93, 0.92, 0.92}},
    {"wine", {0.72, 0.72, 0.72, 0.72, 0.72}},          {"spectf", {0.54, 0.54, 0.54, 0.54, 0.54}},
    {"german", {0.79, 0.80, 0.79, 0.79, 0.79}},        {"pendigits", {1.00, 1.00, 1.00, 1.00, 1.00}},
    {"wifi", {0.98, 0.98, 0.98, 0.98, 0.98}},          {"coimbra", {0.46, 0.46, 0.46, 0.46, 0.46}},
};

Outcome c11_mlp_smoke() {
  Outcome out;
  bool any_missing = false;
  for (const auto& [name, targets] : kMlpPaper) {
    Outcome probe;
    const auto* d = load(name, probe);
    if (!d) {
      any_missing = true;
      out.note(fmt::format("skipped {}: not available", name));
      continue;
    }
    for (std::size_t i = 0; i < kAllActivations.size(); ++i) {
      accuracy_check(out, mlp_cell(*d, std::string(to_string(kAllActivations[i]))), targets[i], 0.07);
    }
  }
  if (any_missing && out.verdict == Verdict::Pass) out.verdict = Verdict::Blocked;
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1  m-arcsinh value and derivative oracle", c1_function_oracle},
      {"2  m-arcsinh kernel symmetric, PSD, factorised", c2_kernel_properties},
      {"3  MLP gradient check (2-3-2, exact mode)", c3_gradient_check},
      {"4  weighted metrics vs brute force", c4_metrics_oracle},
      {"5  Iris SVM accuracies", c5_iris},
      {"6  OptDigits SVM and MLP accuracies", c6_optdigits},
      {"7  Wi-Fi SVM accuracies", c7_wifi},
      {"8  WDBC SVM weighted F1", c8_wdbc},
      {"9  Heart failure SVM poly does not converge", c9_heart_failure},
      {"10 SVM grid determinism", c10_determinism},
      {"11 MLP rows within 0.07 of published accuracy", c11_mlp_smoke},
  };

  int failed = 0, blocked = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, fmt::format("unexpected exception: {}", e.what()));
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "BLOCKED";
    std::cout << fmt::format("{:<8}{}\n", tag, c.label);
    for (const auto& n : o.notes) std::cout << "        " << n << '\n';
    std::cout.flush();
    failed += o.verdict == Verdict::Fail;
    blocked += o.verdict == Verdict::Blocked;
  }
  std::cout << fmt::format("\n{} failed, {} blocked, {} passed\n", failed, blocked,
                           std::size(criteria) - static_cast<std::size_t>(failed + blocked));
  if (failed > 0) return 1;
  return blocked > 0 ? 77 : 0;
}
