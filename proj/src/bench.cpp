#include "marcsinh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "marcsinh/errors.hpp"
#include "marcsinh/mlp.hpp"
#include "marcsinh/svm.hpp"

namespace marcsinh {

namespace {

constexpr std::string_view kCsvHeader =
    "dataset,classifier,function,train_time_s,accuracy,weighted_precision,weighted_recall,weighted_f1,converged";

template <class Clock = std::chrono::steady_clock>
double seconds_since(typename Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError(fmt::format("results line {}: bad number '{}'", line_no, s));
}

}  // namespace

std::string_view to_string(ClassifierKind c) noexcept { return c == ClassifierKind::Svm ? "svm" : "mlp"; }

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "svm") return ClassifierKind::Svm;
  if (name == "mlp") return ClassifierKind::Mlp;
  throw std::invalid_argument(fmt::format("unknown classifier '{}' (expected svm or mlp)", name));
}

Kernel parse_kernel(std::string_view name) {
  for (auto k : kAllKernels) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument(fmt::format("unknown SVM kernel '{}'", name));
}

Activation parse_activation(std::string_view name) {
  for (auto a : kAllActivations) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument(fmt::format("unknown MLP activation '{}'", name));
}

TableFormat parse_format(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "md" || name == "markdown") return TableFormat::Markdown;
  throw std::invalid_argument(fmt::format("unknown output format '{}' (expected csv or md)", name));
}

bool SuiteResult::any_failed() const {
  for (const auto& r : rows) {
    if (r.error) return true;
  }
  return false;
}

DatasetLoader manifest_loader(std::vector<ManifestEntry> manifest, std::filesystem::path data_dir) {
  return [manifest = std::move(manifest), data_dir = std::move(data_dir)](const std::string& name) {
    return load_partitions(find_entry(manifest, name), data_dir);
  };
}

ResultRow run_cell(const Partitioned& data, ClassifierKind classifier, const std::string& function,
                   const RunSpec& spec) {
  ResultRow row{data.train.name, std::string(to_string(classifier)), function, {}, std::nullopt};
  const std::size_t k = data.train.n_classes();
  try {
    Labels pred;
    if (classifier == ClassifierKind::Svm) {
      SvmConfig cfg;
      cfg.kernel.tag = parse_kernel(function);
      cfg.seed = spec.svm_seed;
      cfg.max_iter = spec.svm_max_iter;
      const auto start = std::chrono::steady_clock::now();
      const auto model = svc_fit(data.train, cfg);
      row.report.train_time_s = seconds_since(start);
      pred = svc_predict(model, data.test.X);
    } else {
      MlpConfig cfg;
      cfg.activation = {parse_activation(function), spec.derivative_mode};
      cfg.seed = spec.mlp_seed;
      const auto start = std::chrono::steady_clock::now();
      const auto model = mlp_fit(data.train, cfg);
      row.report.train_time_s = seconds_since(start);
      row.report.converged = model.converged;
      pred = mlp_predict(model, data.test.X);
    }
    row.report.metrics = evaluate(data.test.y, pred, k);
  } catch (const NotConverged&) {
    row.report.converged = false;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

SuiteResult run_suite(const RunSpec& spec, const DatasetLoader& load) {
  SuiteResult result;

  struct Cell {
    const Partitioned* data;
    ClassifierKind classifier;
    std::string function;
  };
  std::vector<Partitioned> loaded;
  loaded.reserve(spec.datasets.size());  // cells hold pointers into it
  for (const auto& name : spec.datasets) {
    try {
      loaded.push_back(load(name));
      loaded.back().train.name = name;
      loaded.back().test.name = name;
    } catch (const std::exception& e) {
      result.warnings.push_back(fmt::format("skipping dataset '{}': {}", name, e.what()));
    }
  }

  std::vector<Cell> cells;
  for (const auto& d : loaded) {
    for (auto c : spec.classifiers) {
      if (c == ClassifierKind::Svm) {
        for (auto k : spec.svm_functions) cells.push_back({&d, c, std::string(to_string(k))});
      } else {
        for (auto a : spec.mlp_functions) cells.push_back({&d, c, std::string(to_string(a))});
      }
    }
  }

  result.rows.resize(cells.size());
  const std::size_t jobs = std::max<std::size_t>(1, spec.jobs);
  for (std::size_t start = 0; start < cells.size(); start += jobs) {
    const std::size_t end = std::min(cells.size(), start + jobs);
    if (jobs == 1) {
      result.rows[start] = run_cell(*cells[start].data, cells[start].classifier, cells[start].function, spec);
      continue;
    }
    std::vector<std::future<ResultRow>> running;
    for (std::size_t i = start; i < end; ++i) {
      running.push_back(std::async(std::launch::async, [&, i] {
        return run_cell(*cells[i].data, cells[i].classifier, cells[i].function, spec);
      }));
    }
    for (std::size_t i = start; i < end; ++i) result.rows[i] = running[i - start].get();
  }
  return result;
}

std::string render_table(const std::vector<ResultRow>& rows, TableFormat format) {
  if (rows.empty()) throw std::invalid_argument("render_table: no rows");
  std::string out;
  if (format == TableFormat::Csv) {
    out += kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
      out += fmt::format("{},{},{},{}", r.dataset, r.classifier, r.function, r.report.train_time_s);
      if (r.report.metrics) {
        const auto& m = *r.report.metrics;
        out += fmt::format(",{},{},{},{}", m.accuracy, m.weighted_precision, m.weighted_recall, m.weighted_f1);
      } else {
        out += ",,,,";
      }
      out += r.error ? ",error\n" : (r.report.converged ? ",true\n" : ",false\n");
    }
    return out;
  }

  out += "| Dataset | Classifier | Function | Training time (s) | Accuracy | Weighted precision | Weighted recall | Weighted F1 |\n";
  out += "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += fmt::format("| {} | {} | {} | ", r.dataset, r.classifier, r.function);
    if (r.report.metrics) {
      const auto& m = *r.report.metrics;
      out += fmt::format("{:.3f} | {} | {} | {} | {} |\n", r.report.train_time_s, format_2dp(m.accuracy),
                         format_2dp(m.weighted_precision), format_2dp(m.weighted_recall), format_2dp(m.weighted_f1));
    } else {
      out += fmt::format("{} | N/A | N/A | N/A | N/A |\n", r.error ? "Failed" : "Did not converge");
    }
  }
  return out;
}

std::vector<ResultRow> parse_csv_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw DataError("results: missing or unexpected header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw DataError(fmt::format("results line {}: expected 9 fields, got {}", line_no, f.size()));
    ResultRow r;
    r.dataset = f[0];
    r.classifier = f[1];
    r.function = f[2];
    r.report.train_time_s = parse_double(f[3], line_no);
    if (!f[4].empty()) {
      ClassificationReport m;
      m.accuracy = parse_double(f[4], line_no);
      m.weighted_precision = parse_double(f[5], line_no);
      m.weighted_recall = parse_double(f[6], line_no);
      m.weighted_f1 = parse_double(f[7], line_no);
      r.report.metrics = m;
    }
    if (f[8] == "true") {
      r.report.converged = true;
    } else if (f[8] == "false") {
      r.report.converged = false;
    } else if (f[8] == "error") {
      r.error = "";
    } else {
      throw DataError(fmt::format("results line {}: bad converged value '{}'", line_no, f[8]));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace marcsinh
