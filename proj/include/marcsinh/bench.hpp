#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marcsinh/data.hpp"
#include "marcsinh/functions.hpp"
#include "marcsinh/metrics.hpp"

namespace marcsinh {

enum class ClassifierKind { Svm, Mlp };
enum class TableFormat { Csv, Markdown };

std::string_view to_string(ClassifierKind c) noexcept;

// Name parsing for the CLI. Each throws std::invalid_argument on an unknown name.
ClassifierKind parse_classifier(std::string_view name);
Kernel parse_kernel(std::string_view name);
Activation parse_activation(std::string_view name);
TableFormat parse_format(std::string_view name);

inline const std::vector<Kernel> kAllKernels{Kernel::Linear, Kernel::Poly, Kernel::Rbf, Kernel::Sigmoid,
                                             Kernel::MArcsinh};
inline const std::vector<Activation> kAllActivations{Activation::Identity, Activation::Logistic, Activation::Tanh,
                                                     Activation::Relu, Activation::MArcsinh};

struct RunSpec {
  std::vector<std::string> datasets;
  std::vector<ClassifierKind> classifiers{ClassifierKind::Svm, ClassifierKind::Mlp};
  std::vector<Kernel> svm_functions = kAllKernels;
  std::vector<Activation> mlp_functions = kAllActivations;
  DerivativeMode derivative_mode = DerivativeMode::PaperFaithful;
  int svm_seed = 13;
  std::size_t svm_max_iter = 100000;
  unsigned mlp_seed = 1;
  std::size_t jobs = 1;  // cells run concurrently; row order does not depend on it
};

struct ResultRow {
  std::string dataset;
  std::string classifier;
  std::string function;
  EvalReport report;
  std::optional<std::string> error;  // the fit or evaluation threw something other than non-convergence
};

struct SuiteResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;  // datasets skipped because they could not be loaded

  bool any_failed() const;
};

using DatasetLoader = std::function<Partitioned(const std::string& name)>;

// Loader backed by a manifest and a data directory.
DatasetLoader manifest_loader(std::vector<ManifestEntry> manifest, std::filesystem::path data_dir);

// Every (dataset, classifier, function) cell in spec order. Training time is
// wall clock around the fit alone.
SuiteResult run_suite(const RunSpec& spec, const DatasetLoader& load);

// One grid cell on an already loaded partition.
ResultRow run_cell(const Partitioned& data, ClassifierKind classifier, const std::string& function,
                   const RunSpec& spec);

// Throws std::invalid_argument on empty rows.
std::string render_table(const std::vector<ResultRow>& rows, TableFormat format);

// Inverse of the CSV rendering. Throws DataError on a malformed table.
std::vector<ResultRow> parse_csv_table(const std::string& text);

}  // namespace marcsinh
