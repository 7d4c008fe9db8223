// marcsinh: fetch datasets, run the classifier grid, check gradients.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "marcsinh/bench.hpp"
#include "marcsinh/errors.hpp"
#include "marcsinh/gradcheck.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kCellsFailed = 3 };

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunArgs {
  std::string manifest;
  std::string data;
  std::string datasets = "all";
  std::string classifiers = "svm,mlp";
  std::string functions = "all";
  std::string format = "csv";
  std::string out;
  std::string derivative_mode = "paper";
  std::size_t jobs = 1;
};

// Builds the spec, throwing std::invalid_argument on anything unknown.
marcsinh::RunSpec make_spec(const RunArgs& a, const std::vector<marcsinh::ManifestEntry>& manifest) {
  using namespace marcsinh;
  RunSpec spec;
  spec.jobs = a.jobs;
  if (a.derivative_mode == "paper") {
    spec.derivative_mode = DerivativeMode::PaperFaithful;
  } else if (a.derivative_mode == "exact") {
    spec.derivative_mode = DerivativeMode::Exact;
  } else {
    throw std::invalid_argument("--derivative-mode must be paper or exact");
  }

  if (a.datasets == "all") {
    for (const auto& e : manifest) spec.datasets.push_back(e.name);
  } else {
    for (const auto& name : split_list(a.datasets)) {
      bool known = false;
      for (const auto& e : manifest) known = known || e.name == name;
      if (!known) throw std::invalid_argument(fmt::format("unknown dataset '{}'", name));
      spec.datasets.push_back(name);
    }
  }

  spec.classifiers.clear();
  for (const auto& c : split_list(a.classifiers)) spec.classifiers.push_back(parse_classifier(c));

  if (a.functions != "all") {
    // A name applies to every requested classifier that has it; m_arcsinh
    // therefore selects both the kernel and the activation.
    spec.svm_functions.clear();
    spec.mlp_functions.clear();
    for (const auto& f : split_list(a.functions)) {
      bool used = false;
      for (auto k : kAllKernels) {
        if (to_string(k) == f) {
          spec.svm_functions.push_back(k);
          used = true;
        }
      }
      for (auto act : kAllActivations) {
        if (to_string(act) == f) {
          spec.mlp_functions.push_back(act);
          used = true;
        }
      }
      if (!used) throw std::invalid_argument(fmt::format("unknown function '{}'", f));
    }
  }
  if (spec.classifiers.empty() || spec.datasets.empty()) throw std::invalid_argument("nothing to run");
  return spec;
}

int do_fetch(const std::string& manifest_path, const std::string& dest, std::size_t jobs) {
  std::vector<marcsinh::ManifestEntry> manifest;
  try {
    manifest = marcsinh::read_manifest(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  const auto results = marcsinh::fetch(manifest, dest, jobs);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << fmt::format("{}: {} downloaded, {} up to date\n", r.entry, r.downloaded, r.skipped);
    for (const auto& err : r.errors) std::cerr << fmt::format("{}: {}\n", r.entry, err);
    ok = ok && r.ok();
  }
  return ok ? kOk : kData;
}

int do_run(const RunArgs& args) {
  std::vector<marcsinh::ManifestEntry> manifest;
  try {
    manifest = marcsinh::read_manifest(args.manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }

  marcsinh::RunSpec spec;
  marcsinh::TableFormat format{};
  try {
    spec = make_spec(args, manifest);
    format = marcsinh::parse_format(args.format);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  const auto result = marcsinh::run_suite(spec, marcsinh::manifest_loader(manifest, args.data));
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (result.rows.empty()) {
    std::cerr << "error: no dataset could be loaded\n";
    return kData;
  }
  for (const auto& r : result.rows) {
    if (r.error) std::cerr << fmt::format("{} {} {}: {}\n", r.dataset, r.classifier, r.function, *r.error);
  }

  const auto text = marcsinh::render_table(result.rows, format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "error: cannot write " << args.out << '\n';
      return kData;
    }
  }
  return result.any_failed() ? kCellsFailed : kOk;
}

int do_gradcheck() {
  bool ok = true;
  for (const auto& c : marcsinh::default_gradient_checks()) {
    std::cout << fmt::format("{} {}: max error {:.3e} (tolerance {:.0e}, {} points)\n", c.passed() ? "PASS" : "FAIL",
                             c.name, c.max_error, c.tolerance, c.points);
    ok = ok && c.passed();
  }
  return ok ? kOk : kCellsFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"m-arcsinh kernel and activation benchmark"};
  app.require_subcommand(1);

  std::string fetch_manifest;
  std::string fetch_dest;
  std::size_t fetch_jobs = 1;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download the datasets listed in a manifest");
  fetch_cmd->add_option("--manifest", fetch_manifest, "Manifest file")->required();
  fetch_cmd->add_option("--dest", fetch_dest, "Destination directory")->required();
  fetch_cmd->add_option("--jobs", fetch_jobs, "Parallel downloads")->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate the classifier grid");
  run_cmd->add_option("--manifest", run.manifest, "Manifest file")->required();
  run_cmd->add_option("--data", run.data, "Directory holding fetched files")->required();
  run_cmd->add_option("--datasets", run.datasets, "Comma-separated dataset names, or all");
  run_cmd->add_option("--classifiers", run.classifiers, "Comma-separated subset of svm,mlp");
  run_cmd->add_option("--functions", run.functions, "Comma-separated kernels/activations, or all");
  run_cmd->add_option("--format", run.format, "csv or md");
  run_cmd->add_option("--out", run.out, "Output file (default stdout)");
  run_cmd->add_option("--derivative-mode", run.derivative_mode, "paper or exact");
  run_cmd->add_option("--jobs", run.jobs, "Grid cells run in parallel")->check(CLI::PositiveNumber);

  app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (fetch_cmd->parsed()) return do_fetch(fetch_manifest, fetch_dest, fetch_jobs);
  if (run_cmd->parsed()) return do_run(run);
  return do_gradcheck();
}
