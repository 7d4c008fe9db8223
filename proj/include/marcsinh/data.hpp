#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "marcsinh/matrix.hpp"

namespace marcsinh {

struct Dataset {
  Matrix X;
  Labels y;
  std::vector<std::string> class_names;  // raw label text, index = class id
  std::string name;

  std::size_t n_samples() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(X.cols()); }
  std::size_t n_classes() const noexcept { return class_names.size(); }

  // Per-class sample counts, length n_classes().
  std::vector<std::size_t> class_counts() const;

  // Raw label text for every sample.
  std::vector<std::string> decode_labels() const;

  // Throws DataError unless y.size() == rows and every label < n_classes().
  void validate() const;
};

// Both partitions share one class table.
struct Partitioned {
  Dataset train;
  Dataset test;
};

// Train keeps the first ceil((1 - test_fraction) * n) rows in order, test
// the rest. Throws DataError if either side would be empty and
// std::invalid_argument unless 0 < test_fraction < 1.
Partitioned split(const Dataset& d, double test_fraction);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

enum class FileFormat { Comma, Whitespace, Tab };

struct LabelPosition {
  enum class Kind { First, Last, Named };
  Kind kind = Kind::Last;
  std::string column;  // Named only: header name, or 0-based index without a header
};

struct ManifestEntry {
  std::string name;
  std::vector<std::string> urls;  // 1: single file split by test_fraction; 2: train, test
  FileFormat format = FileFormat::Comma;
  bool has_header = false;
  LabelPosition label;
  std::vector<std::string> drop_columns;  // header names or 0-based column indices
  std::optional<double> test_fraction;

  // Throws DataError when the entry is inconsistent.
  void validate() const;

  // Local file names, one per URL: "<name>/<last URL path segment>".
  std::vector<std::filesystem::path> local_files() const;
};

// Manifest text format, one block per dataset:
//
//   [iris]
//   url = https://.../iris.data
//   format = comma            # comma | whitespace | tab
//   header = false
//   label = last              # first | last | <column name or index>
//   drop = 0, id              # optional
//   test_fraction = 0.2       # single-file entries only
//
// `url` may repeat (train first, then test). '#' starts a comment.
std::vector<ManifestEntry> parse_manifest(std::istream& in);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

const ManifestEntry& find_entry(const std::vector<ManifestEntry>& manifest, const std::string& name);

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

// Parses one or two files per the entry. Labels are encoded in ascending raw
// order (numeric when every label parses as a number) over all files of the
// entry. Errors carry the file, line and column.
std::variant<Dataset, Partitioned> load_dataset(const ManifestEntry& entry, const std::filesystem::path& dir);

// Train/test view of an entry: predefined files as-is, single files split by
// the entry's test_fraction.
Partitioned load_partitions(const ManifestEntry& entry, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Fetching
// ---------------------------------------------------------------------------

struct FetchResult {
  std::string entry;
  std::size_t downloaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;

  bool ok() const noexcept { return errors.empty(); }
};

// Downloads every URL of every entry into dest. Files already present with
// the remote size are left alone. A failing entry does not stop the others.
std::vector<FetchResult> fetch(const std::vector<ManifestEntry>& manifest, const std::filesystem::path& dest,
                               std::size_t jobs = 1);

}  // namespace marcsinh
