#include "marcsinh/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "marcsinh/errors.hpp"

namespace marcsinh {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> split_fields(const std::string& line, FileFormat format) {
  std::vector<std::string> out;
  if (format == FileFormat::Whitespace) {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  const char sep = format == FileFormat::Comma ? ',' : '\t';
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(unquote(trim(std::string_view(line).substr(start, pos - start))));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t\r\n") == std::string::npos; }

struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> features;
  std::vector<std::string> labels;
};

RawTable read_table(const ManifestEntry& entry, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(entry.name + ": cannot open " + path.string());

  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ncols = 0;
  std::size_t label_col = 0;
  std::vector<bool> is_feature;

  auto resolve_columns = [&](std::size_t n) {
    ncols = n;
    if (table.column_names.empty()) {
      for (std::size_t c = 0; c < n; ++c) table.column_names.push_back(std::to_string(c));
    }
    switch (entry.label.kind) {
      case LabelPosition::Kind::First: label_col = 0; break;
      case LabelPosition::Kind::Last: label_col = n - 1; break;
      case LabelPosition::Kind::Named: {
        const auto it = std::find(table.column_names.begin(), table.column_names.end(), entry.label.column);
        if (it == table.column_names.end()) {
          throw DataError(entry.name + ": label column '" + entry.label.column + "' not found in " + path.string());
        }
        label_col = static_cast<std::size_t>(it - table.column_names.begin());
        break;
      }
    }
    is_feature.assign(n, true);
    is_feature[label_col] = false;
    for (const auto& drop : entry.drop_columns) {
      auto it = std::find(table.column_names.begin(), table.column_names.end(), drop);
      std::size_t idx = 0;
      if (it != table.column_names.end()) {
        idx = static_cast<std::size_t>(it - table.column_names.begin());
      } else if (auto v = parse_number(drop); v && *v >= 0 && std::floor(*v) == *v && *v < static_cast<double>(n)) {
        idx = static_cast<std::size_t>(*v);
      } else {
        throw DataError(entry.name + ": drop column '" + drop + "' not found in " + path.string());
      }
      if (idx == label_col) throw DataError(entry.name + ": cannot drop the label column '" + drop + "'");
      is_feature[idx] = false;
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = split_fields(line, entry.format);

    if (entry.has_header && table.column_names.empty()) {
      table.column_names = std::move(fields);
      resolve_columns(table.column_names.size());
      continue;
    }
    if (ncols == 0) resolve_columns(fields.size());
    if (fields.size() != ncols) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed row, expected " +
                      std::to_string(ncols) + " fields, got " + std::to_string(fields.size()));
    }

    std::vector<double> row;
    row.reserve(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!is_feature[c]) continue;
      const auto v = parse_number(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": column '" + table.column_names[c] +
                        "' has non-numeric value '" + fields[c] + "'");
      }
      row.push_back(*v);
    }
    table.features.push_back(std::move(row));
    table.labels.push_back(fields[label_col]);
  }
  if (table.features.empty()) throw DataError(entry.name + ": no data rows in " + path.string());
  return table;
}

// Sorted ascending: numerically when every label is a number, else as text.
std::vector<std::string> class_table(const std::vector<const RawTable*>& tables) {
  std::set<std::string> unique;
  for (const auto* t : tables) unique.insert(t->labels.begin(), t->labels.end());
  std::vector<std::string> names(unique.begin(), unique.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const auto& s) { return parse_number(s).has_value(); });
  if (numeric) {
    std::stable_sort(names.begin(), names.end(),
                     [](const auto& a, const auto& b) { return *parse_number(a) < *parse_number(b); });
  }
  return names;
}

Dataset to_dataset(const RawTable& t, const std::vector<std::string>& classes, const std::string& name) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<int>(i);

  Dataset d;
  d.name = name;
  d.class_names = classes;
  const auto rows = static_cast<Eigen::Index>(t.features.size());
  const auto cols = static_cast<Eigen::Index>(t.features.front().size());
  d.X.resize(rows, cols);
  d.y.reserve(t.features.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) d.X(r, c) = t.features[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    d.y.push_back(index.at(t.labels[static_cast<std::size_t>(r)]));
  }
  return d;
}

Dataset slice_rows(const Dataset& d, std::size_t begin, std::size_t end) {
  Dataset out;
  out.name = d.name;
  out.class_names = d.class_names;
  out.X = d.X.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  out.y.assign(d.y.begin() + static_cast<std::ptrdiff_t>(begin), d.y.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

FileFormat parse_format(const std::string& v, std::size_t line_no) {
  const auto s = lower(v);
  if (s == "comma" || s == "csv") return FileFormat::Comma;
  if (s == "whitespace" || s == "space") return FileFormat::Whitespace;
  if (s == "tab" || s == "tsv") return FileFormat::Tab;
  throw DataError("manifest line " + std::to_string(line_no) + ": unknown format '" + v + "'");
}

bool parse_bool(const std::string& v, std::size_t line_no) {
  const auto s = lower(v);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw DataError("manifest line " + std::to_string(line_no) + ": expected true/false, got '" + v + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (int label : y) ++counts.at(static_cast<std::size_t>(label));
  return counts;
}

std::vector<std::string> Dataset::decode_labels() const {
  std::vector<std::string> out;
  out.reserve(y.size());
  for (int label : y) out.push_back(class_names.at(static_cast<std::size_t>(label)));
  return out;
}

void Dataset::validate() const {
  if (y.size() != n_samples()) {
    throw DataError(name + ": " + std::to_string(y.size()) + " labels for " + std::to_string(n_samples()) + " rows");
  }
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes()) {
      throw DataError(name + ": label " + std::to_string(label) + " outside class table");
    }
  }
}

Partitioned split(const Dataset& d, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  const std::size_t n = d.n_samples();
  // The slack keeps products like 0.8 * 150 from rounding up past an integer.
  const double exact = (1.0 - test_fraction) * static_cast<double>(n);
  const auto n_train = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  if (n_train == 0 || n_train >= n) {
    throw DataError(d.name + ": split of " + std::to_string(n) + " rows leaves an empty partition");
  }
  return {slice_rows(d, 0, n_train), slice_rows(d, n_train, n)};
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

void ManifestEntry::validate() const {
  if (name.empty()) throw DataError("manifest entry without a name");
  if (urls.empty() || urls.size() > 2) {
    throw DataError(name + ": expected 1 or 2 urls, got " + std::to_string(urls.size()));
  }
  if (urls.size() == 1 && !test_fraction) throw DataError(name + ": single-file entry needs test_fraction");
  if (urls.size() == 2 && test_fraction) throw DataError(name + ": test_fraction given for a two-file entry");
  if (test_fraction && !(*test_fraction > 0.0 && *test_fraction < 1.0)) {
    throw DataError(name + ": test_fraction must be in (0, 1)");
  }
  if (label.kind == LabelPosition::Kind::Named && !has_header) {
    const auto& c = label.column;
    if (c.empty() || c.find_first_not_of("0123456789") != std::string::npos) {
      throw DataError(name + ": without a header the label column must be first, last or an index");
    }
  }
}

std::vector<fs::path> ManifestEntry::local_files() const {
  std::vector<fs::path> out;
  for (const auto& url : urls) {
    auto path = url.substr(0, url.find_first_of("?#"));
    const auto slash = path.find_last_of('/');
    const auto base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.empty()) throw DataError(name + ": cannot derive a file name from " + url);
    out.push_back(fs::path(name) / base);
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw DataError("manifest line " + std::to_string(line_no) + ": unterminated section");
      entries.emplace_back().name = trim(std::string_view(text).substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw DataError("manifest line " + std::to_string(line_no) + ": expected key = value");
    if (entries.empty()) throw DataError("manifest line " + std::to_string(line_no) + ": key outside a [section]");

    auto& e = entries.back();
    const auto key = lower(trim(std::string_view(text).substr(0, eq)));
    const auto value = trim(std::string_view(text).substr(eq + 1));

    if (key == "url") {
      e.urls.push_back(value);
    } else if (key == "format") {
      e.format = parse_format(value, line_no);
    } else if (key == "header") {
      e.has_header = parse_bool(value, line_no);
    } else if (key == "label") {
      const auto v = lower(value);
      if (v == "first") {
        e.label = {LabelPosition::Kind::First, {}};
      } else if (v == "last") {
        e.label = {LabelPosition::Kind::Last, {}};
      } else {
        e.label = {LabelPosition::Kind::Named, value};
      }
    } else if (key == "drop") {
      std::istringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (auto t = trim(tok); !t.empty()) e.drop_columns.push_back(t);
      }
    } else if (key == "test_fraction") {
      const auto v = parse_number(value);
      if (!v) throw DataError("manifest line " + std::to_string(line_no) + ": bad test_fraction '" + value + "'");
      e.test_fraction = *v;
    } else {
      throw DataError("manifest line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  std::set<std::string> seen;
  for (const auto& e : entries) {
    e.validate();
    if (!seen.insert(e.name).second) throw DataError("manifest: duplicate entry '" + e.name + "'");
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  return parse_manifest(in);
}

const ManifestEntry& find_entry(const std::vector<ManifestEntry>& manifest, const std::string& name) {
  for (const auto& e : manifest) {
    if (e.name == name) return e;
  }
  throw DataError("no dataset named '" + name + "' in manifest");
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

std::variant<Dataset, Partitioned> load_dataset(const ManifestEntry& entry, const fs::path& dir) {
  entry.validate();
  const auto files = entry.local_files();

  std::vector<RawTable> tables;
  for (const auto& f : files) tables.push_back(read_table(entry, dir / f));

  std::vector<const RawTable*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  const auto classes = class_table(ptrs);

  if (tables.size() == 2 && tables[0].features.front().size() != tables[1].features.front().size()) {
    throw DataError(entry.name + ": train and test files have different feature counts");
  }

  std::vector<Dataset> sets;
  for (const auto& t : tables) {
    auto d = to_dataset(t, classes, entry.name);
    d.validate();
    sets.push_back(std::move(d));
  }
  if (sets.size() == 1) return std::move(sets.front());
  return Partitioned{std::move(sets[0]), std::move(sets[1])};
}

Partitioned load_partitions(const ManifestEntry& entry, const fs::path& dir) {
  auto loaded = load_dataset(entry, dir);
  if (auto* p = std::get_if<Partitioned>(&loaded)) return std::move(*p);
  return split(std::get<Dataset>(loaded), *entry.test_fraction);
}

}  // namespace marcsinh
