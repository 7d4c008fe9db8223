#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "marcsinh/data.hpp"
#include "marcsinh/errors.hpp"

// Eigen must come before httplib; see src/fetch.cpp.
#include <httplib.h>

using namespace marcsinh;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("marcsinh_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

ManifestEntry entry_from(const std::string& text) {
  std::istringstream in(text);
  auto m = parse_manifest(in);
  EXPECT_EQ(m.size(), 1u);
  return m.front();
}

Dataset counting(std::size_t n) {
  Dataset d;
  d.name = "count";
  d.X.resize(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.X(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
    d.y.push_back(static_cast<int>(i % 2));
  }
  d.class_names = {"a", "b"};
  return d;
}

}  // namespace

TEST(Split, TenRowsThirtyPercent) {
  const auto p = split(counting(10), 0.3);
  ASSERT_EQ(p.train.n_samples(), 7u);
  ASSERT_EQ(p.test.n_samples(), 3u);
  EXPECT_EQ(p.train.X(6, 0), 6.0);
  EXPECT_EQ(p.test.X(0, 0), 7.0);
}

TEST(Split, TrainTakesCeiling) {
  EXPECT_EQ(split(counting(150), 0.2).train.n_samples(), 120u);
  EXPECT_EQ(split(counting(1797), 0.3).train.n_samples(), 1258u);
  EXPECT_EQ(split(counting(569), 0.2).train.n_samples(), 456u);
  EXPECT_EQ(split(counting(7), 0.5).train.n_samples(), 4u);
}

TEST(Split, ConcatenationRestoresOriginal) {
  for (double f : {0.1, 0.2, 0.25, 0.3, 0.5, 0.9}) {
    const auto d = counting(37);
    const auto p = split(d, f);
    Matrix joined(d.X.rows(), 1);
    joined << p.train.X, p.test.X;
    EXPECT_EQ(joined, d.X);
    Labels y = p.train.y;
    y.insert(y.end(), p.test.y.begin(), p.test.y.end());
    EXPECT_EQ(y, d.y);
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split(counting(10), 0.0), std::invalid_argument);
  EXPECT_THROW(split(counting(10), 1.0), std::invalid_argument);
  EXPECT_THROW(split(counting(1), 0.5), DataError);
}

TEST(Manifest, ParsesAllKeys) {
  std::istringstream in(R"(# comment
[park]
url = http://x/parkinsons.data   # trailing comment
format = comma
header = true
label = status
drop = name, 3
test_fraction = 0.2

[pen]
url = http://x/a.tra
url = http://x/a.tes
format = whitespace
label = first
)");
  const auto m = parse_manifest(in);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].name, "park");
  EXPECT_EQ(m[0].urls, std::vector<std::string>{"http://x/parkinsons.data"});
  EXPECT_TRUE(m[0].has_header);
  EXPECT_EQ(m[0].label.kind, LabelPosition::Kind::Named);
  EXPECT_EQ(m[0].label.column, "status");
  EXPECT_EQ(m[0].drop_columns, (std::vector<std::string>{"name", "3"}));
  EXPECT_DOUBLE_EQ(*m[0].test_fraction, 0.2);
  EXPECT_EQ(m[1].urls.size(), 2u);
  EXPECT_EQ(m[1].format, FileFormat::Whitespace);
  EXPECT_EQ(m[1].label.kind, LabelPosition::Kind::First);
  EXPECT_EQ(m[1].local_files()[1], fs::path("pen") / "a.tes");
}

TEST(Manifest, RejectsInconsistentEntries) {
  for (const char* bad : {"[a]\nurl = u\n",                                    // missing test_fraction
                          "[a]\nurl = u\nurl = v\ntest_fraction = 0.2\n",      // fraction on a pair
                          "[a]\nurl = u\ntest_fraction = 1.5\n",               // out of range
                          "[a]\nurl = u\ntest_fraction = 0.2\nlabel = name\n",  // named label, no header
                          "[a]\nurl = u\ntest_fraction = 0.2\ncolour = red\n",  // unknown key
                          "url = u\n",                                          // no section
                          "[a]\nurl = u\ntest_fraction = 0.2\n[a]\nurl = u\ntest_fraction = 0.2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_manifest(in), DataError) << bad;
  }
}

TEST(Manifest, ShippedManifestIsValid) {
  const auto m = read_manifest(MARCSINH_MANIFEST);
  EXPECT_EQ(m.size(), 13u);
  for (const char* name : {"wdbc", "iris", "digits", "wine", "optdigits", "heart_failure", "parkinsons", "haberman",
                           "spectf", "german", "pendigits", "wifi", "coimbra"}) {
    EXPECT_NO_THROW(find_entry(m, name)) << name;
  }
  EXPECT_THROW(find_entry(m, "lfw"), DataError);
}

TEST(Loader, LabelsSortedNumericallyAndRoundTrip) {
  TempDir dir;
  write_file(dir.path() / "t" / "t.data", "1.5,2,10\n3,4,9\n5,6,10\n7,8,-1\n");
  const auto e = entry_from("[t]\nurl = http://h/t.data\ntest_fraction = 0.5\n");
  const auto d = std::get<Dataset>(load_dataset(e, dir.path()));
  EXPECT_EQ(d.n_samples(), 4u);
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"-1", "9", "10"}));
  EXPECT_EQ(d.y, (Labels{2, 1, 2, 0}));
  EXPECT_EQ(d.decode_labels(), (std::vector<std::string>{"10", "9", "10", "-1"}));
  EXPECT_DOUBLE_EQ(d.X(0, 0), 1.5);
}

TEST(Loader, TextLabelsSortedLexically) {
  TempDir dir;
  write_file(dir.path() / "t" / "t.data", "1,2,Iris-virginica\n3,4,Iris-setosa\n\n5,6,Iris-versicolor\n");
  const auto d = std::get<Dataset>(load_dataset(entry_from("[t]\nurl = h/t.data\ntest_fraction = 0.5\n"), dir.path()));
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"Iris-setosa", "Iris-versicolor", "Iris-virginica"}));
  EXPECT_EQ(d.y, (Labels{2, 0, 1}));
}

TEST(Loader, HeaderNamedLabelAndDrops) {
  TempDir dir;
  write_file(dir.path() / "p" / "p.csv", "name,a,status,b\nx1,1,0,2\nx2,3,1,4\n");
  const auto e = entry_from("[p]\nurl = h/p.csv\nheader = true\nlabel = status\ndrop = name\ntest_fraction = 0.5\n");
  const auto d = std::get<Dataset>(load_dataset(e, dir.path()));
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(d.X(1, 0), 3.0);
  EXPECT_EQ(d.X(1, 1), 4.0);
  EXPECT_EQ(d.y, (Labels{0, 1}));
}

TEST(Loader, IndexLabelWithoutHeader) {
  TempDir dir;
  write_file(dir.path() / "w" / "w.data", "842302,M,17.99,10.38\n842517,B,20.57,17.77\n");
  const auto e = entry_from("[w]\nurl = h/w.data\nlabel = 1\ndrop = 0\ntest_fraction = 0.5\n");
  const auto d = std::get<Dataset>(load_dataset(e, dir.path()));
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"B", "M"}));
  EXPECT_EQ(d.X(0, 0), 17.99);
}

TEST(Loader, WhitespaceAndTabFormats) {
  TempDir dir;
  write_file(dir.path() / "g" / "g.txt", "  1   2  1\n3 4   2\n");
  write_file(dir.path() / "w" / "w.txt", "-64\t-56\t1\n-68\t-57\t2\n");
  const auto g = std::get<Dataset>(
      load_dataset(entry_from("[g]\nurl = h/g.txt\nformat = whitespace\ntest_fraction = 0.5\n"), dir.path()));
  const auto w = std::get<Dataset>(
      load_dataset(entry_from("[w]\nurl = h/w.txt\nformat = tab\ntest_fraction = 0.5\n"), dir.path()));
  EXPECT_EQ(g.n_features(), 2u);
  EXPECT_EQ(w.X(1, 1), -57.0);
}

TEST(Loader, PredefinedPartitionsShareClassTable) {
  TempDir dir;
  write_file(dir.path() / "s" / "s.tra", "1,0.5\n0,0.25\n");
  write_file(dir.path() / "s" / "s.tes", "2,0.75\n0,0.1\n");
  const auto e = entry_from("[s]\nurl = h/s.tra\nurl = h/s.tes\nlabel = first\n");
  const auto p = load_partitions(e, dir.path());
  EXPECT_EQ(p.train.class_names, p.test.class_names);
  EXPECT_EQ(p.train.n_classes(), 3u);
  EXPECT_EQ(p.test.y, (Labels{2, 0}));
}

TEST(Loader, DeterministicLoads) {
  TempDir dir;
  write_file(dir.path() / "t" / "t.data", "1,2,a\n3,4,b\n5,6,a\n7,8,b\n");
  const auto e = entry_from("[t]\nurl = h/t.data\ntest_fraction = 0.3\n");
  const auto a = load_partitions(e, dir.path());
  const auto b = load_partitions(e, dir.path());
  EXPECT_EQ(a.train.X, b.train.X);
  EXPECT_EQ(a.test.y, b.test.y);
}

TEST(Loader, MalformedRowNamesLine) {
  TempDir dir;
  write_file(dir.path() / "t" / "t.data", "1,2,a\n3,4,b\n5,a\n");
  try {
    load_dataset(entry_from("[t]\nurl = h/t.data\ntest_fraction = 0.3\n"), dir.path());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Loader, NonNumericFeatureNamesColumn) {
  TempDir dir;
  write_file(dir.path() / "t" / "t.csv", "age,ef,y\n1,2,a\n3,high,b\n");
  try {
    load_dataset(entry_from("[t]\nurl = h/t.csv\nheader = true\ntest_fraction = 0.3\n"), dir.path());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'ef'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Loader, MissingFile) {
  TempDir dir;
  EXPECT_THROW(load_dataset(entry_from("[t]\nurl = h/t.csv\ntest_fraction = 0.3\n"), dir.path()), DataError);
}

class FetchServer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Get("/files/a.tra", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("1,2,0\n3,4,1\n", "text/plain");
    });
    server_.Get("/files/a.tes", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("5,6,1\n", "text/plain");
    });
    server_.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(FetchServer, DownloadsThenSkips) {
  TempDir dir;
  const auto e = entry_from("[a]\nurl = " + url("/files/a.tra") + "\nurl = " + url("/files/a.tes") + "\n");
  auto r = fetch({e}, dir.path());
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].ok()) << (r[0].errors.empty() ? "" : r[0].errors[0]);
  EXPECT_EQ(r[0].downloaded, 2u);
  EXPECT_TRUE(fs::exists(dir.path() / "a" / "a.tra"));
  EXPECT_TRUE(fs::exists(dir.path() / "a" / "a.tes"));
  EXPECT_EQ(fs::file_size(dir.path() / "a" / "a.tes"), 6u);

  r = fetch({e}, dir.path());
  EXPECT_EQ(r[0].downloaded, 0u);
  EXPECT_EQ(r[0].skipped, 2u);

  // A truncated file does not match the remote size and is fetched again.
  write_file(dir.path() / "a" / "a.tra", "1");
  r = fetch({e}, dir.path());
  EXPECT_EQ(r[0].downloaded, 1u);
  EXPECT_EQ(load_partitions(e, dir.path()).train.n_samples(), 2u);
}

TEST_F(FetchServer, FailuresAreIsolatedPerEntry) {
  TempDir dir;
  const auto bad = entry_from("[bad]\nurl = " + url("/missing") + "\ntest_fraction = 0.5\n");
  const auto dead = entry_from("[dead]\nurl = http://127.0.0.1:1/x.data\ntest_fraction = 0.5\n");
  const auto good = entry_from("[good]\nurl = " + url("/files/a.tra") + "\ntest_fraction = 0.5\n");
  const auto r = fetch({bad, dead, good}, dir.path(), 2);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_FALSE(r[0].ok());
  EXPECT_FALSE(r[1].ok());
  EXPECT_TRUE(r[2].ok());
  EXPECT_EQ(r[2].downloaded, 1u);
  EXPECT_FALSE(fs::exists(dir.path() / "bad" / "missing"));
}
