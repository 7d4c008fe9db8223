// Eigen must come first: <resolv.h>, pulled in by httplib, defines `_res`.
#include "marcsinh/data.hpp"
#include "marcsinh/errors.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <regex>

#include <httplib.h>

namespace marcsinh {

namespace fs = std::filesystem;

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw DataError("unsupported url " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

httplib::Client make_client(const Url& url) {
  httplib::Client cli(url.origin);
  cli.set_follow_location(true);
  cli.set_connection_timeout(15);
  cli.set_read_timeout(60);
  return cli;
}

std::optional<std::uintmax_t> remote_size(const std::string& url) {
  const auto u = parse_url(url);
  auto cli = make_client(u);
  auto res = cli.Head(u.path);
  if (!res || res->status != 200 || !res->has_header("Content-Length")) return std::nullopt;
  return std::stoull(res->get_header_value("Content-Length"));
}

void download(const std::string& url, const fs::path& target) {
  const auto u = parse_url(url);
  auto cli = make_client(u);
  auto res = cli.Get(u.path);
  if (!res) throw DataError(url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw DataError(url + ": HTTP " + std::to_string(res->status));

  fs::create_directories(target.parent_path());
  const auto partial = fs::path(target.string() + ".part");
  {
    std::ofstream out(partial, std::ios::binary);
    out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
    if (!out) throw DataError("cannot write " + partial.string());
  }
  fs::rename(partial, target);
}

FetchResult fetch_entry(const ManifestEntry& entry, const fs::path& dest) {
  FetchResult result;
  result.entry = entry.name;
  std::vector<fs::path> files;
  try {
    files = entry.local_files();
  } catch (const std::exception& e) {
    result.errors.push_back(e.what());
    return result;
  }

  for (std::size_t i = 0; i < entry.urls.size(); ++i) {
    const auto& url = entry.urls[i];
    const auto target = dest / files[i];
    try {
      if (fs::exists(target) && fs::file_size(target) > 0) {
        // Unknown remote size counts as a match: the file is kept.
        const auto size = remote_size(url);
        if (!size || *size == fs::file_size(target)) {
          ++result.skipped;
          continue;
        }
      }
      download(url, target);
      ++result.downloaded;
    } catch (const std::exception& e) {
      result.errors.push_back(entry.name + ": " + e.what());
    }
  }
  return result;
}

}  // namespace

std::vector<FetchResult> fetch(const std::vector<ManifestEntry>& manifest, const fs::path& dest, std::size_t jobs) {
  std::vector<FetchResult> results(manifest.size());
  jobs = std::max<std::size_t>(1, jobs);
  for (std::size_t start = 0; start < manifest.size(); start += jobs) {
    const auto stop = std::min(manifest.size(), start + jobs);
    std::vector<std::future<FetchResult>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(std::launch::async, fetch_entry, std::cref(manifest[i]), std::cref(dest)));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = pending[i - start].get();
  }
  return results;
}

}  // namespace marcsinh
