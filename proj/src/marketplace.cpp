// Copyright 2026 The vsxscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vsxscan/marketplace.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::market {

namespace fs = std::filesystem;
using nlohmann::json;

void GalleryQuery::Validate() const {
  if (page_size < 1 || page_size > 1000) {
    throw Error(ErrorCode::kUsage, "page_size must be in [1, 1000]");
  }
  if (page_number < 1) {
    throw Error(ErrorCode::kUsage, "page_number must be >= 1");
  }
}

// ---- field mapping ----------------------------------------------------------

namespace {

// Splits on '.' outside of [...] selectors.
std::vector<std::string> PathSegments(std::string_view path) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : path) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == '.' && depth == 0) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(std::move(cur));
  return out;
}

const json* Step(const json* node, const std::string& seg) {
  if (node == nullptr) return nullptr;
  std::string_view key = seg;
  std::string_view selector;
  if (size_t lb = seg.find('['); lb != std::string::npos && seg.back() == ']') {
    key = std::string_view(seg).substr(0, lb);
    selector = std::string_view(seg).substr(lb + 1, seg.size() - lb - 2);
  }
  if (!key.empty()) {
    if (node->is_array()) {
      if (!std::all_of(key.begin(), key.end(),
                       [](char c) { return c >= '0' && c <= '9'; })) {
        return nullptr;
      }
      size_t i = std::stoul(std::string(key));
      if (i >= node->size()) return nullptr;
      node = &(*node)[i];
    } else if (node->is_object()) {
      auto it = node->find(std::string(key));
      if (it == node->end()) return nullptr;
      node = &*it;
    } else {
      return nullptr;
    }
  }
  if (selector.empty()) return node;
  size_t eq = selector.find('=');
  if (eq == std::string_view::npos || !node->is_array()) return nullptr;
  const std::string field(selector.substr(0, eq));
  const std::string want(selector.substr(eq + 1));
  for (const json& item : *node) {
    if (!item.is_object()) continue;
    auto it = item.find(field);
    if (it != item.end() && it->is_string() && it->get<std::string>() == want) {
      return &item;
    }
  }
  return nullptr;
}

const json* Resolve(const json& root, std::string_view path) {
  const json* node = &root;
  for (const std::string& seg : PathSegments(path)) node = Step(node, seg);
  return node;
}

std::string StringAt(const json& item, std::string_view path) {
  const json* v = Resolve(item, path);
  if (v == nullptr || v->is_null()) return {};
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number_integer()) return std::to_string(v->get<int64_t>());
  throw Error(ErrorCode::kProtocolError,
              "field " + std::string(path) + " is not a string");
}

std::vector<std::string> StringsAt(const json& item, std::string_view path) {
  const json* v = Resolve(item, path);
  std::vector<std::string> out;
  if (v == nullptr || v->is_null()) return out;
  if (!v->is_array()) {
    throw Error(ErrorCode::kProtocolError,
                "field " + std::string(path) + " is not a list");
  }
  for (const json& s : *v) {
    if (!s.is_string()) {
      throw Error(ErrorCode::kProtocolError,
                  "field " + std::string(path) + " holds a non-string");
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

int64_t CountAt(const json& item, std::string_view path) {
  const json* v = Resolve(item, path);
  if (v == nullptr || v->is_null()) return 0;
  double d = 0;
  if (v->is_number()) {
    d = v->get<double>();
  } else if (v->is_string()) {
    try {
      d = std::stod(v->get<std::string>());
    } catch (const std::exception&) {
      throw Error(ErrorCode::kProtocolError, "install count is not numeric");
    }
  } else {
    throw Error(ErrorCode::kProtocolError, "install count is not numeric");
  }
  if (!std::isfinite(d) || d < 0) {
    throw Error(ErrorCode::kProtocolError, "install count out of range");
  }
  return static_cast<int64_t>(std::llround(d));
}

}  // namespace

FieldMapping FieldMapping::FromJson(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kUsage, "field mapping must be a JSON object");
  }
  FieldMapping m;
  const std::pair<const char*, std::string*> fields[] = {
      {"query_path", &m.query_path},
      {"results_path", &m.results_path},
      {"publisher", &m.publisher},
      {"name", &m.name},
      {"display_name", &m.display_name},
      {"description", &m.description},
      {"categories", &m.categories},
      {"tags", &m.tags},
      {"install_count", &m.install_count},
      {"published_date", &m.published_date},
      {"last_updated", &m.last_updated},
      {"version", &m.version},
      {"download_url", &m.download_url},
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto f = std::find_if(std::begin(fields), std::end(fields),
                          [&](const auto& p) { return it.key() == p.first; });
    if (f == std::end(fields) || !it->is_string()) {
      throw Error(ErrorCode::kUsage, "bad field mapping key: " + it.key());
    }
    *f->second = it->get<std::string>();
  }
  return m;
}

FieldMapping FieldMapping::Load(const fs::path& path) {
  return FromJson(text::ReadFile(path));
}

std::string BuildQueryBody(const GalleryQuery& query) {
  query.Validate();
  json criteria = json::array();
  criteria.push_back({{"filterType", 8}, {"value", "Microsoft.VisualStudio.Code"}});
  if (query.category) {
    criteria.push_back({{"filterType", 5}, {"value", *query.category}});
  }
  if (query.search) {
    criteria.push_back({{"filterType", 10}, {"value", *query.search}});
  }
  json filter = {{"criteria", criteria},
                 {"pageNumber", query.page_number},
                 {"pageSize", query.page_size},
                 {"sortBy", query.sort == SortOrder::kInstalls ? 4 : 10},
                 {"sortOrder", 0}};
  json body = {{"filters", json::array({filter})},
               {"assetTypes", json::array()},
               {"flags", 914}};
  return body.dump();
}

std::vector<MarketplaceEntry> ParseQueryResponse(std::string_view body,
                                                 const FieldMapping& mapping) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kProtocolError, "response is not JSON");
  }
  const json* items = Resolve(doc, mapping.results_path);
  if (items == nullptr || !items->is_array()) {
    throw Error(ErrorCode::kProtocolError,
                "response has no list at " + mapping.results_path);
  }
  std::vector<MarketplaceEntry> out;
  std::set<std::string> seen;
  for (const json& item : *items) {
    if (!item.is_object()) {
      throw Error(ErrorCode::kProtocolError, "result item is not an object");
    }
    MarketplaceEntry e;
    const std::string publisher = StringAt(item, mapping.publisher);
    const std::string name = StringAt(item, mapping.name);
    if (publisher.empty() || name.empty()) {
      throw Error(ErrorCode::kProtocolError, "result item lacks an id");
    }
    e.extension_id = publisher + "." + name;
    e.display_name = StringAt(item, mapping.display_name);
    e.description = StringAt(item, mapping.description);
    e.categories = StringsAt(item, mapping.categories);
    e.tags = StringsAt(item, mapping.tags);
    e.install_count = CountAt(item, mapping.install_count);
    e.published_date = StringAt(item, mapping.published_date);
    e.last_updated = StringAt(item, mapping.last_updated);
    e.version = StringAt(item, mapping.version);
    e.download_url = StringAt(item, mapping.download_url);
    if (!seen.insert(e.extension_id).second) {
      throw Error(ErrorCode::kProtocolError,
                  "duplicate id in page: " + e.extension_id);
    }
    out.push_back(std::move(e));
  }
  return out;
}

// ---- rate limiter ------------------------------------------------------------

RateLimiter::RateLimiter(int max_in_flight, std::chrono::milliseconds min_delay)
    : min_delay_(min_delay),
      next_start_(static_cast<size_t>(std::max(1, max_in_flight)),
                  Clock::time_point{}),
      busy_(next_start_.size(), false) {}

RateLimiter::Permit::Permit(Permit&& other) noexcept
    : owner_(other.owner_), slot_(other.slot_) {
  other.owner_ = nullptr;
}

RateLimiter::Permit::~Permit() {
  if (owner_ != nullptr) owner_->Release(slot_);
}

RateLimiter::Permit RateLimiter::Acquire() {
  std::unique_lock lock(mu_);
  size_t slot = 0;
  cv_.wait(lock, [&] {
    bool found = false;
    for (size_t i = 0; i < busy_.size(); ++i) {
      if (busy_[i]) continue;
      if (!found || next_start_[i] < next_start_[slot]) slot = i;
      found = true;
    }
    return found;
  });
  busy_[slot] = true;
  // Re-read under the lock after every wake so a Defer() is honored.
  while (Clock::now() < next_start_[slot]) {
    cv_.wait_until(lock, next_start_[slot]);
  }
  return Permit(this, slot);
}

void RateLimiter::Release(size_t slot) {
  {
    std::lock_guard lock(mu_);
    busy_[slot] = false;
    next_start_[slot] = std::max(next_start_[slot], Clock::now() + min_delay_);
  }
  cv_.notify_all();
}

void RateLimiter::Defer(Clock::time_point until) {
  {
    std::lock_guard lock(mu_);
    for (auto& t : next_start_) t = std::max(t, until);
  }
  cv_.notify_all();
}

// ---- client --------------------------------------------------------------------

ClientOptions ClientOptions::FromEnvironment() {
  ClientOptions o;
  if (const char* e = std::getenv("VSXSCAN_GALLERY_ENDPOINT")) o.endpoint = e;
  return o;
}

struct MarketplaceClient::Response {
  bool transport_ok = false;
  std::string transport_error;
  int status = 0;
  httplib::Headers headers;
  std::string body;
};

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url SplitUrl(const std::string& base, const std::string& url) {
  std::string full = url;
  if (!url.empty() && url.front() == '/') {
    std::string b = base;
    while (!b.empty() && b.back() == '/') b.pop_back();
    full = b + url;
  }
  const size_t scheme_end = full.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kUsage, "not an absolute URL: " + full);
  }
  const std::string scheme = full.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kUsage, "unsupported URL scheme: " + scheme);
  }
  const size_t path_start = full.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {full, "/"};
  return {full.substr(0, path_start), full.substr(path_start)};
}

bool Retryable(int status) { return status == 429 || status >= 500; }

std::chrono::milliseconds RetryAfter(const httplib::Headers& headers) {
  auto it = headers.find("Retry-After");
  if (it == headers.end()) return std::chrono::milliseconds{0};
  try {
    double secs = std::stod(it->second);
    if (secs > 0 && secs < 3600) {
      return std::chrono::milliseconds(static_cast<int64_t>(secs * 1000));
    }
  } catch (const std::exception&) {
  }
  return std::chrono::milliseconds{0};
}

// Total size from "bytes a-b/total".
std::optional<int64_t> ContentRangeTotal(const httplib::Headers& headers) {
  auto it = headers.find("Content-Range");
  if (it == headers.end()) return std::nullopt;
  const size_t slash = it->second.rfind('/');
  if (slash == std::string::npos) return std::nullopt;
  try {
    return std::stoll(it->second.substr(slash + 1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<int64_t> ContentLength(const httplib::Headers& headers) {
  auto it = headers.find("Content-Length");
  if (it == headers.end()) return std::nullopt;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

MarketplaceClient::MarketplaceClient(ClientOptions options)
    : options_(std::move(options)),
      limiter_(options_.max_in_flight, options_.min_delay) {
  if (options_.max_in_flight < 1) {
    throw Error(ErrorCode::kUsage, "max_in_flight must be >= 1");
  }
}

MarketplaceClient::Response MarketplaceClient::Send(
    const std::string& method, const std::string& url, const std::string& body,
    const std::function<bool(int, const char*, size_t)>& sink,
    int64_t range_start) {
  const Url u = SplitUrl(options_.endpoint, url);
  httplib::Client cli(u.origin);
  cli.set_connection_timeout(options_.timeout);
  cli.set_read_timeout(options_.timeout);
  cli.set_follow_location(true);
  cli.set_decompress(false);

  Response r;
  httplib::Headers headers = {{"Accept", "application/json;api-version=3.0-preview.1"}};
  if (range_start > 0) {
    headers.emplace("Range", "bytes=" + std::to_string(range_start) + "-");
  }

  RateLimiter::Permit permit = limiter_.Acquire();
  httplib::Result res;
  if (method == "POST") {
    res = cli.Post(u.path, headers, body, "application/json");
  } else if (sink) {
    res = cli.Get(
        u.path, headers,
        [&](const httplib::Response& head) {
          r.status = head.status;
          r.headers = head.headers;
          return true;
        },
        [&](const char* data, size_t n) { return sink(r.status, data, n); });
  } else {
    res = cli.Get(u.path, headers);
  }
  if (!res) {
    r.transport_error = httplib::to_string(res.error());
    return r;
  }
  r.transport_ok = true;
  r.status = res->status;
  r.headers = res->headers;
  if (!sink) r.body = std::move(res->body);
  return r;
}

std::vector<MarketplaceEntry> MarketplaceClient::QueryGallery(
    const GalleryQuery& query) {
  const std::string body = BuildQueryBody(query);
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto wait = std::min(options_.max_backoff,
                           options_.backoff_base * (int64_t{1} << (attempt - 1)));
      std::this_thread::sleep_for(wait);
    }
    Response r = Send("POST", options_.mapping.query_path, body, nullptr, 0);
    if (!r.transport_ok) {
      last_error = r.transport_error;
      rate_limited = false;
      continue;
    }
    if (r.status == 429) {
      rate_limited = true;
      last_error = "HTTP 429";
      limiter_.Defer(RateLimiter::Clock::now() + RetryAfter(r.headers));
      continue;
    }
    if (Retryable(r.status)) {
      rate_limited = false;
      last_error = "HTTP " + std::to_string(r.status);
      continue;
    }
    if (r.status != 200) {
      throw Error(ErrorCode::kProtocolError,
                  "gallery query returned HTTP " + std::to_string(r.status));
    }
    return ParseQueryResponse(r.body, options_.mapping);
  }
  throw Error(rate_limited ? ErrorCode::kRateLimited : ErrorCode::kNetworkError,
              "gallery query failed after retries: " + last_error);
}

std::vector<MarketplaceEntry> MarketplaceClient::QueryAll(GalleryQuery first,
                                                          size_t max_entries,
                                                          int* pages) {
  std::vector<MarketplaceEntry> out;
  std::set<std::string> seen;
  int n = 0;
  for (GalleryQuery q = first;; ++q.page_number) {
    auto page = QueryGallery(q);
    ++n;
    for (auto& e : page) {
      if (seen.insert(e.extension_id).second) out.push_back(std::move(e));
    }
    if (max_entries > 0 && out.size() >= max_entries) {
      out.resize(max_entries);
      break;
    }
    if (page.size() < static_cast<size_t>(q.page_size)) break;
  }
  if (pages != nullptr) *pages = n;
  return out;
}

fs::path ArchivePath(const MarketplaceEntry& entry, const fs::path& dest) {
  return dest / (entry.extension_id + "-" + entry.version + ".vsix");
}

DownloadResult MarketplaceClient::Download(const MarketplaceEntry& entry,
                                           const fs::path& dest) {
  if (entry.download_url.empty()) {
    throw Error(ErrorCode::kUsage, entry.extension_id + " has no download URL");
  }
  const fs::path final_path = ArchivePath(entry, dest);
  std::error_code ec;
  if (fs::is_regular_file(final_path, ec) && fs::file_size(final_path, ec) > 0) {
    return {final_path, false, static_cast<int64_t>(fs::file_size(final_path))};
  }
  fs::create_directories(dest, ec);
  const fs::path part = final_path.string() + ".part";

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto wait = std::min(options_.max_backoff,
                           options_.backoff_base * (int64_t{1} << (attempt - 1)));
      std::this_thread::sleep_for(wait);
    }
    int64_t offset = fs::exists(part, ec) ? static_cast<int64_t>(fs::file_size(part, ec)) : 0;
    std::ofstream out;
    bool opened = false;
    auto sink = [&](int status, const char* data, size_t n) {
      if (status != 200 && status != 206) return true;  // error body
      if (!opened) {
        // First chunk: the status decides between resume and restart.
        const bool resume = status == 206 && offset > 0;
        if (!resume) offset = 0;
        out.open(part, std::ios::binary | (resume ? std::ios::app : std::ios::trunc));
        opened = true;
        if (!out) return false;
      }
      out.write(data, static_cast<std::streamsize>(n));
      return static_cast<bool>(out);
    };
    Response r = Send("GET", entry.download_url, {}, sink, offset);
    out.close();
    if (!r.transport_ok) {
      last_error = r.transport_error;
      continue;
    }
    if (r.status == 416) {
      fs::remove(part, ec);
      last_error = "HTTP 416";
      continue;
    }
    if (r.status == 429) {
      limiter_.Defer(RateLimiter::Clock::now() + RetryAfter(r.headers));
      last_error = "HTTP 429";
      continue;
    }
    if (Retryable(r.status)) {
      last_error = "HTTP " + std::to_string(r.status);
      continue;
    }
    if (r.status != 200 && r.status != 206) {
      throw Error(ErrorCode::kProtocolError,
                  "download of " + entry.extension_id + " returned HTTP " +
                      std::to_string(r.status));
    }
    if (!opened) {
      // Empty body: still materialize the part file.
      std::ofstream(part, std::ios::binary | std::ios::trunc);
      offset = 0;
    }
    const int64_t have = static_cast<int64_t>(fs::file_size(part, ec));
    std::optional<int64_t> declared =
        r.status == 206 ? ContentRangeTotal(r.headers) : ContentLength(r.headers);
    if (declared && *declared != have) {
      fs::remove(part, ec);
      throw Error(ErrorCode::kChecksumMismatch,
                  entry.extension_id + ": declared " + std::to_string(*declared) +
                      " bytes, received " + std::to_string(have));
    }
    fs::rename(part, final_path);
    return {final_path, true, have};
  }
  throw Error(ErrorCode::kNetworkError,
              "download of " + entry.extension_id + " failed: " + last_error);
}

CrawlResult MarketplaceClient::Crawl(const CrawlOptions& options) {
  CrawlResult result;
  GalleryQuery q;
  q.page_size = options.page_size;
  q.category = options.category;
  q.search = options.search;
  q.sort = options.sort;
  auto all = QueryAll(q, 0, &result.pages);
  for (auto& e : all) {
    if (e.install_count < options.min_installs) continue;
    result.entries.push_back(std::move(e));
    if (options.max_entries > 0 && result.entries.size() >= options.max_entries) {
      break;
    }
  }

  result.downloads.resize(result.entries.size());
  std::vector<std::string> errors(result.entries.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < result.entries.size(); i = next++) {
      try {
        result.downloads[i] = Download(result.entries[i], options.dest);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const size_t n = std::min<size_t>(static_cast<size_t>(options_.max_in_flight),
                                    result.entries.size());
  for (size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      result.failures.emplace_back(result.entries[i].extension_id, errors[i]);
    } else if (result.downloads[i].fetched) {
      ++result.fetched;
    }
  }

  const fs::path snap = options.snapshot_path.empty()
                            ? options.dest / "metadata.tsv"
                            : options.snapshot_path;
  MetadataSnapshot snapshot;
  std::error_code ec;
  if (fs::is_regular_file(snap, ec)) snapshot = MetadataSnapshot::Load(snap);
  for (const auto& e : result.entries) snapshot.Add(e);
  snapshot.Save(snap);
  return result;
}

// ---- snapshot --------------------------------------------------------------------

MetadataSnapshot::MetadataSnapshot(std::vector<MarketplaceEntry> entries) {
  for (auto& e : entries) Add(std::move(e));
}

void MetadataSnapshot::Add(MarketplaceEntry entry) {
  std::string id = entry.extension_id;
  entries_.insert_or_assign(std::move(id), std::move(entry));
}

const MarketplaceEntry* MetadataSnapshot::Find(std::string_view id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string SnapshotRecord(const MarketplaceEntry& e) {
  return text::JoinRecord({e.extension_id, e.version,
                           std::to_string(e.install_count),
                           text::Join(e.categories, ";"), e.published_date,
                           e.description, text::Join(e.tags, ";")});
}

std::string MetadataSnapshot::Serialize() const {
  std::string out;
  for (const auto& [id, e] : entries_) {
    out += SnapshotRecord(e);
    out += '\n';
  }
  return out;
}

MetadataSnapshot MetadataSnapshot::Parse(std::string_view body) {
  MetadataSnapshot s;
  size_t line_no = 0;
  for (const std::string& line : text::Split(body, '\n')) {
    ++line_no;
    if (text::Trim(line).empty() || line.front() == '#') continue;
    const auto f = text::SplitRecord(line);
    if (f.size() != 6 && f.size() != 7) {
      throw Error(ErrorCode::kCorpusFormat,
                  "metadata line " + std::to_string(line_no) + ": expected 6 or 7 fields");
    }
    MarketplaceEntry e;
    e.extension_id = f[0];
    e.version = f[1];
    try {
      size_t used = 0;
      e.install_count = std::stoll(f[2], &used);
      if (used != f[2].size() || e.install_count < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kCorpusFormat,
                  "metadata line " + std::to_string(line_no) + ": bad install count");
    }
    if (!f[3].empty()) e.categories = text::Split(f[3], ';');
    e.published_date = f[4];
    e.description = f[5];
    if (f.size() == 7 && !f[6].empty()) e.tags = text::Split(f[6], ';');
    if (e.extension_id.empty()) {
      throw Error(ErrorCode::kCorpusFormat,
                  "metadata line " + std::to_string(line_no) + ": empty id");
    }
    s.Add(std::move(e));
  }
  return s;
}

void MetadataSnapshot::Save(const fs::path& path) const {
  text::WriteFile(path, Serialize());
}

MetadataSnapshot MetadataSnapshot::Load(const fs::path& path) {
  return Parse(text::ReadFile(path));
}

}  // namespace vsxscan::market
