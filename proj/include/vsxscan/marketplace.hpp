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

#ifndef VSXSCAN_MARKETPLACE_HPP_
#define VSXSCAN_MARKETPLACE_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vsxscan::market {

enum class SortOrder : uint8_t { kInstalls, kPublishedDate };

struct GalleryQuery {
  int page_size = 100;   // [1, 1000]
  int page_number = 1;   // 1-based
  std::optional<std::string> category;
  SortOrder sort = SortOrder::kInstalls;
  std::optional<std::string> search;

  // Throws Error(kUsage).
  void Validate() const;
};

struct MarketplaceEntry {
  std::string extension_id;  // "publisher.name"
  std::string display_name;
  std::string description;
  std::vector<std::string> categories;
  std::vector<std::string> tags;
  int64_t install_count = 0;
  std::string published_date;  // ISO-8601
  std::string last_updated;    // ISO-8601
  std::string version;
  std::string download_url;

  friend bool operator==(const MarketplaceEntry&,
                         const MarketplaceEntry&) = default;
};

// ---- wire format ---------------------------------------------------------
//
// Paths are dot-separated object keys. A segment may be a numeric index
// ("versions.0.version") or a selector that picks the first array element
// whose field equals a value ("statistics[statisticName=install].value").

struct FieldMapping {
  std::string query_path = "/_apis/public/gallery/extensionquery";
  std::string results_path = "results.0.extensions";
  std::string publisher = "publisher.publisherName";
  std::string name = "extensionName";
  std::string display_name = "displayName";
  std::string description = "shortDescription";
  std::string categories = "categories";
  std::string tags = "tags";
  std::string install_count = "statistics[statisticName=install].value";
  std::string published_date = "publishedDate";
  std::string last_updated = "lastUpdated";
  std::string version = "versions.0.version";
  std::string download_url =
      "versions.0.files[assetType=Microsoft.VisualStudio.Services.VSIXPackage]"
      ".source";

  // Keys absent from the JSON object keep their defaults.
  static FieldMapping FromJson(std::string_view json_text);
  static FieldMapping Load(const std::filesystem::path& path);
};

// Request body for one page of `query`.
std::string BuildQueryBody(const GalleryQuery& query);

// One page of entries from a response body. Throws Error(kProtocolError).
std::vector<MarketplaceEntry> ParseQueryResponse(std::string_view body,
                                                 const FieldMapping& mapping);

// ---- politeness ---------------------------------------------------------

// At most `max_in_flight` holders at once; each slot waits `min_delay`
// after its previous release before it is handed out again.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  RateLimiter(int max_in_flight, std::chrono::milliseconds min_delay);

  class Permit {
   public:
    Permit(Permit&& other) noexcept;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    friend class RateLimiter;
    Permit(RateLimiter* owner, size_t slot) : owner_(owner), slot_(slot) {}
    RateLimiter* owner_;
    size_t slot_;
  };

  Permit Acquire();
  // Pushes every slot's next start back to at least `until`.
  void Defer(Clock::time_point until);
  int max_in_flight() const { return static_cast<int>(next_start_.size()); }

 private:
  void Release(size_t slot);

  std::mutex mu_;
  std::condition_variable cv_;
  std::chrono::milliseconds min_delay_;
  std::vector<Clock::time_point> next_start_;
  std::vector<bool> busy_;
};

// ---- client ---------------------------------------------------------------

struct ClientOptions {
  std::string endpoint;  // "http://host:port" or "https://host"
  FieldMapping mapping;
  int max_in_flight = 4;
  std::chrono::milliseconds min_delay{250};
  int max_retries = 4;
  std::chrono::milliseconds backoff_base{200};
  std::chrono::milliseconds max_backoff{10000};
  std::chrono::seconds timeout{60};

  // VSXSCAN_GALLERY_ENDPOINT, when set, provides the endpoint.
  static ClientOptions FromEnvironment();
};

struct DownloadResult {
  std::filesystem::path path;
  bool fetched = false;  // false when the archive was already present
  int64_t bytes = 0;
};

struct CrawlOptions {
  std::filesystem::path dest;
  std::optional<std::string> category;
  std::optional<std::string> search;
  size_t max_entries = 0;  // 0 = no limit
  int64_t min_installs = 0;
  int page_size = 100;
  SortOrder sort = SortOrder::kInstalls;
  // Snapshot file; defaults to <dest>/metadata.tsv.
  std::filesystem::path snapshot_path;
};

struct CrawlResult {
  std::vector<MarketplaceEntry> entries;  // after filtering, query order
  std::vector<DownloadResult> downloads;  // parallel to entries
  std::vector<std::pair<std::string, std::string>> failures;  // id, message
  int pages = 0;
  int fetched = 0;
};

class MarketplaceClient {
 public:
  explicit MarketplaceClient(ClientOptions options);

  // Throws kNetworkError, kRateLimited or kProtocolError.
  std::vector<MarketplaceEntry> QueryGallery(const GalleryQuery& query);

  // Pages from `first.page_number` until a short page or `max_entries`.
  std::vector<MarketplaceEntry> QueryAll(GalleryQuery first,
                                         size_t max_entries = 0,
                                         int* pages = nullptr);

  // Stores <dest>/<extension_id>-<version>.vsix. An existing complete file
  // is returned without traffic; a leftover ".part" is resumed.
  DownloadResult Download(const MarketplaceEntry& entry,
                          const std::filesystem::path& dest);

  // Query, filter, download in parallel and write the metadata snapshot.
  CrawlResult Crawl(const CrawlOptions& options);

  RateLimiter& limiter() { return limiter_; }

 private:
  struct Response;
  Response Send(const std::string& method, const std::string& url,
                const std::string& body,
                const std::function<bool(int, const char*, size_t)>& sink,
                int64_t range_start);

  ClientOptions options_;
  RateLimiter limiter_;
};

std::filesystem::path ArchivePath(const MarketplaceEntry& entry,
                                  const std::filesystem::path& dest);

// ---- metadata snapshot --------------------------------------------------
// One escaped TSV record per entry: extension_id, version, install_count,
// categories joined by ';', published_date, description, tags joined by ';'.

class MetadataSnapshot {
 public:
  MetadataSnapshot() = default;
  explicit MetadataSnapshot(std::vector<MarketplaceEntry> entries);

  // Later records replace earlier ones with the same id.
  void Add(MarketplaceEntry entry);
  const MarketplaceEntry* Find(std::string_view extension_id) const;
  const std::map<std::string, MarketplaceEntry, std::less<>>& entries() const {
    return entries_;
  }
  size_t size() const { return entries_.size(); }

  std::string Serialize() const;
  // Throws Error(kCorpusFormat) on malformed records.
  static MetadataSnapshot Parse(std::string_view text);
  void Save(const std::filesystem::path& path) const;
  static MetadataSnapshot Load(const std::filesystem::path& path);

 private:
  std::map<std::string, MarketplaceEntry, std::less<>> entries_;
};

std::string SnapshotRecord(const MarketplaceEntry& entry);

}  // namespace vsxscan::market

#endif  // VSXSCAN_MARKETPLACE_HPP_
