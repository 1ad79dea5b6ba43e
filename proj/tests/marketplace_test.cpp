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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <json.hpp>

#include "support/stub_gallery.hpp"
#include "support/temp_dir.hpp"
#include "vsxscan/error.hpp"
#include "vsxscan/scanner.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::market {
namespace {

namespace fs = std::filesystem;
using testing::StubExtension;
using testing::StubGallery;
using testing::TempDir;

std::vector<StubExtension> FiveExtensions() {
  std::vector<StubExtension> out;
  for (int i = 0; i < 5; ++i) {
    StubExtension e;
    e.publisher = "stub";
    e.name = "ext" + std::to_string(i);
    e.installs = 5000 - i * 1000;
    e.categories = {i % 2 == 0 ? "Linters" : "Themes"};
    e.tags = {"tag" + std::to_string(i)};
    e.description = "Extension number " + std::to_string(i);
    out.push_back(std::move(e));
  }
  return out;
}

ClientOptions FastOptions(const StubGallery& g) {
  ClientOptions o;
  o.endpoint = g.endpoint();
  o.min_delay = std::chrono::milliseconds(1);
  o.backoff_base = std::chrono::milliseconds(5);
  o.max_backoff = std::chrono::milliseconds(20);
  o.timeout = std::chrono::seconds(5);
  return o;
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

TEST(QueryBodyTest, CarriesPagingAndFilters) {
  GalleryQuery q;
  q.page_size = 2;
  q.page_number = 3;
  q.category = "Linters";
  q.search = "git";
  const nlohmann::json body = nlohmann::json::parse(BuildQueryBody(q));
  const auto& f = body["filters"][0];
  EXPECT_EQ(f["pageNumber"], 3);
  EXPECT_EQ(f["pageSize"], 2);
  std::set<int> types;
  for (const auto& c : f["criteria"]) types.insert(c["filterType"].get<int>());
  EXPECT_EQ(types, (std::set<int>{5, 8, 10}));
  q.page_size = 0;
  EXPECT_EQ(CodeOf([&] { BuildQueryBody(q); }), ErrorCode::kUsage);
}

TEST(ParseResponseTest, MapsFieldsAndSelectors) {
  const std::string body = R"({"results": [{"extensions": [{
      "publisher": {"publisherName": "acme"}, "extensionName": "tool",
      "displayName": "Tool", "shortDescription": "does things",
      "categories": ["Other"], "tags": ["x"],
      "statistics": [{"statisticName": "rating", "value": 4.5},
                     {"statisticName": "install", "value": 1234.0}],
      "publishedDate": "2021-01-01", "lastUpdated": "2022-01-01",
      "versions": [{"version": "2.0.1", "files": [
          {"assetType": "Microsoft.VisualStudio.Code.Manifest", "source": "m"},
          {"assetType": "Microsoft.VisualStudio.Services.VSIXPackage", "source": "v"}]}]}]}]})";
  const auto entries = ParseQueryResponse(body, FieldMapping{});
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].extension_id, "acme.tool");
  EXPECT_EQ(entries[0].install_count, 1234);
  EXPECT_EQ(entries[0].version, "2.0.1");
  EXPECT_EQ(entries[0].download_url, "v");
  EXPECT_EQ(entries[0].categories, std::vector<std::string>{"Other"});
}

TEST(ParseResponseTest, MalformedPayloadsAreProtocolErrors) {
  const FieldMapping m;
  for (const char* body : {"not json", R"({"results": []})",
                           R"({"results": [{"extensions": [1]}]})",
                           R"({"results": [{"extensions": [{"extensionName": "x"}]}]})"}) {
    EXPECT_EQ(CodeOf([&] { ParseQueryResponse(body, m); }), ErrorCode::kProtocolError) << body;
  }
}

TEST(FieldMappingTest, OverridesAndRejectsUnknownKeys) {
  const FieldMapping m = FieldMapping::FromJson(R"({"results_path": "items"})");
  EXPECT_EQ(m.results_path, "items");
  EXPECT_EQ(m.name, FieldMapping{}.name);
  EXPECT_EQ(CodeOf([] { FieldMapping::FromJson(R"({"bogus": "x"})"); }), ErrorCode::kUsage);
}

TEST(GalleryTest, PaginatesTwoTwoOne) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  GalleryQuery q;
  q.page_size = 2;
  std::vector<size_t> sizes;
  for (q.page_number = 1;; ++q.page_number) {
    const auto page = client.QueryGallery(q);
    sizes.push_back(page.size());
    if (page.size() < 2) break;
  }
  EXPECT_EQ(sizes, (std::vector<size_t>{2, 2, 1}));

  int pages = 0;
  q.page_number = 1;
  const auto all = client.QueryAll(q, 0, &pages);
  EXPECT_EQ(pages, 3);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all[0].extension_id, "stub.ext0");
  EXPECT_EQ(all[0].install_count, 5000);
  EXPECT_EQ(all[4].extension_id, "stub.ext4");
  EXPECT_EQ(client.QueryAll(q, 3).size(), 3u);
}

TEST(GalleryTest, CategoryFilter) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  GalleryQuery q;
  q.category = "Themes";
  const auto themes = client.QueryAll(q);
  ASSERT_EQ(themes.size(), 2u);
  for (const auto& e : themes) EXPECT_EQ(e.categories, std::vector<std::string>{"Themes"});
}

TEST(GalleryTest, MalformedPayload) {
  StubGallery g(FiveExtensions());
  g.malformed = true;
  MarketplaceClient client(FastOptions(g));
  EXPECT_EQ(CodeOf([&] { client.QueryGallery({}); }), ErrorCode::kProtocolError);
}

TEST(GalleryTest, RetriesThroughRateLimits) {
  StubGallery g(FiveExtensions());
  g.rate_limit_next = 2;
  MarketplaceClient client(FastOptions(g));
  EXPECT_EQ(client.QueryGallery({}).size(), 5u);
  EXPECT_EQ(g.query_requests.load(), 3);

  g.rate_limit_next = 100;
  ClientOptions o = FastOptions(g);
  o.max_retries = 2;
  MarketplaceClient impatient(o);
  EXPECT_EQ(CodeOf([&] { impatient.QueryGallery({}); }), ErrorCode::kRateLimited);
}

TEST(GalleryTest, UnreachableEndpointIsNetworkError) {
  ClientOptions o;
  o.endpoint = "http://127.0.0.1:1";
  o.max_retries = 1;
  o.backoff_base = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(1);
  MarketplaceClient client(o);
  EXPECT_EQ(CodeOf([&] { client.QueryGallery({}); }), ErrorCode::kNetworkError);
}

TEST(DownloadTest, StoresArchiveAndSkipsWhenPresent) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  TempDir dest("dl");
  const auto entries = client.QueryAll({});
  const DownloadResult first = client.Download(entries[0], dest.path());
  EXPECT_TRUE(first.fetched);
  EXPECT_EQ(first.path, dest.path() / "stub.ext0-1.0.0.vsix");
  EXPECT_EQ(text::ReadFile(first.path), g.archive("stub.ext0"));
  EXPECT_EQ(first.bytes, static_cast<int64_t>(g.archive("stub.ext0").size()));

  const int before = g.download_requests.load();
  const DownloadResult again = client.Download(entries[0], dest.path());
  EXPECT_FALSE(again.fetched);
  EXPECT_EQ(g.download_requests.load(), before);
}

TEST(DownloadTest, InterruptedTransferResumesWithRange) {
  StubGallery g(FiveExtensions());
  g.truncate_first = {"stub.ext1"};
  MarketplaceClient client(FastOptions(g));
  TempDir dest("resume");
  const auto entries = client.QueryAll({});
  const DownloadResult r = client.Download(entries[1], dest.path());
  EXPECT_TRUE(r.fetched);
  EXPECT_EQ(text::ReadFile(r.path), g.archive("stub.ext1"));
  EXPECT_EQ(g.downloads_of("stub.ext1"), 2);
  const auto ranges = g.range_headers();
  ASSERT_EQ(ranges.size(), 1u);
  EXPECT_EQ(ranges[0], "bytes=" + std::to_string(g.archive("stub.ext1").size() / 2) + "-");
  EXPECT_FALSE(fs::exists(r.path.string() + ".part"));
}

TEST(DownloadTest, LeftoverPartFileIsResumed) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  TempDir dest("part");
  const auto entries = client.QueryAll({});
  const std::string& bytes = g.archive("stub.ext2");
  text::WriteFile(ArchivePath(entries[2], dest.path()).string() + ".part", bytes.substr(0, 10));
  const DownloadResult r = client.Download(entries[2], dest.path());
  EXPECT_EQ(text::ReadFile(r.path), bytes);
  EXPECT_EQ(g.range_headers(), std::vector<std::string>{"bytes=10-"});
}

TEST(DownloadTest, DeclaredSizeMismatchIsRejected) {
  StubGallery g(FiveExtensions());
  g.lie_about_size = {"stub.ext3"};
  MarketplaceClient client(FastOptions(g));
  TempDir dest("lie");
  const auto entries = client.QueryAll({});
  const fs::path final_path = ArchivePath(entries[3], dest.path());
  text::WriteFile(final_path.string() + ".part", g.archive("stub.ext3").substr(0, 4));
  EXPECT_EQ(CodeOf([&] { client.Download(entries[3], dest.path()); }),
            ErrorCode::kChecksumMismatch);
  EXPECT_FALSE(fs::exists(final_path));
}

TEST(CrawlTest, RecrawlDownloadsNothingNew) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  TempDir dest("crawl");
  CrawlOptions o;
  o.dest = dest.path();
  o.page_size = 2;
  const CrawlResult first = client.Crawl(o);
  EXPECT_EQ(first.pages, 3);
  EXPECT_EQ(first.entries.size(), 5u);
  EXPECT_EQ(first.fetched, 5);
  EXPECT_TRUE(first.failures.empty());
  const MetadataSnapshot snap = MetadataSnapshot::Load(dest.path() / "metadata.tsv");
  EXPECT_EQ(snap.size(), 5u);
  ASSERT_NE(snap.Find("stub.ext3"), nullptr);
  EXPECT_EQ(snap.Find("stub.ext3")->install_count, 2000);
  EXPECT_EQ(snap.Find("stub.ext3")->tags, std::vector<std::string>{"tag3"});

  const int downloads = g.download_requests.load();
  const CrawlResult second = client.Crawl(o);
  EXPECT_EQ(second.fetched, 0);
  EXPECT_EQ(g.download_requests.load(), downloads);
  for (const auto& d : second.downloads) EXPECT_FALSE(d.fetched);
}

TEST(CrawlTest, InstallFilterAndLimit) {
  StubGallery g(FiveExtensions());
  MarketplaceClient client(FastOptions(g));
  TempDir dest("filter");
  CrawlOptions o;
  o.dest = dest.path();
  o.min_installs = 2500;
  EXPECT_EQ(client.Crawl(o).entries.size(), 3u);
  o.max_entries = 1;
  EXPECT_EQ(client.Crawl(o).entries.size(), 1u);
}

TEST(CrawlTest, NeverExceedsFourInFlight) {
  std::vector<StubExtension> many;
  for (int i = 0; i < 16; ++i) {
    StubExtension e;
    e.publisher = "busy";
    e.name = "e" + std::to_string(i);
    e.installs = 100 + i;
    many.push_back(std::move(e));
  }
  StubGallery g(many);
  g.handler_delay = std::chrono::milliseconds(40);
  ClientOptions opts = FastOptions(g);
  opts.max_in_flight = 4;
  MarketplaceClient client(opts);
  TempDir dest("flight");
  CrawlOptions o;
  o.dest = dest.path();
  const CrawlResult r = client.Crawl(o);
  EXPECT_EQ(r.fetched, 16);
  EXPECT_LE(g.max_in_flight.load(), 4);
  EXPECT_GE(g.max_in_flight.load(), 2);  // downloads did overlap
}

TEST(CrawlTest, CrawledArchivesScan) {
  std::vector<StubExtension> exts = FiveExtensions();
  exts[0].script =
      "const vscode = require('vscode');\n"
      "exports.activate = (ctx) => ctx.globalState.get('OPENAI_API_KEY');\n";
  StubGallery g(exts);
  MarketplaceClient client(FastOptions(g));
  TempDir dest("scan");
  CrawlOptions o;
  o.dest = dest.path();
  client.Crawl(o);
  const MetadataSnapshot snap = MetadataSnapshot::Load(dest.path() / "metadata.tsv");
  const scan::CorpusResult c = scan::ScanCorpus(dest.path(), scan::ScanConfig{}, &snap);
  EXPECT_EQ(c.summary.total_scanned, 5);
  EXPECT_EQ(c.summary.flagged, 1);
  EXPECT_EQ(c.reports[0].extension_id, "stub.ext0");
  EXPECT_TRUE(c.reports[0].flagged());
}

TEST(RateLimiterTest, BoundsConcurrencyAndSpacesStarts) {
  RateLimiter limiter(3, std::chrono::milliseconds(15));
  std::atomic<int> now{0}, peak{0};
  std::vector<std::thread> threads;
  const auto t0 = RateLimiter::Clock::now();
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&] {
      RateLimiter::Permit p = limiter.Acquire();
      const int n = ++now;
      int seen = peak.load();
      while (n > seen && !peak.compare_exchange_weak(seen, n)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --now;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 3);
  // 12 holders over 3 slots: each slot's 4 uses are separated by 3 gaps of
  // at least min_delay + hold time.
  EXPECT_GE(RateLimiter::Clock::now() - t0, std::chrono::milliseconds(3 * 20));
}

TEST(RateLimiterTest, DeferPostponesAcquire) {
  RateLimiter limiter(2, std::chrono::milliseconds(0));
  const auto until = RateLimiter::Clock::now() + std::chrono::milliseconds(50);
  limiter.Defer(until);
  { RateLimiter::Permit p = limiter.Acquire(); }
  EXPECT_GE(RateLimiter::Clock::now(), until);
}

TEST(SnapshotTest, RoundTripWithEscapes) {
  MarketplaceEntry a;
  a.extension_id = "x.tab";
  a.version = "1.2.3";
  a.install_count = 42;
  a.categories = {"Machine Learning", "Other"};
  a.published_date = "2023-01-02T00:00:00Z";
  a.description = "tabs\there, newline\nthere and a back\\slash";
  a.tags = {"gpt", "ai code"};
  MarketplaceEntry b;
  b.extension_id = "a.plain";
  const MetadataSnapshot s({a, b});
  const MetadataSnapshot back = MetadataSnapshot::Parse(s.Serialize());
  ASSERT_EQ(back.size(), 2u);
  const MarketplaceEntry* got = back.Find("x.tab");
  ASSERT_NE(got, nullptr);
  EXPECT_EQ(got->description, a.description);
  EXPECT_EQ(got->categories, a.categories);
  EXPECT_EQ(got->tags, a.tags);
  EXPECT_EQ(got->install_count, 42);
  EXPECT_EQ(back.Serialize(), s.Serialize());
  EXPECT_EQ(CodeOf([] { MetadataSnapshot::Parse("only\ttwo\n"); }), ErrorCode::kCorpusFormat);
  EXPECT_EQ(CodeOf([] { MetadataSnapshot::Parse("a\t1\tmany\t\t\t\n"); }),
            ErrorCode::kCorpusFormat);
}

}  // namespace
}  // namespace vsxscan::market
