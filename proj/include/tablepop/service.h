// Copyright 2026 The Tablepop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TABLEPOP_SERVICE_H_
#define TABLEPOP_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <thread>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "tablepop/column_population.h"
#include "tablepop/evaluation.h"
#include "tablepop/kb.h"
#include "tablepop/row_population.h"
#include "tablepop/table_index.h"

namespace tablepop {

// Dump and redirect files behind a --kb argument: a file is the dump
// itself; a directory holds kb.jsonl and optionally redirects.tsv.
struct KbPaths {
  std::string dump;
  std::string redirects;
};
absl::StatusOr<KbPaths> ResolveKbPaths(const std::string& path);

// An immutable index + KB pair with the rankers bound to it. Not copyable or
// movable: the populators refer to the members.
struct Snapshot {
  Snapshot(TableIndex index_in, KbStore kb_in, IndexManifest manifest_in,
           std::string manifest_sha256_in, uint64_t sequence_in);
  Snapshot(const Snapshot&) = delete;
  Snapshot& operator=(const Snapshot&) = delete;

  TableIndex index;
  KbStore kb;
  IndexManifest manifest;
  std::string manifest_sha256;
  std::string version;  // short manifest digest
  uint64_t sequence = 0;
  RowPopulator rows;
  ColumnPopulator columns;
};

// An empty `kb_path` loads an empty KB (enough for column suggestions).
absl::StatusOr<std::shared_ptr<const Snapshot>> LoadSnapshot(
    const std::filesystem::path& index_dir, const std::string& kb_path,
    uint64_t sequence);

struct SuggestRequest {
  Task task = Task::kRows;
  SeedTable seed;
  size_t top_k = 100;
  RowMethod rows;
  ColumnMethod columns;
};

// Request body: the seed table fields plus optional "top_k", "components",
// "methods", "kb_similarity", "lambda_e", "lambda_l", "lambda_c" and (columns)
// "baseline". Shape errors are InvalidArgument; values outside their domain
// are OutOfRange.
absl::StatusOr<SuggestRequest> ParseSuggestRequest(absl::string_view body,
                                                   Task task, size_t top_k_cap);

// Ranks and truncates to request.top_k. Shared by the CLI and the service.
absl::StatusOr<RankedSuggestions> ExecuteSuggest(const Snapshot& snapshot,
                                                 const SuggestRequest& request);

nlohmann::json SuggestionsToJson(const RankedSuggestions& ranked);
// rank, item, total score, then one column per component.
std::string SuggestionsToTsv(const RankedSuggestions& ranked);

struct ServiceOptions {
  std::filesystem::path index_dir;
  std::string kb_path;
  size_t top_k_cap = 500;
  std::vector<std::string> cors_allowlist;
};

struct HttpRequestView {
  std::string method;
  std::string path;
  std::string body;
  std::string origin;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::vector<std::pair<std::string, std::string>> headers;
};

// Stateless suggestion endpoints over an atomically swappable snapshot.
class SuggestionService {
 public:
  explicit SuggestionService(ServiceOptions options);
  ~SuggestionService();

  // Loads from the configured directories and installs the result.
  absl::Status Reload();
  // Starts Reload() on a background thread; false if one is running.
  bool ReloadAsync();
  void Install(std::shared_ptr<const Snapshot> snapshot);
  std::shared_ptr<const Snapshot> current() const;
  bool loading() const { return loading_.load(); }

  HttpResponse Handle(const HttpRequestView& request) const;
  HttpResponse HandleAdmin(const HttpRequestView& request);

  const ServiceOptions& options() const { return options_; }

 private:
  HttpResponse Suggest(Task task, const HttpRequestView& request) const;
  HttpResponse Health() const;
  HttpResponse SnapshotInfo() const;
  void AddCors(const HttpRequestView& request, HttpResponse* response) const;

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
  std::atomic<bool> loading_{false};
  std::atomic<uint64_t> next_sequence_{1};
  uint64_t loading_sequence_ = 0;
  std::string last_error_;
  std::thread reload_thread_;
};

// Binds the service to an HTTP listener.
class HttpServer {
 public:
  explicit HttpServer(SuggestionService* service,
                      const std::string& static_dir = "");
  ~HttpServer();

  // Returns the bound port (useful with port 0), or an error.
  absl::StatusOr<int> Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tablepop

#endif  // TABLEPOP_SERVICE_H_
