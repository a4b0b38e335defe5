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

#include "tablepop/service.h"

#include <chrono>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "tablepop/config.h"
#include "tablepop/hashing.h"
#include "tablepop/status_macros.h"

namespace tablepop {
namespace {

using nlohmann::json;

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
      return 422;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

HttpResponse JsonResponse(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

HttpResponse ErrorResponse(const absl::Status& status) {
  return JsonResponse(HttpStatusFor(status),
                      {{"error", std::string(status.message())},
                       {"code", absl::StatusCodeToString(status.code())}});
}

absl::Status ShapeError(absl::string_view field, absl::string_view expected) {
  return absl::InvalidArgumentError(
      absl::StrCat("'", field, "' must be ", expected));
}

absl::StatusOr<std::vector<std::string>> Strings(const json& v,
                                                 absl::string_view field) {
  if (!v.is_array()) return ShapeError(field, "an array of strings");
  std::vector<std::string> out;
  for (const json& s : v) {
    if (!s.is_string()) return ShapeError(field, "an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

absl::StatusOr<std::string> NameList(const json& v, absl::string_view field) {
  if (v.is_string()) return v.get<std::string>();
  TP_ASSIGN_OR_RETURN(std::vector<std::string> names, Strings(v, field));
  std::string joined;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) joined += ",";
    joined += names[i];
  }
  return joined;
}

absl::Status ReadLambda(const json& j, const char* key, double* out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  if (!it->is_number()) return ShapeError(key, "a number");
  *out = it->get<double>();
  if (!(*out >= 0.0 && *out <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat("'", key, "' must lie in [0, 1]"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<KbPaths> ResolveKbPaths(const std::string& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    KbPaths paths;
    paths.dump = (std::filesystem::path(path) / "kb.jsonl").string();
    if (!std::filesystem::exists(paths.dump, ec)) {
      return absl::NotFoundError(absl::StrCat("no kb.jsonl in ", path));
    }
    const auto redirects = std::filesystem::path(path) / "redirects.tsv";
    if (std::filesystem::exists(redirects, ec)) paths.redirects = redirects.string();
    return paths;
  }
  if (!std::filesystem::exists(path, ec)) {
    return absl::NotFoundError(absl::StrCat("KB path ", path, " does not exist"));
  }
  return KbPaths{path, ""};
}

Snapshot::Snapshot(TableIndex index_in, KbStore kb_in, IndexManifest manifest_in,
                   std::string manifest_sha256_in, uint64_t sequence_in)
    : index(std::move(index_in)),
      kb(std::move(kb_in)),
      manifest(std::move(manifest_in)),
      manifest_sha256(std::move(manifest_sha256_in)),
      version(manifest_sha256.substr(0, 16)),
      sequence(sequence_in),
      rows(kb, index),
      columns(index) {}

absl::StatusOr<std::shared_ptr<const Snapshot>> LoadSnapshot(
    const std::filesystem::path& index_dir, const std::string& kb_path,
    uint64_t sequence) {
  TP_ASSIGN_OR_RETURN(IndexManifest manifest, TableIndex::ReadManifest(index_dir));
  TP_ASSIGN_OR_RETURN(std::string manifest_sha,
                      Sha256File((index_dir / "manifest.json").string()));
  TP_ASSIGN_OR_RETURN(TableIndex index, TableIndex::Load(index_dir));
  KbStore kb;
  if (!kb_path.empty()) {
    TP_ASSIGN_OR_RETURN(KbPaths paths, ResolveKbPaths(kb_path));
    if (!manifest.kb_sha256.empty()) {
      TP_ASSIGN_OR_RETURN(std::string kb_sha, Sha256File(paths.dump));
      if (kb_sha != manifest.kb_sha256) {
        return absl::FailedPreconditionError(absl::StrCat(
            "KB ", paths.dump, " does not match the KB the index was built with"));
      }
    }
    TP_ASSIGN_OR_RETURN(kb, KbStore::LoadFiles(paths.dump, paths.redirects, nullptr));
  }
  return std::make_shared<const Snapshot>(std::move(index), std::move(kb),
                                          std::move(manifest),
                                          std::move(manifest_sha), sequence);
}

absl::StatusOr<SuggestRequest> ParseSuggestRequest(absl::string_view body,
                                                   Task task, size_t top_k_cap) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("body is not valid JSON");
  if (!j.is_object()) return absl::InvalidArgumentError("body must be a JSON object");

  SuggestRequest req;
  req.task = task;
  if (auto c = j.find("caption"); c != j.end() && !c->is_null()) {
    if (!c->is_string()) return ShapeError("caption", "a string");
    req.seed.caption = c->get<std::string>();
  }
  if (auto e = j.find("entities"); e != j.end()) {
    TP_ASSIGN_OR_RETURN(req.seed.entities, Strings(*e, "entities"));
  }
  if (auto l = j.find("labels"); l != j.end()) {
    TP_ASSIGN_OR_RETURN(req.seed.labels, Strings(*l, "labels"));
  }
  if (absl::Status s = ValidateSeedTable(req.seed); !s.ok()) {
    return absl::OutOfRangeError(s.message());
  }
  if (auto k = j.find("top_k"); k != j.end()) {
    if (!k->is_number_integer()) return ShapeError("top_k", "an integer");
    const int64_t v = k->get<int64_t>();
    if (v < 1 || static_cast<uint64_t>(v) > top_k_cap) {
      return absl::OutOfRangeError(
          absl::StrCat("top_k must lie in [1, ", top_k_cap, "]"));
    }
    req.top_k = static_cast<size_t>(v);
  }
  req.top_k = std::min(req.top_k, top_k_cap);

  if (task == Task::kRows) {
    if (auto c = j.find("components"); c != j.end()) {
      TP_ASSIGN_OR_RETURN(std::string list, NameList(*c, "components"));
      TP_RETURN_IF_ERROR(SetRowComponents(list, &req.rows.ranking));
    }
    if (auto m = j.find("methods"); m != j.end()) {
      TP_ASSIGN_OR_RETURN(std::string list, NameList(*m, "methods"));
      TP_RETURN_IF_ERROR(SetRowMethods(list, &req.rows.candidates));
    }
    if (auto s = j.find("kb_similarity"); s != j.end()) {
      if (!s->is_string()) return ShapeError("kb_similarity", "a string");
      TP_ASSIGN_OR_RETURN(req.rows.ranking.kb_similarity,
                          ParseKbSimilarity(s->get<std::string>()));
    }
    TP_RETURN_IF_ERROR(ReadLambda(j, "lambda_e", &req.rows.ranking.lambda_e));
    TP_RETURN_IF_ERROR(ReadLambda(j, "lambda_l", &req.rows.ranking.lambda_l));
    TP_RETURN_IF_ERROR(ReadLambda(j, "lambda_c", &req.rows.ranking.lambda_c));
  } else {
    if (auto c = j.find("components"); c != j.end()) {
      TP_ASSIGN_OR_RETURN(std::string list, NameList(*c, "components"));
      TP_RETURN_IF_ERROR(SetColumnComponents(list, &req.columns.ranking));
    }
    if (auto m = j.find("methods"); m != j.end()) {
      TP_ASSIGN_OR_RETURN(std::string list, NameList(*m, "methods"));
      TP_RETURN_IF_ERROR(SetColumnMethods(list, &req.columns.candidates));
    }
    if (auto b = j.find("baseline"); b != j.end() && !b->is_null()) {
      if (!b->is_string()) return ShapeError("baseline", "a string");
      if (b->get<std::string>() != "acsdb") {
        return absl::OutOfRangeError("the only column baseline is \"acsdb\"");
      }
      req.columns.acsdb_baseline = true;
    }
  }
  return req;
}

absl::StatusOr<RankedSuggestions> ExecuteSuggest(const Snapshot& snapshot,
                                                 const SuggestRequest& request) {
  absl::StatusOr<RankedSuggestions> ranked;
  if (request.task == Task::kRows) {
    ranked = snapshot.rows.Rank(request.seed, request.rows.candidates,
                                request.rows.ranking);
  } else if (request.columns.acsdb_baseline) {
    ranked = snapshot.columns.RankBaseline(request.seed,
                                           request.columns.candidates);
  } else {
    ranked = snapshot.columns.Rank(request.seed, request.columns.candidates,
                                   request.columns.ranking);
  }
  if (ranked.ok() && ranked->items.size() > request.top_k) {
    ranked->items.resize(request.top_k);
  }
  return ranked;
}

json SuggestionsToJson(const RankedSuggestions& ranked) {
  json items = json::array();
  for (size_t i = 0; i < ranked.items.size(); ++i) {
    const Suggestion& s = ranked.items[i];
    json components = json::array();
    for (const ComponentScore& c : s.components) {
      components.push_back({{"name", c.name},
                            {"value", c.value},
                            {"state", ComponentStateName(c.state)}});
    }
    items.push_back({{"rank", i + 1},
                     {"item", s.item},
                     {"score", s.score},
                     {"components", std::move(components)}});
  }
  return {{"suggestions", std::move(items)}, {"diagnostics", ranked.diagnostics}};
}

std::string SuggestionsToTsv(const RankedSuggestions& ranked) {
  std::ostringstream out;
  out << "rank\titem\tscore";
  if (!ranked.items.empty()) {
    for (const ComponentScore& c : ranked.items.front().components) {
      out << '\t' << c.name;
    }
  }
  out << '\n';
  for (size_t i = 0; i < ranked.items.size(); ++i) {
    const Suggestion& s = ranked.items[i];
    // Same number formatting as the JSON responses.
    out << (i + 1) << '\t' << s.item << '\t' << json(s.score).dump();
    for (const ComponentScore& c : s.components) {
      out << '\t' << json(c.value).dump();
    }
    out << '\n';
  }
  return out.str();
}

SuggestionService::SuggestionService(ServiceOptions options)
    : options_(std::move(options)) {}

SuggestionService::~SuggestionService() {
  if (reload_thread_.joinable()) reload_thread_.join();
}

absl::Status SuggestionService::Reload() {
  bool expected = false;
  if (!loading_.compare_exchange_strong(expected, true)) {
    return absl::FailedPreconditionError("a reload is already running");
  }
  const uint64_t seq = next_sequence_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lock(mu_);
    loading_sequence_ = seq;
  }
  auto snapshot = LoadSnapshot(options_.index_dir, options_.kb_path, seq);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (snapshot.ok()) {
      current_ = *std::move(snapshot);
      last_error_.clear();
    } else {
      last_error_ = std::string(snapshot.status().message());
    }
    loading_sequence_ = 0;
  }
  loading_.store(false);
  return snapshot.status();
}

bool SuggestionService::ReloadAsync() {
  if (loading_.load()) return false;
  if (reload_thread_.joinable()) reload_thread_.join();
  reload_thread_ = std::thread([this] { (void)Reload(); });
  return true;
}

void SuggestionService::Install(std::shared_ptr<const Snapshot> snapshot) {
  std::lock_guard<std::mutex> lock(mu_);
  current_ = std::move(snapshot);
}

std::shared_ptr<const Snapshot> SuggestionService::current() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

void SuggestionService::AddCors(const HttpRequestView& request,
                                HttpResponse* response) const {
  if (request.origin.empty()) return;
  for (const auto& allowed : options_.cors_allowlist) {
    if (allowed == "*" || allowed == request.origin) {
      response->headers.emplace_back("Access-Control-Allow-Origin", request.origin);
      response->headers.emplace_back("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      response->headers.emplace_back("Access-Control-Allow-Headers", "Content-Type");
      response->headers.emplace_back("Vary", "Origin");
      return;
    }
  }
}

HttpResponse SuggestionService::Handle(const HttpRequestView& request) const {
  HttpResponse response;
  if (request.method == "OPTIONS") {
    response.status = 204;
    response.content_type.clear();
  } else if (request.method == "GET" && request.path == "/health") {
    response = Health();
  } else if (request.method == "GET" && request.path == "/snapshot") {
    response = SnapshotInfo();
  } else if (request.method == "POST" && request.path == "/suggest/rows") {
    response = Suggest(Task::kRows, request);
  } else if (request.method == "POST" && request.path == "/suggest/columns") {
    response = Suggest(Task::kColumns, request);
  } else {
    response = JsonResponse(404, {{"error", "no such endpoint"}});
  }
  AddCors(request, &response);
  return response;
}

HttpResponse SuggestionService::HandleAdmin(const HttpRequestView& request) {
  if (request.method == "POST" && request.path == "/admin/reload") {
    if (!ReloadAsync()) {
      return JsonResponse(409, {{"error", "a reload is already running"}});
    }
    return JsonResponse(202, {{"reloading", true}});
  }
  return JsonResponse(404, {{"error", "no such endpoint"}});
}

HttpResponse SuggestionService::Suggest(Task task,
                                        const HttpRequestView& request) const {
  const auto start = std::chrono::steady_clock::now();
  std::shared_ptr<const Snapshot> snapshot = current();
  if (snapshot == nullptr) {
    return ErrorResponse(absl::UnavailableError("snapshot is loading"));
  }
  auto parsed = ParseSuggestRequest(request.body, task, options_.top_k_cap);
  if (!parsed.ok()) return ErrorResponse(parsed.status());
  auto ranked = ExecuteSuggest(*snapshot, *parsed);
  if (!ranked.ok()) return ErrorResponse(ranked.status());
  json body = SuggestionsToJson(*ranked);
  body["task"] = TaskName(task);
  body["snapshot"] = snapshot->version;
  body["timing_ms"] = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return JsonResponse(200, body);
}

HttpResponse SuggestionService::Health() const {
  std::shared_ptr<const Snapshot> snapshot = current();
  return JsonResponse(
      200, {{"status", snapshot ? "ok" : "loading"},
            {"snapshot", snapshot ? json(snapshot->version) : json()},
            {"loading", loading_.load()}});
}

HttpResponse SuggestionService::SnapshotInfo() const {
  std::shared_ptr<const Snapshot> snapshot;
  uint64_t loading_seq = 0;
  std::string last_error;
  {
    std::lock_guard<std::mutex> lock(mu_);
    snapshot = current_;
    loading_seq = loading_sequence_;
    last_error = last_error_;
  }
  json current;
  if (snapshot) {
    const IndexManifest& m = snapshot->manifest;
    current = {{"version", snapshot->version},
               {"sequence", snapshot->sequence},
               {"manifest_sha256", snapshot->manifest_sha256},
               {"corpus_sha256", m.corpus_sha256},
               {"kb_sha256", m.kb_sha256},
               {"exclusion_sha256", m.exclusion_sha256},
               {"bm25", {{"k1", m.bm25.k1}, {"b", m.bm25.b}}},
               {"n_tables", m.n_tables},
               {"n_holdout", m.n_holdout}};
  }
  json loading;
  if (loading_seq != 0) {
    loading = {{"sequence", loading_seq}};
    auto sha = Sha256File((options_.index_dir / "manifest.json").string());
    if (sha.ok()) {
      loading["manifest_sha256"] = *sha;
      loading["version"] = sha->substr(0, 16);
    }
  }
  json body = {{"current", current}, {"loading", loading}};
  if (!last_error.empty()) body["last_error"] = last_error;
  return JsonResponse(200, body);
}

struct HttpServer::Impl {
  httplib::Server server;
  SuggestionService* service = nullptr;
};

namespace {

HttpRequestView ViewOf(const httplib::Request& req) {
  return {req.method, req.path, req.body, req.get_header_value("Origin")};
}

void Write(const HttpResponse& r, httplib::Response* res) {
  res->status = r.status;
  for (const auto& [k, v] : r.headers) res->set_header(k, v);
  if (!r.content_type.empty()) res->set_content(r.body, r.content_type);
}

}  // namespace

HttpServer::HttpServer(SuggestionService* service, const std::string& static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = service;
  auto handle = [this](const httplib::Request& req, httplib::Response& res) {
    Write(impl_->service->Handle(ViewOf(req)), &res);
  };
  impl_->server.Get("/health", handle);
  impl_->server.Get("/snapshot", handle);
  impl_->server.Post("/suggest/rows", handle);
  impl_->server.Post("/suggest/columns", handle);
  impl_->server.Options(R"(/.*)", handle);
  impl_->server.Post("/admin/reload",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       Write(impl_->service->HandleAdmin(ViewOf(req)), &res);
                     });
  if (!static_dir.empty()) impl_->server.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { Stop(); }

absl::StatusOr<int> HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) return absl::UnavailableError(absl::StrCat("cannot bind ", host));
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    return absl::UnavailableError(absl::StrCat("cannot bind ", host, ":", port));
  }
  return port;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace tablepop
