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

// Command-line driver: index building, split drawing, suggestions,
// evaluation and the HTTP service.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "tablepop/config.h"
#include "tablepop/evaluation.h"
#include "tablepop/hashing.h"
#include "tablepop/kb.h"
#include "tablepop/metrics.h"
#include "tablepop/service.h"
#include "tablepop/status_macros.h"
#include "tablepop/table.h"
#include "tablepop/table_index.h"

namespace tablepop {
namespace {

using nlohmann::json;

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status WriteFile(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << data;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  TP_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, " is not valid JSON"));
  }
  return j;
}

// Accepts a split file (JSON) or a newline-separated list of table ids.
absl::StatusOr<std::vector<std::string>> ReadExclusions(const std::string& path) {
  TP_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded() && j.is_object()) {
    TP_ASSIGN_OR_RETURN(EvaluationSplit split, SplitFromJson(j));
    return ExclusionList(split);
  }
  std::vector<std::string> ids;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    line = absl::StripAsciiWhitespace(line);
    if (!line.empty()) ids.emplace_back(line);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string ExclusionText(const std::vector<std::string>& ids) {
  std::string text;
  for (const std::string& id : ids) absl::StrAppend(&text, id, "\n");
  return text;
}

void ReportRecordErrors(const std::string& path,
                        const std::vector<RecordError>& errors) {
  if (errors.empty()) return;
  std::cerr << path << ": skipped " << errors.size() << " malformed records\n";
  for (size_t i = 0; i < errors.size() && i < 5; ++i) {
    std::cerr << "  line " << errors[i].line << ": " << errors[i].message << "\n";
  }
}

absl::StatusOr<std::vector<Table>> LoadCorpus(const std::string& path,
                                              const KbStore* kb) {
  TP_ASSIGN_OR_RETURN(CorpusParseResult parsed, ReadCorpusFile(path));
  ReportRecordErrors(path, parsed.errors);
  if (kb != nullptr) {
    for (Table& t : parsed.tables) kb->CanonicalizeLinks(&t);
  }
  return std::move(parsed.tables);
}

absl::StatusOr<KbStore> LoadKb(const std::string& kb_path,
                               const std::string& redirects_override,
                               std::string* dump_path) {
  TP_ASSIGN_OR_RETURN(KbPaths paths, ResolveKbPaths(kb_path));
  if (!redirects_override.empty()) paths.redirects = redirects_override;
  std::vector<RecordError> errors;
  TP_ASSIGN_OR_RETURN(KbStore kb,
                      KbStore::LoadFiles(paths.dump, paths.redirects, &errors));
  ReportRecordErrors(paths.dump, errors);
  if (dump_path != nullptr) *dump_path = paths.dump;
  return kb;
}

// ---------------------------------------------------------------------------
// index build

struct IndexBuildArgs {
  std::string corpus, kb, redirects, exclude, out;
  double k1 = 1.2;
  double b = 0.75;
};

absl::Status RunIndexBuild(const IndexBuildArgs& a) {
  std::string dump_path;
  TP_ASSIGN_OR_RETURN(KbStore kb, LoadKb(a.kb, a.redirects, &dump_path));
  TP_ASSIGN_OR_RETURN(std::vector<Table> corpus, LoadCorpus(a.corpus, &kb));
  std::vector<std::string> excluded_ids;
  if (!a.exclude.empty()) {
    TP_ASSIGN_OR_RETURN(excluded_ids, ReadExclusions(a.exclude));
  }
  absl::flat_hash_set<std::string> excluded(excluded_ids.begin(),
                                            excluded_ids.end());
  Bm25Params params;
  params.k1 = a.k1;
  params.b = a.b;
  TableIndex index = TableIndex::Build(corpus, excluded, params);

  IndexManifest manifest;
  manifest.bm25 = params;
  manifest.n_tables = index.num_tables();
  manifest.n_holdout = index.holdout().size();
  TP_ASSIGN_OR_RETURN(manifest.corpus_sha256, Sha256File(a.corpus));
  TP_ASSIGN_OR_RETURN(manifest.kb_sha256, Sha256File(dump_path));
  manifest.exclusion_sha256 = Sha256Hex(ExclusionText(excluded_ids));
  TP_RETURN_IF_ERROR(index.Save(a.out, manifest));
  std::cerr << "indexed " << manifest.n_tables << " tables, held out "
            << manifest.n_holdout << " of " << excluded_ids.size()
            << " excluded ids\n";
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string corpus, kb, task = "rows", out, exclude_out;
  uint64_t seed = 0;
  size_t size = 1000;
};

absl::Status RunSplit(const SplitArgs& a) {
  TP_ASSIGN_OR_RETURN(Task task, ParseTask(a.task));
  KbStore kb;
  if (!a.kb.empty()) {
    TP_ASSIGN_OR_RETURN(kb, LoadKb(a.kb, "", nullptr));
  }
  TP_ASSIGN_OR_RETURN(std::vector<Table> corpus,
                      LoadCorpus(a.corpus, a.kb.empty() ? nullptr : &kb));
  TP_ASSIGN_OR_RETURN(EvaluationSplit split, MakeSplit(corpus, task, a.seed, a.size));
  TP_RETURN_IF_ERROR(WriteFile(a.out, SplitToJson(split).dump(2) + "\n"));
  if (!a.exclude_out.empty()) {
    TP_RETURN_IF_ERROR(WriteFile(a.exclude_out, ExclusionText(ExclusionList(split))));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// suggest

struct SuggestArgs {
  std::string index, kb, seed;
  std::string components, methods, kb_similarity, baseline, format = "tsv";
  std::optional<double> lambda_e, lambda_l, lambda_c;
  int top = 100;
};

// Builds the same request body the HTTP service receives, so both paths go
// through one parser.
absl::StatusOr<std::string> SuggestBody(const SuggestArgs& a, Task task) {
  TP_ASSIGN_OR_RETURN(json body, ReadJsonFile(a.seed));
  if (!body.is_object()) {
    return absl::InvalidArgumentError("seed file must hold a JSON object");
  }
  body["top_k"] = a.top;
  if (!a.components.empty()) body["components"] = a.components;
  if (!a.methods.empty()) body["methods"] = a.methods;
  if (task == Task::kRows) {
    if (!a.kb_similarity.empty()) body["kb_similarity"] = a.kb_similarity;
    if (a.lambda_e) body["lambda_e"] = *a.lambda_e;
    if (a.lambda_l) body["lambda_l"] = *a.lambda_l;
    if (a.lambda_c) body["lambda_c"] = *a.lambda_c;
  } else if (!a.baseline.empty()) {
    body["baseline"] = a.baseline;
  }
  return body.dump();
}

absl::Status RunSuggest(const SuggestArgs& a, Task task) {
  TP_ASSIGN_OR_RETURN(std::string body, SuggestBody(a, task));
  TP_ASSIGN_OR_RETURN(SuggestRequest request,
                      ParseSuggestRequest(body, task, ServiceOptions().top_k_cap));
  TP_ASSIGN_OR_RETURN(std::shared_ptr<const Snapshot> snapshot,
                      LoadSnapshot(a.index, a.kb, 0));
  TP_ASSIGN_OR_RETURN(RankedSuggestions ranked, ExecuteSuggest(*snapshot, request));
  if (a.format == "json") {
    std::cout << SuggestionsToJson(ranked).dump(2) << "\n";
  } else {
    std::cout << SuggestionsToTsv(ranked);
  }
  for (const std::string& d : ranked.diagnostics) std::cerr << "note: " << d << "\n";
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string task = "rows", index, kb, split, config, out, sweep;
  std::string set = "test";
  size_t threads = 1;
};

struct Sweep {
  std::string param;
  std::vector<double> values;
};

// "lambda-e=0:1:0.1" -> 0, 0.1, ..., 1.
absl::StatusOr<Sweep> ParseSweep(absl::string_view text) {
  std::vector<std::string> kv = absl::StrSplit(text, '=');
  if (kv.size() != 2) return absl::InvalidArgumentError("sweep must be name=lo:hi:step");
  Sweep sweep;
  sweep.param = kv[0];
  if (sweep.param != "lambda-e" && sweep.param != "lambda-l" &&
      sweep.param != "lambda-c") {
    return absl::OutOfRangeError(absl::StrCat("cannot sweep '", sweep.param, "'"));
  }
  std::vector<std::string> parts = absl::StrSplit(kv[1], ':');
  double lo, hi, step;
  if (parts.size() != 3 || !absl::SimpleAtod(parts[0], &lo) ||
      !absl::SimpleAtod(parts[1], &hi) || !absl::SimpleAtod(parts[2], &step) ||
      !(step > 0) || hi < lo) {
    return absl::InvalidArgumentError("sweep range must be lo:hi:step with step > 0");
  }
  // Integer steps avoid accumulating rounding error in the grid.
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) sweep.values.push_back(lo + i * step);
  return sweep;
}

absl::StatusOr<std::vector<Table>> SplitTables(const TableIndex& index,
                                               const EvaluationSplit& split,
                                               const std::string& set) {
  const std::vector<std::string>* ids = nullptr;
  if (set == "test") {
    ids = &split.test;
  } else if (set == "validation") {
    ids = &split.validation;
  } else {
    return absl::OutOfRangeError("--set must be test or validation");
  }
  absl::flat_hash_map<std::string, const Table*> by_id;
  for (const Table& t : index.holdout()) by_id[t.id] = &t;
  std::vector<Table> tables;
  for (const std::string& id : *ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "table ", id, " was not excluded when the index was built"));
    }
    tables.push_back(*it->second);
  }
  return tables;
}

absl::Status RunEvaluate(const EvaluateArgs& a) {
  TP_ASSIGN_OR_RETURN(Task task, ParseTask(a.task));
  TP_ASSIGN_OR_RETURN(json split_json, ReadJsonFile(a.split));
  TP_ASSIGN_OR_RETURN(EvaluationSplit split, SplitFromJson(split_json));
  if (split.task != task) {
    return absl::FailedPreconditionError(
        absl::StrCat("split was drawn for the ", TaskName(split.task), " task"));
  }
  EvalConfig config;
  if (!a.config.empty()) {
    TP_ASSIGN_OR_RETURN(json config_json, ReadJsonFile(a.config));
    TP_ASSIGN_OR_RETURN(config, ParseEvalConfig(config_json));
  }
  TP_ASSIGN_OR_RETURN(std::shared_ptr<const Snapshot> snapshot,
                      LoadSnapshot(a.index, a.kb, 0));
  TP_ASSIGN_OR_RETURN(std::vector<Table> tables,
                      SplitTables(snapshot->index, split, a.set));
  RunOptions options;
  options.depth = config.depth;

  auto run_one = [&](const EvalConfig& cfg) -> absl::StatusOr<json> {
    CaseRanker ranker;
    if (task == Task::kRows) {
      TP_RETURN_IF_ERROR(cfg.rows.candidates.Validate());
      TP_RETURN_IF_ERROR(cfg.rows.ranking.Validate());
      ranker = MakeRowRanker(snapshot->rows, cfg.rows);
    } else {
      TP_RETURN_IF_ERROR(cfg.columns.candidates.Validate());
      ranker = MakeColumnRanker(snapshot->columns, cfg.columns);
    }
    EvalReport report = RunEvaluation(tables, task, ranker, options);
    report.config = EvalConfigToJson(cfg);
    return ReportToJson(report);
  };

  json out;
  if (a.sweep.empty()) {
    TP_ASSIGN_OR_RETURN(out, run_one(config));
  } else {
    if (task != Task::kRows) {
      return absl::InvalidArgumentError("lambda sweeps apply to the rows task");
    }
    TP_ASSIGN_OR_RETURN(Sweep sweep, ParseSweep(a.sweep));
    out = {{"sweep", {{"param", sweep.param}, {"values", sweep.values}}},
           {"reports", json::array()}};
    for (double v : sweep.values) {
      EvalConfig cfg = config;
      double* target = sweep.param == "lambda-e"   ? &cfg.rows.ranking.lambda_e
                       : sweep.param == "lambda-l" ? &cfg.rows.ranking.lambda_l
                                                   : &cfg.rows.ranking.lambda_c;
      *target = v;
      TP_ASSIGN_OR_RETURN(json report, run_one(cfg));
      out["reports"].push_back(std::move(report));
    }
  }
  return WriteFile(a.out, out.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string baseline, candidate;
};

absl::Status RunCompare(const CompareArgs& a) {
  TP_ASSIGN_OR_RETURN(json base, ReadJsonFile(a.baseline));
  TP_ASSIGN_OR_RETURN(json cand, ReadJsonFile(a.candidate));
  if (!base.contains("results") || !cand.contains("results")) {
    return absl::InvalidArgumentError("both files must be evaluation reports");
  }
  std::cout << "seed_size\tmap_a\tmap_b\tn\tt\tp\n";
  for (const json& rb : base["results"]) {
    for (const json& rc : cand["results"]) {
      if (rc["seed_size"] != rb["seed_size"]) continue;
      absl::flat_hash_map<std::string, double> ap_b;
      for (const json& t : rc["tables"]) ap_b[t["id"].get<std::string>()] = t["ap"];
      std::vector<double> xa, xb;
      for (const json& t : rb["tables"]) {
        auto it = ap_b.find(t["id"].get<std::string>());
        if (it == ap_b.end()) continue;
        xa.push_back(t["ap"]);
        xb.push_back(it->second);
      }
      auto test = PairedTTest(xa, xb);
      std::cout << rb["seed_size"] << '\t' << rb["map"] << '\t' << rc["map"]
                << '\t' << xa.size() << '\t';
      if (test.ok()) {
        std::cout << test->t << '\t' << test->p_value << '\n';
      } else {
        std::cout << "-\t-\n";
      }
    }
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string corpus, kb;
};

absl::Status RunStats(const StatsArgs& a) {
  KbStore kb;
  if (!a.kb.empty()) {
    TP_ASSIGN_OR_RETURN(kb, LoadKb(a.kb, "", nullptr));
  }
  TP_ASSIGN_OR_RETURN(std::vector<Table> corpus,
                      LoadCorpus(a.corpus, a.kb.empty() ? nullptr : &kb));
  json out = {{"tables", corpus.size()}};
  for (bool constrained : {false, true}) {
    const EntityColumnLadder l = CountEntityColumnLadder(corpus, constrained);
    out[constrained ? "with_constraints" : "all"] = {
        {"any_entity", l.any_entity},     {"at_least_60", l.at_least_60},
        {"at_least_80", l.at_least_80},   {"all_entities", l.all_entities},
        {"all_unique", l.all_unique}};
  }
  std::cout << out.dump(2) << "\n";
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  std::string index, kb, bind = "127.0.0.1:8080", static_dir;
  size_t top_k_cap = 500;
  std::vector<std::string> cors;
};

std::atomic<bool> g_stop{false};
std::atomic<bool> g_reload{false};

extern "C" void OnSignal(int sig) {
  if (sig == SIGHUP) {
    g_reload.store(true);
  } else {
    g_stop.store(true);
  }
}

absl::Status RunServe(const ServeArgs& a) {
  std::string host = a.bind;
  int port = 8080;
  if (const size_t colon = a.bind.rfind(':'); colon != std::string::npos) {
    host = a.bind.substr(0, colon);
    if (!absl::SimpleAtoi(a.bind.substr(colon + 1), &port) || port < 0 ||
        port > 65535) {
      return absl::InvalidArgumentError(absl::StrCat("bad bind address ", a.bind));
    }
  }
  ServiceOptions options;
  options.index_dir = a.index;
  options.kb_path = a.kb;
  options.top_k_cap = a.top_k_cap;
  options.cors_allowlist = a.cors;
  SuggestionService service(options);
  HttpServer server(&service, a.static_dir);
  TP_ASSIGN_OR_RETURN(int bound, server.Bind(host, port));
  std::cerr << "listening on " << host << ":" << bound << "\n";

  std::signal(SIGHUP, OnSignal);
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  // Requests get 503 until the first snapshot is installed.
  service.ReloadAsync();
  std::thread watcher([&] {
    while (!g_stop.load()) {
      if (g_reload.exchange(false)) {
        if (!service.ReloadAsync()) std::cerr << "reload already running\n";
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.Stop();
  });
  server.Serve();
  g_stop.store(true);
  watcher.join();
  return absl::OkStatus();
}

int Exit(const absl::Status& status) {
  if (status.ok()) return 0;
  std::cerr << "error: " << status << "\n";
  return status.code() == absl::StatusCode::kInvalidArgument ? 2 : 1;
}

}  // namespace
}  // namespace tablepop

int main(int argc, char** argv) {
  using namespace tablepop;
  CLI::App app{"Entity-focused table completion"};
  app.require_subcommand(1);
  int code = 0;

  auto* index = app.add_subcommand("index", "Index management");
  index->require_subcommand(1);
  IndexBuildArgs build;
  auto* build_cmd = index->add_subcommand("build", "Build and persist an index");
  build_cmd->add_option("--corpus", build.corpus, "Table corpus (JSONL)")->required();
  build_cmd->add_option("--kb", build.kb, "KB dump file or directory")->required();
  build_cmd->add_option("--redirects", build.redirects, "Redirect table (TSV)");
  build_cmd->add_option("--exclude", build.exclude, "Split file or id list to hold out");
  build_cmd->add_option("--out", build.out, "Output directory")->required();
  build_cmd->add_option("--k1", build.k1, "BM25 k1")->capture_default_str();
  build_cmd->add_option("--b", build.b, "BM25 b")->capture_default_str();
  build_cmd->callback([&] { code = Exit(RunIndexBuild(build)); });

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Draw validation/test tables");
  split_cmd->add_option("--corpus", split.corpus, "Table corpus (JSONL)")->required();
  split_cmd->add_option("--kb", split.kb, "KB used to canonicalize links");
  split_cmd->add_option("--task", split.task, "rows or columns")->required();
  split_cmd->add_option("--seed", split.seed, "RNG seed")->required();
  split_cmd->add_option("--size", split.size, "Tables per set")->capture_default_str();
  split_cmd->add_option("--out", split.out, "Split file (JSON)")->required();
  split_cmd->add_option("--exclude-out", split.exclude_out, "Write the exclusion list");
  split_cmd->callback([&] { code = Exit(RunSplit(split)); });

  auto* suggest = app.add_subcommand("suggest", "Suggest rows or columns for a seed table");
  suggest->require_subcommand(1);
  SuggestArgs rows_args, cols_args;
  auto* rows_cmd = suggest->add_subcommand("rows", "Rank entities for the next row");
  rows_cmd->add_option("--index", rows_args.index)->required();
  rows_cmd->add_option("--kb", rows_args.kb)->required();
  rows_cmd->add_option("--seed", rows_args.seed, "SeedTable JSON")->required();
  rows_cmd->add_option("--components", rows_args.components, "esim,label,caption");
  rows_cmd->add_option("--methods", rows_args.methods, "categories,types,caption,entities");
  rows_cmd->add_option("--kb-sim", rows_args.kb_similarity, "relations, wlm or jaccard");
  rows_cmd->add_option("--lambda-e", rows_args.lambda_e);
  rows_cmd->add_option("--lambda-l", rows_args.lambda_l);
  rows_cmd->add_option("--lambda-c", rows_args.lambda_c);
  rows_cmd->add_option("--top", rows_args.top)->capture_default_str();
  rows_cmd->add_option("--format", rows_args.format)->check(CLI::IsMember({"tsv", "json"}));
  rows_cmd->callback([&] { code = Exit(RunSuggest(rows_args, Task::kRows)); });

  auto* cols_cmd = suggest->add_subcommand("columns", "Rank labels for the next column");
  cols_cmd->add_option("--index", cols_args.index)->required();
  cols_cmd->add_option("--kb", cols_args.kb, "Optional; columns do not use the KB");
  cols_cmd->add_option("--seed", cols_args.seed, "SeedTable JSON")->required();
  cols_cmd->add_option("--components", cols_args.components, "caption,labels,entities");
  cols_cmd->add_option("--methods", cols_args.methods, "caption,labels,entities");
  cols_cmd->add_option("--baseline", cols_args.baseline, "acsdb");
  cols_cmd->add_option("--top", cols_args.top)->capture_default_str();
  cols_cmd->add_option("--format", cols_args.format)->check(CLI::IsMember({"tsv", "json"}));
  cols_cmd->callback([&] { code = Exit(RunSuggest(cols_args, Task::kColumns)); });

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Run the simulated evaluation");
  eval_cmd->add_option("--task", eval.task, "rows or columns")->required();
  eval_cmd->add_option("--index", eval.index)->required();
  eval_cmd->add_option("--kb", eval.kb);
  eval_cmd->add_option("--split", eval.split)->required();
  eval_cmd->add_option("--config", eval.config, "Evaluation config (JSON)");
  eval_cmd->add_option("--out", eval.out, "Report file")->required();
  eval_cmd->add_option("--set", eval.set, "test or validation")->capture_default_str();
  eval_cmd->add_option("--sweep", eval.sweep, "e.g. lambda-e=0:1:0.1");
  eval_cmd->callback([&] {
    if (eval.task == "rows" && eval.kb.empty()) {
      code = Exit(absl::InvalidArgumentError("--kb is required for the rows task"));
      return;
    }
    code = Exit(RunEvaluate(eval));
  });

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired t-test between two reports");
  cmp_cmd->add_option("baseline", cmp.baseline)->required();
  cmp_cmd->add_option("candidate", cmp.candidate)->required();
  cmp_cmd->callback([&] { code = Exit(RunCompare(cmp)); });

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Entity-column statistics of a corpus");
  stats_cmd->add_option("--corpus", stats.corpus)->required();
  stats_cmd->add_option("--kb", stats.kb);
  stats_cmd->callback([&] { code = Exit(RunStats(stats)); });

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP suggestion service");
  serve_cmd->add_option("--index", serve.index)->required()->envname("TABLEPOP_INDEX");
  serve_cmd->add_option("--kb", serve.kb)->required()->envname("TABLEPOP_KB");
  serve_cmd->add_option("--bind", serve.bind, "host:port")
      ->capture_default_str()
      ->envname("TABLEPOP_BIND");
  serve_cmd->add_option("--top-k-cap", serve.top_k_cap)
      ->capture_default_str()
      ->envname("TABLEPOP_TOP_K_CAP");
  serve_cmd->add_option("--cors", serve.cors, "Allowed origins")
      ->delimiter(',')
      ->envname("TABLEPOP_CORS");
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->callback([&] { code = Exit(RunServe(serve)); });

  CLI11_PARSE(app, argc, argv);
  return code;
}
