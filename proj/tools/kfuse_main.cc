// Copyright 2026 The kfuse Authors.
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

// kfuse: knowledge-fusion preprocessing front-end.
//
//   kfuse ingest  --raw dump.jsonl --allowlist domains.txt --out kg.jsonl
//   kfuse inject  --input in.jsonl --kg kg.jsonl --output out.jsonl [knobs]
//   kfuse attend  --input out.jsonl [--index 0] [--seed 0]
//   kfuse stats   --baseline a.csv --treatment b.csv --direction higher|lower
//   kfuse score   --input predictions.csv

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kfuse/attention.h"
#include "kfuse/embedding.h"
#include "kfuse/injector.h"
#include "kfuse/kg_store.h"
#include "kfuse/pipeline.h"
#include "kfuse/stats.h"

namespace {

using namespace kfuse;

struct IngestArgs {
  std::string raw;
  std::string allowlist;
  std::string out;
};

int RunIngest(const IngestArgs &args) {
  IngestStats stats =
      IngestWikidata(args.raw, LoadAllowlist(args.allowlist), args.out);
  nlohmann::ordered_json obj;
  obj["kept"] = stats.kept;
  obj["dropped"] = stats.dropped;
  obj["total"] = stats.total();
  obj["drop_reasons"] = nlohmann::ordered_json::object();
  for (const auto &[reason, count] : stats.drop_reasons) {
    obj["drop_reasons"][reason] = count;
  }
  std::cout << obj.dump() << "\n";
  return 0;
}

struct InjectArgs {
  std::string input;
  std::string output;
  std::string manifest;
  std::string kg;
  std::optional<double> threshold;
  std::optional<size_t> max_length;
  size_t max_triplets = 3;
  size_t max_span = kDefaultMaxSpan;
  std::string ablate;
  bool gating = false;
  std::string provider = "hash";
  std::string endpoint;
  size_t dim = 64;
  std::string overrides;
  uint64_t seed = 0;
  size_t jobs = 1;
  int64_t timeout_ms = 30000;
};

InjectionConfig ConfigFor(InjectionConfig base, const InjectArgs &args) {
  if (args.threshold) base.threshold = *args.threshold;
  if (args.max_length) base.max_length = *args.max_length;
  base.max_triplets_per_entity = args.max_triplets;
  base.max_span = args.max_span;
  base.ablation = CategorySet::Parse(args.ablate);
  base.gating = args.gating;
  base.Validate();
  return base;
}

int RunInject(const InjectArgs &args) {
  PipelineContext context;
  context.single_config = ConfigFor(InjectionConfig::SingleTaskDefaults(), args);
  context.pair_config = ConfigFor(InjectionConfig::PairTaskDefaults(), args);
  if (context.pair_config.max_length < 2) {
    throw std::invalid_argument("--max-length must be >= 2 for sentence pairs");
  }

  ProviderConfig provider_config;
  provider_config.dim = args.dim;
  provider_config.timeout = std::chrono::milliseconds(args.timeout_ms);
  if (args.provider == "remote") {
    provider_config.kind = ProviderKind::kRemote;
    std::string endpoint = args.endpoint;
    if (endpoint.empty()) {
      if (const char *env = std::getenv("KFUSE_ENDPOINT")) endpoint = env;
    }
    if (!endpoint.empty()) provider_config.endpoint = endpoint;
  } else if (args.provider != "hash") {
    throw std::invalid_argument("--provider must be hash or remote");
  }
  std::unique_ptr<EmbeddingProvider> provider = MakeProvider(provider_config);

  KgStore store = LoadKg(args.kg);
  ManualOverrideTable overrides;
  if (!args.overrides.empty()) {
    overrides = ManualOverrideTable::Load(args.overrides);
    context.overrides = &overrides;
  }
  context.store = &store;
  context.provider = provider.get();

  std::ifstream in(args.input);
  if (!in) throw std::runtime_error("cannot open input '" + args.input + "'");
  std::ofstream out(args.output);
  if (!out) throw std::runtime_error("cannot write '" + args.output + "'");

  const size_t jobs = std::max<size_t>(1, args.jobs);
  const size_t chunk = 64 * jobs;
  RecordCounts totals;
  uint64_t line_number = 0;
  std::vector<InputRecord> batch;
  std::vector<ProcessedRecord> results;

  auto process_range = [&](size_t begin, size_t stride) {
    for (size_t i = begin; i < batch.size(); i += stride) {
      try {
        results[i] = ProcessRecord(context, batch[i]);
      } catch (const std::exception &e) {
        throw std::runtime_error("sentence " + batch[i].id + ": " + e.what());
      }
    }
  };
  auto flush = [&] {
    results.assign(batch.size(), {});
    if (jobs == 1) {
      process_range(0, 1);
    } else {
      std::vector<std::future<void>> workers;
      for (size_t w = 0; w < jobs; ++w) {
        workers.push_back(std::async(std::launch::async, process_range, w, jobs));
      }
      for (auto &w : workers) w.get();
    }
    for (const ProcessedRecord &r : results) {
      out << SerializeOutputRecord(r.output) << '\n';
      totals += r.counts;
    }
    batch.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    batch.push_back(ParseInputLine(line, line_number));
    if (batch.size() >= chunk) flush();
  }
  flush();
  if (!out) throw std::runtime_error("write failed for '" + args.output + "'");

  RunManifest manifest;
  manifest.single_config = context.single_config;
  manifest.pair_config = context.pair_config;
  manifest.kg_path = args.kg;
  manifest.input_path = args.input;
  manifest.output_path = args.output;
  manifest.provider = provider->Describe();
  manifest.seed = args.seed;
  manifest.counts = totals;
  std::string manifest_path =
      args.manifest.empty() ? args.output + ".manifest.json" : args.manifest;
  std::ofstream(manifest_path) << ManifestToJson(manifest) << '\n';

  std::cerr << "kfuse inject: " << totals.records << " records, "
            << totals.sentences << " sentences (" << totals.injected
            << " injected, " << totals.gated << " gated, " << totals.uninjected
            << " without knowledge), " << totals.truncated << " truncated\n";
  if (totals.override_misses > 0) {
    std::cerr << "kfuse inject: warning: " << totals.override_misses
              << " manual overrides matched no mention\n";
  }
  return 0;
}

struct AttendArgs {
  std::string input;
  size_t index = 0;
  uint64_t seed = 0;
  size_t dim = 32;
};

int RunAttend(const AttendArgs &args) {
  std::ifstream in(args.input);
  if (!in) throw std::runtime_error("cannot open '" + args.input + "'");
  std::string line;
  size_t seen = 0;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (seen++ == args.index) {
      found = true;
      break;
    }
  }
  if (!found) {
    throw std::runtime_error("record index " + std::to_string(args.index) +
                             " out of range (" + std::to_string(seen) +
                             " records)");
  }
  OutputRecord record = ParseOutputRecord(line);
  AttentionMap map =
      MaskedAttention(record.sequence, record.visible, args.dim, args.seed);
  char buf[64];
  for (size_t i = 0; i < map.n; ++i) {
    for (size_t j = 0; j < map.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", map(i, j));
      std::cout << (j == 0 ? "" : ",") << buf;
    }
    std::cout << '\n';
  }
  return 0;
}

struct StatsArgs {
  std::string baseline;
  std::string treatment;
  std::string direction = "higher";
  std::string metric;
  std::string label;
  bool csv = false;
};

int RunStats(const StatsArgs &args) {
  Direction direction;
  if (args.direction == "higher") {
    direction = Direction::kHigherBetter;
  } else if (args.direction == "lower") {
    direction = Direction::kLowerBetter;
  } else {
    throw std::invalid_argument("--direction must be higher or lower");
  }
  RunSeries baseline = LoadRunSeries(args.baseline, args.metric, direction);
  RunSeries treatment = LoadRunSeries(args.treatment, args.metric, direction);
  std::vector<ReportRow> rows;
  rows.push_back({baseline.label, Aggregate(baseline.values)});
  rows.push_back({treatment.label, Aggregate(treatment.values)});
  rows.push_back({args.label.empty() ? treatment.label + " vs baseline" : args.label,
                  TTestOneTailed(baseline, treatment)});
  std::cout << (args.csv ? RenderReportCsv(rows) : RenderReport(rows));
  return 0;
}

int RunScore(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("pred,gold", 0) != 0) {
    throw std::runtime_error(path + ": expected header 'pred,gold'");
  }
  std::vector<double> pred, gold;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream row(line);
    std::string p, g;
    if (!std::getline(row, p, ',') || !std::getline(row, g, ',')) {
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    }
    pred.push_back(std::stod(p));
    gold.push_back(std::stod(g));
  }
  // Spearman is shown x100, the usual reporting scale for STS-B.
  std::cout << "mse," << FormatFixed4(Mse(pred, gold)) << "\n"
            << "spearman_x100," << FormatFixed4(100.0 * Spearman(pred, gold))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"kfuse: knowledge-graph fusion preprocessing"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto *ingest_cmd = app.add_subcommand("ingest", "Filter a Wikidata-style dump into the compact KG format");
  ingest_cmd->add_option("--raw", ingest.raw, "Raw entity-per-line JSON dump")->required();
  ingest_cmd->add_option("--allowlist", ingest.allowlist, "Domain allowlist (one id per line)")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output compact KG (JSON Lines)")->required();

  InjectArgs inject;
  auto *inject_cmd = app.add_subcommand("inject", "Inject knowledge and emit model-ready records");
  inject_cmd->add_option("--input", inject.input, "JSONL of {id,text} or {id,text_a,text_b}")->required();
  inject_cmd->add_option("--output", inject.output, "Output JSONL")->required();
  inject_cmd->add_option("--kg", inject.kg, "Compact knowledge graph")->required();
  inject_cmd->add_option("--manifest", inject.manifest, "Run manifest path (default <output>.manifest.json)");
  inject_cmd->add_option("--threshold", inject.threshold, "Cosine threshold (default 0.6 single, 0.5 pair)");
  inject_cmd->add_option("--max-length", inject.max_length, "Max content tokens (default 128 single, 256 pair)");
  inject_cmd->add_option("--max-triplets", inject.max_triplets, "Triplets per entity")->capture_default_str();
  inject_cmd->add_option("--max-span", inject.max_span, "Longest mention in tokens")->capture_default_str();
  inject_cmd->add_option("--ablate", inject.ablate, "Exclude categories: comma list of alias,cat,desc");
  inject_cmd->add_flag("--gating", inject.gating, "Drop knowledge that would force truncation");
  inject_cmd->add_option("--provider", inject.provider, "Embedding provider: hash|remote")->capture_default_str();
  inject_cmd->add_option("--endpoint", inject.endpoint, "Remote embedding endpoint (or KFUSE_ENDPOINT)");
  inject_cmd->add_option("--dim", inject.dim, "Hash embedding dimension")->capture_default_str();
  inject_cmd->add_option("--timeout-ms", inject.timeout_ms, "Remote request timeout")->capture_default_str();
  inject_cmd->add_option("--overrides", inject.overrides, "Manual knowledge overrides (JSONL)");
  inject_cmd->add_option("--seed", inject.seed, "Run seed, recorded in the manifest")->capture_default_str();
  inject_cmd->add_option("--jobs", inject.jobs, "Worker threads")->capture_default_str();

  AttendArgs attend;
  auto *attend_cmd = app.add_subcommand("attend", "Masked attention map of one output record as CSV");
  attend_cmd->add_option("--input", attend.input, "Output JSONL from inject")->required();
  attend_cmd->add_option("--index", attend.index, "0-based record index")->capture_default_str();
  attend_cmd->add_option("--seed", attend.seed, "Projection seed")->capture_default_str();
  attend_cmd->add_option("--dim", attend.dim, "Model dimension")->capture_default_str();

  StatsArgs stats;
  auto *stats_cmd = app.add_subcommand("stats", "One-tailed pooled Student t-test between run files");
  stats_cmd->add_option("--baseline", stats.baseline, "Baseline runs CSV (run,metric,value)")->required();
  stats_cmd->add_option("--treatment", stats.treatment, "Treatment runs CSV")->required();
  stats_cmd->add_option("--direction", stats.direction, "higher|lower is better")->capture_default_str();
  stats_cmd->add_option("--metric", stats.metric, "Metric name to select");
  stats_cmd->add_option("--label", stats.label, "Row label for the t-test");
  stats_cmd->add_flag("--csv", stats.csv, "Emit CSV instead of a table");

  std::string score_input;
  auto *score_cmd = app.add_subcommand("score", "MSE and Spearman of a pred,gold CSV");
  score_cmd->add_option("--input", score_input, "CSV with header pred,gold")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) return RunIngest(ingest);
    if (*inject_cmd) return RunInject(inject);
    if (*attend_cmd) return RunAttend(attend);
    if (*stats_cmd) return RunStats(stats);
    if (*score_cmd) return RunScore(score_input);
  } catch (const std::exception &e) {
    std::cerr << "kfuse: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
