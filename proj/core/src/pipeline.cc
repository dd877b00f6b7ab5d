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

#include "kfuse/pipeline.h"

#include <openssl/evp.h>

#include "json.hpp"
#include "kfuse/text.h"

namespace kfuse {

using nlohmann::json;
using nlohmann::ordered_json;

std::string Base64Encode(std::span<const uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  if (bytes.empty()) return out;
  int written = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()),
                                bytes.data(), int(bytes.size()));
  out.resize(size_t(written));
  return out;
}

std::vector<uint8_t> Base64Decode(const std::string &text) {
  if (text.empty()) return {};
  if (text.size() % 4 != 0) throw PipelineError("base64 length is not a multiple of 4");
  std::vector<uint8_t> out(3 * text.size() / 4);
  int written = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char *>(text.data()),
                                int(text.size()));
  if (written < 0) throw PipelineError("malformed base64 payload");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  size_t padding = 0;
  for (size_t i = text.size(); i > 0 && text[i - 1] == '='; --i) ++padding;
  out.resize(size_t(written) - padding);
  return out;
}

InputRecord ParseInputLine(const std::string &line, uint64_t line_number) {
  auto fail = [&](const std::string &what) {
    return PipelineError("input line " + std::to_string(line_number) + ": " + what);
  };
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception &e) {
    throw fail(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw fail("expected a JSON object");
  auto id = obj.find("id");
  if (id == obj.end() || !(id->is_string() || id->is_number())) {
    throw fail("missing string or numeric 'id'");
  }
  InputRecord record;
  record.id_json = id->dump();
  record.id = id->is_string() ? id->get<std::string>() : record.id_json;

  auto text_of = [&](const char *key) -> std::optional<std::string> {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) throw fail(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
  };
  if (auto text = text_of("text")) {
    record.text = *text;
    return record;
  }
  auto a = text_of("text_a");
  auto b = text_of("text_b");
  if (!a || !b) throw fail("expected 'text' or both 'text_a' and 'text_b'");
  record.is_pair = true;
  record.text_a = *a;
  record.text_b = *b;
  return record;
}

std::string SerializeOutputRecord(const OutputRecord &record) {
  const FlattenedSequence &seq = record.sequence;
  ordered_json obj;
  obj["id"] = json::parse(record.id_json);
  obj["tokens"] = seq.tokens;
  obj["soft_positions"] = seq.soft_positions;
  obj["is_branch"] = std::vector<bool>(seq.is_branch);
  obj["segment_ids"] = record.segment_ids;
  obj["packed_visible"] = Base64Encode(record.visible.bytes());
  obj["n"] = seq.size();
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

OutputRecord ParseOutputRecord(const std::string &line) {
  OutputRecord record;
  try {
    json obj = json::parse(line);
    record.id_json = obj.at("id").dump();
    const size_t n = obj.at("n").get<size_t>();
    FlattenedSequence &seq = record.sequence;
    seq.tokens = obj.at("tokens").get<std::vector<std::string>>();
    seq.soft_positions = obj.at("soft_positions").get<std::vector<int64_t>>();
    seq.is_branch = obj.at("is_branch").get<std::vector<bool>>();
    record.segment_ids = obj.at("segment_ids").get<std::vector<int>>();
    if (seq.tokens.size() != n || seq.soft_positions.size() != n ||
        seq.is_branch.size() != n || record.segment_ids.size() != n) {
      throw PipelineError("field lengths disagree with n=" + std::to_string(n));
    }
    record.visible = PackedVisibleMatrix::FromBytes(
        n, Base64Decode(obj.at("packed_visible").get<std::string>()));
  } catch (const json::exception &e) {
    throw PipelineError(std::string("malformed output record: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw PipelineError(std::string("malformed output record: ") + e.what());
  }
  return record;
}

RecordCounts &RecordCounts::operator+=(const RecordCounts &other) {
  records += other.records;
  sentences += other.sentences;
  injected += other.injected;
  gated += other.gated;
  uninjected += other.uninjected;
  truncated += other.truncated;
  override_misses += other.override_misses;
  return *this;
}

namespace {

void CountSentence(const InjectionResult &r, RecordCounts &counts) {
  ++counts.sentences;
  if (r.injected()) {
    ++counts.injected;
  } else if (r.gated) {
    ++counts.gated;
  } else {
    ++counts.uninjected;
  }
  counts.override_misses += r.override_misses;
}

}  // namespace

ProcessedRecord ProcessRecord(const PipelineContext &context,
                              const InputRecord &input) {
  if (context.store == nullptr || context.provider == nullptr) {
    throw PipelineError("pipeline context needs a store and a provider");
  }
  const KgStore &store = *context.store;
  const EmbeddingProvider &provider = *context.provider;
  ProcessedRecord out;
  out.output.id_json = input.id_json;
  out.counts.records = 1;

  if (!input.is_pair) {
    const InjectionConfig &config = context.single_config;
    InjectionResult r = InjectSentence(Tokenize(input.text), store, provider,
                                       config, context.overrides, input.id);
    CountSentence(r, out.counts);
    FlattenedSequence flat = Flatten(r.tree);
    if (flat.size() > config.max_length) ++out.counts.truncated;
    out.output.sequence = TruncateSingle(flat, config.max_length);
    out.output.segment_ids.assign(out.output.sequence.size(), 0);
    out.output.visible = BuildVisibleMatrix(out.output.sequence);
    return out;
  }

  const InjectionConfig &config = context.pair_config;
  InjectionConfig ungated = config;
  ungated.gating = false;
  InjectionResult ra = InjectSentence(Tokenize(input.text_a), store, provider,
                                      ungated, context.overrides, input.id);
  InjectionResult rb = InjectSentence(Tokenize(input.text_b), store, provider,
                                      ungated, context.overrides, input.id);
  if (config.gating && (ra.injected() || rb.injected()) &&
      FlattenedLength(ra.tree) + FlattenedLength(rb.tree) > config.max_length) {
    for (InjectionResult *r : {&ra, &rb}) {
      if (!r->injected()) continue;
      r->tree = r->tree.Bare();
      r->gated = true;
    }
  }
  CountSentence(ra, out.counts);
  CountSentence(rb, out.counts);

  FlattenedSequence fa = Flatten(ra.tree);
  FlattenedSequence fb = Flatten(rb.tree);
  if (fa.size() + fb.size() > config.max_length) ++out.counts.truncated;
  auto [ka, kb] = TruncatePair(fa, fb, config.max_length);
  out.output.sequence = Concatenate(ka, kb);
  out.output.segment_ids.assign(ka.size(), 0);
  out.output.segment_ids.resize(ka.size() + kb.size(), 1);
  out.output.visible = BuildVisibleMatrix(out.output.sequence);
  return out;
}

namespace {

ordered_json ConfigJson(const InjectionConfig &config) {
  ordered_json obj;
  obj["threshold"] = config.threshold;
  obj["max_triplets_per_entity"] = config.max_triplets_per_entity;
  std::vector<std::string> ablation;
  for (Category c : {Category::kAlias, Category::kCat, Category::kDesc}) {
    if (config.ablation.Contains(c)) ablation.push_back(CategoryName(c));
  }
  obj["ablation"] = ablation;
  obj["gating"] = config.gating;
  obj["max_length"] = config.max_length;
  obj["max_span"] = config.max_span;
  return obj;
}

}  // namespace

std::string ManifestToJson(const RunManifest &manifest) {
  ordered_json obj;
  obj["config"]["single"] = ConfigJson(manifest.single_config);
  obj["config"]["pair"] = ConfigJson(manifest.pair_config);
  obj["kg_path"] = manifest.kg_path;
  obj["input_path"] = manifest.input_path;
  obj["output_path"] = manifest.output_path;
  obj["provider"] = manifest.provider;
  obj["seed"] = manifest.seed;
  const RecordCounts &c = manifest.counts;
  obj["counts"]["records"] = c.records;
  obj["counts"]["sentences"] = c.sentences;
  obj["counts"]["injected"] = c.injected;
  obj["counts"]["gated"] = c.gated;
  obj["counts"]["uninjected"] = c.uninjected;
  obj["counts"]["truncated"] = c.truncated;
  obj["counts"]["override_misses"] = c.override_misses;
  return obj.dump(2);
}

}  // namespace kfuse
