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

#ifndef KFUSE_PIPELINE_H_
#define KFUSE_PIPELINE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfuse/embedding.h"
#include "kfuse/injector.h"
#include "kfuse/kg_store.h"
#include "kfuse/sentence_tree.h"
#include "kfuse/visible_matrix.h"

namespace kfuse {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One input line: {id, text} or {id, text_a, text_b}.
struct InputRecord {
  std::string id_json;  // the id exactly as serialized on output
  std::string id;       // string form used for override lookup
  bool is_pair = false;
  std::string text;     // single
  std::string text_a;   // pair
  std::string text_b;
};

InputRecord ParseInputLine(const std::string &line, uint64_t line_number);

// Model-ready record. Special tokens are not emitted; consumers reserve
// their own [CLS]/[SEP] slots.
struct OutputRecord {
  std::string id_json;
  FlattenedSequence sequence;
  std::vector<int> segment_ids;
  PackedVisibleMatrix visible;
};

// {"id","tokens","soft_positions","is_branch","segment_ids",
//  "packed_visible","n"} in that key order, packed_visible in base64.
std::string SerializeOutputRecord(const OutputRecord &record);

// Inverse of SerializeOutputRecord for the fields it carries (group and
// branch indices are not part of the wire format and come back empty).
OutputRecord ParseOutputRecord(const std::string &line);

std::string Base64Encode(std::span<const uint8_t> bytes);
// Throws PipelineError on malformed input.
std::vector<uint8_t> Base64Decode(const std::string &text);

// Per-sentence outcome counts. A pair contributes two sentences.
struct RecordCounts {
  uint64_t records = 0;
  uint64_t sentences = 0;
  uint64_t injected = 0;
  uint64_t gated = 0;
  uint64_t uninjected = 0;
  uint64_t truncated = 0;
  uint64_t override_misses = 0;

  RecordCounts &operator+=(const RecordCounts &other);
  bool Consistent() const {
    return injected + gated + uninjected == sentences;
  }
};

struct PipelineContext {
  const KgStore *store = nullptr;
  const EmbeddingProvider *provider = nullptr;
  InjectionConfig single_config = InjectionConfig::SingleTaskDefaults();
  InjectionConfig pair_config = InjectionConfig::PairTaskDefaults();
  const ManualOverrideTable *overrides = nullptr;
};

struct ProcessedRecord {
  OutputRecord output;
  RecordCounts counts;
};

// Runs injection, gating, truncation and visible-matrix construction for
// one record. Singles are gated and truncated against max_length. Pairs are
// gated jointly (both halves keep their knowledge only if the combined
// injected length fits) and truncated with PairBudget.
ProcessedRecord ProcessRecord(const PipelineContext &context,
                              const InputRecord &input);

struct RunManifest {
  InjectionConfig single_config;
  InjectionConfig pair_config;
  std::string kg_path;
  std::string input_path;
  std::string output_path;
  std::string provider;
  uint64_t seed = 0;
  RecordCounts counts;
};

std::string ManifestToJson(const RunManifest &manifest);

}  // namespace kfuse

#endif  // KFUSE_PIPELINE_H_
