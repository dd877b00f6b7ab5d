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

#ifndef KFUSE_INJECTOR_H_
#define KFUSE_INJECTOR_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfuse/embedding.h"
#include "kfuse/entity_matcher.h"
#include "kfuse/kg_store.h"
#include "kfuse/sentence_tree.h"
#include "kfuse/text.h"

namespace kfuse {

struct InjectionConfig {
  // Cosine cutoff; a candidate is injected only if its similarity is
  // strictly greater.
  double threshold = 0.5;
  size_t max_triplets_per_entity = 3;
  CategorySet ablation;
  // Drop all knowledge for a sentence whose injected form would not fit in
  // max_length.
  bool gating = false;
  size_t max_length = 256;
  size_t max_span = kDefaultMaxSpan;

  // Sentence-pair tasks: threshold 0.5, max_length 256.
  static InjectionConfig PairTaskDefaults();
  // Single-text tasks: threshold 0.6, max_length 128.
  static InjectionConfig SingleTaskDefaults();

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
};

struct EntityCandidate {
  std::string entity_id;
  std::vector<Triplet> triplets;
};

struct MentionCandidates {
  MentionSpan mention;
  std::vector<EntityCandidate> candidates;
};

// Pairs every candidate entity of every mention with its ablation-filtered
// triplets. Candidates left with no triplets stay in the list.
std::vector<MentionCandidates> KQuery(const TokenSequence &tokens,
                                      const KgStore &store,
                                      const std::vector<MentionSpan> &mentions,
                                      CategorySet ablation);

// Text scored against the sentence: the label followed by the object text
// of every triplet in TripletsOf order, joined with "; ".
std::string BuildCandidateSequence(const KgStore &store,
                                   const EntityRecord &record);

struct CandidateInput {
  std::string entity_id;
  std::string sequence;
};

struct CandidateScore {
  std::string entity_id;
  std::string candidate_sequence;
  double similarity = 0.0;

  bool operator==(const CandidateScore &other) const = default;
};

// Similarities closer than this are treated as tied, so the choice does not
// depend on floating-point summation order.
inline constexpr double kTieTolerance = 1e-12;

// Highest-similarity candidate if its similarity is strictly above the
// threshold. Ties go to the smaller entity id.
std::optional<CandidateScore> SelectBest(std::span<const CandidateScore> scored,
                                         double threshold);

// Embeds the sentence and every candidate sequence in one provider call,
// scores by cosine and applies SelectBest. Provider failures are rethrown
// as EmbeddingError.
std::optional<CandidateScore> SelectEntity(
    std::span<const CandidateInput> candidates, const std::string &sentence_text,
    const EmbeddingProvider &provider, double threshold);

// Hand-curated knowledge keyed by (sentence id, normalized mention
// surface). An empty triplet list suppresses injection for that mention.
class ManualOverrideTable {
 public:
  // Throws std::invalid_argument on a duplicate key.
  void Add(const std::string &sentence_id, std::string_view surface,
           std::vector<Triplet> triplets);

  const std::vector<Triplet> *Find(const std::string &sentence_id,
                                   std::string_view surface) const;

  // Normalized surfaces registered for a sentence.
  std::vector<std::string> SurfacesFor(const std::string &sentence_id) const;

  size_t size() const { return entries_.size(); }

  // JSON Lines of {sentence_id, surface, triplets: [{relation, object_text}]}.
  static ManualOverrideTable Load(const std::string &path);

 private:
  std::map<std::pair<std::string, std::string>, std::vector<Triplet>> entries_;
};

struct InjectionResult {
  SentenceTree tree;
  // Knowledge was selected but removed by gating.
  bool gated = false;
  // Overrides for this sentence whose surface matched no mention.
  size_t override_misses = 0;

  bool injected() const { return tree.BranchCount() > 0; }
};

// find_mentions -> (manual override | k_query + select_entity) -> cap at
// max_triplets_per_entity -> gating -> sentence tree. Overrides skip
// scoring and the threshold but still honour ablation.
InjectionResult InjectSentence(const TokenSequence &tokens,
                               const KgStore &store,
                               const EmbeddingProvider &provider,
                               const InjectionConfig &config,
                               const ManualOverrideTable *overrides = nullptr,
                               const std::string &sentence_id = {});

}  // namespace kfuse

#endif  // KFUSE_INJECTOR_H_
