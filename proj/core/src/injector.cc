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

#include "kfuse/injector.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace kfuse {

InjectionConfig InjectionConfig::PairTaskDefaults() {
  InjectionConfig config;
  config.threshold = 0.5;
  config.max_length = 256;
  return config;
}

InjectionConfig InjectionConfig::SingleTaskDefaults() {
  InjectionConfig config;
  config.threshold = 0.6;
  config.max_length = 128;
  return config;
}

void InjectionConfig::Validate() const {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [-1, 1], got " +
                                std::to_string(threshold));
  }
  if (max_triplets_per_entity < 1) {
    throw std::invalid_argument("max_triplets_per_entity must be >= 1");
  }
  if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
  if (max_span < 1) throw std::invalid_argument("max_span must be >= 1");
}

std::vector<MentionCandidates> KQuery(const TokenSequence &tokens,
                                      const KgStore &store,
                                      const std::vector<MentionSpan> &mentions,
                                      CategorySet ablation) {
  std::vector<MentionCandidates> out;
  out.reserve(mentions.size());
  for (const MentionSpan &mention : mentions) {
    if (mention.end > tokens.size()) {
      throw std::invalid_argument("mention outside the token sequence");
    }
    MentionCandidates entry;
    entry.mention = mention;
    for (const std::string &id : mention.candidate_ids) {
      entry.candidates.push_back({id, store.TripletsOf(id, ablation)});
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string BuildCandidateSequence(const KgStore &store,
                                   const EntityRecord &record) {
  std::vector<std::string> parts{record.label};
  for (const Triplet &t : store.TripletsOfRecord(record)) {
    parts.push_back(t.object_text);
  }
  return Join(parts, "; ");
}

std::optional<CandidateScore> SelectBest(std::span<const CandidateScore> scored,
                                         double threshold) {
  if (scored.empty()) return std::nullopt;
  double top = scored.front().similarity;
  for (const CandidateScore &c : scored) top = std::max(top, c.similarity);
  const CandidateScore *best = nullptr;
  for (const CandidateScore &c : scored) {
    if (c.similarity < top - kTieTolerance) continue;
    if (best == nullptr || c.entity_id < best->entity_id) best = &c;
  }
  if (!(best->similarity > threshold)) return std::nullopt;
  return *best;
}

std::optional<CandidateScore> SelectEntity(
    std::span<const CandidateInput> candidates, const std::string &sentence_text,
    const EmbeddingProvider &provider, double threshold) {
  if (candidates.empty()) return std::nullopt;
  std::vector<std::string> texts;
  texts.reserve(candidates.size() + 1);
  texts.push_back(sentence_text);
  for (const CandidateInput &c : candidates) texts.push_back(c.sequence);

  std::vector<EmbeddingVector> embeddings;
  try {
    embeddings = provider.Embed(texts);
  } catch (const std::exception &e) {
    throw EmbeddingError("embedding texts 0.." + std::to_string(texts.size() - 1) +
                         " (0 = sentence) failed: " + e.what());
  }
  if (embeddings.size() != texts.size()) {
    throw EmbeddingError(provider.Describe() + " returned " +
                         std::to_string(embeddings.size()) + " vectors for " +
                         std::to_string(texts.size()) + " texts");
  }

  std::vector<CandidateScore> scored;
  scored.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    scored.push_back({candidates[i].entity_id, candidates[i].sequence,
                      Cosine(embeddings[0], embeddings[i + 1])});
  }
  return SelectBest(scored, threshold);
}

void ManualOverrideTable::Add(const std::string &sentence_id,
                              std::string_view surface,
                              std::vector<Triplet> triplets) {
  auto key = std::make_pair(sentence_id, Normalize(surface));
  if (!entries_.emplace(key, std::move(triplets)).second) {
    throw std::invalid_argument("duplicate override for sentence '" +
                                sentence_id + "', surface '" + key.second + "'");
  }
}

const std::vector<Triplet> *ManualOverrideTable::Find(
    const std::string &sentence_id, std::string_view surface) const {
  auto it = entries_.find({sentence_id, Normalize(surface)});
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> ManualOverrideTable::SurfacesFor(
    const std::string &sentence_id) const {
  std::vector<std::string> out;
  for (auto it = entries_.lower_bound({sentence_id, std::string()});
       it != entries_.end() && it->first.first == sentence_id; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

ManualOverrideTable ManualOverrideTable::Load(const std::string &path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open overrides '" + path + "'");
  ManualOverrideTable table;
  std::string line;
  uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    auto where = path + ":" + std::to_string(line_number) + ": ";
    try {
      json obj = json::parse(line);
      const json &sid = obj.at("sentence_id");
      std::string sentence_id =
          sid.is_string() ? sid.get<std::string>() : sid.dump();
      std::string surface = obj.at("surface").get<std::string>();
      std::vector<Triplet> triplets;
      for (const json &t : obj.at("triplets")) {
        Triplet triplet;
        triplet.subject = surface;
        triplet.relation = t.at("relation").get<std::string>();
        triplet.object_text = t.at("object_text").get<std::string>();
        triplet.category = CategoryOfRelation(triplet.relation);
        if (triplet.object_text.empty()) {
          throw std::invalid_argument("empty object_text");
        }
        triplets.push_back(std::move(triplet));
      }
      table.Add(sentence_id, surface, std::move(triplets));
    } catch (const std::exception &e) {
      throw std::runtime_error(where + e.what());
    }
  }
  return table;
}

namespace {

void AppendBranches(const std::vector<Triplet> &triplets, CategorySet ablation,
                    size_t cap, TokenGroup &group) {
  for (const Triplet &t : triplets) {
    if (group.branches.size() >= cap) break;
    if (ablation.Contains(t.category)) continue;
    std::vector<std::string> object = Tokenize(t.object_text).tokens;
    if (object.empty()) continue;
    group.branches.push_back({t.relation, std::move(object)});
  }
}

}  // namespace

InjectionResult InjectSentence(const TokenSequence &tokens,
                               const KgStore &store,
                               const EmbeddingProvider &provider,
                               const InjectionConfig &config,
                               const ManualOverrideTable *overrides,
                               const std::string &sentence_id) {
  InjectionResult result;
  std::vector<MentionSpan> mentions =
      FindMentions(tokens, store, config.max_span);
  std::vector<MentionCandidates> queried =
      KQuery(tokens, store, mentions, config.ablation);

  std::set<std::string> unmatched_overrides;
  if (overrides != nullptr) {
    for (std::string &s : overrides->SurfacesFor(sentence_id)) {
      unmatched_overrides.insert(std::move(s));
    }
  }

  SentenceTree &tree = result.tree;
  size_t cursor = 0;
  auto add_singletons = [&](size_t until) {
    for (; cursor < until; ++cursor) {
      tree.groups.push_back({{tokens.tokens[cursor]}, std::nullopt, {}});
    }
  };

  for (const MentionCandidates &entry : queried) {
    const MentionSpan &mention = entry.mention;
    add_singletons(mention.start);
    TokenGroup group;
    group.tokens.assign(tokens.tokens.begin() + mention.start,
                        tokens.tokens.begin() + mention.end);
    cursor = mention.end;

    const std::vector<Triplet> *manual =
        overrides != nullptr ? overrides->Find(sentence_id, mention.surface)
                             : nullptr;
    if (manual != nullptr) {
      unmatched_overrides.erase(Normalize(mention.surface));
      group.mention_entity = mention.candidate_ids.front();
      AppendBranches(*manual, config.ablation, config.max_triplets_per_entity,
                     group);
    } else {
      bool any_knowledge = std::any_of(
          entry.candidates.begin(), entry.candidates.end(),
          [](const EntityCandidate &c) { return !c.triplets.empty(); });
      if (any_knowledge) {
        std::vector<CandidateInput> inputs;
        for (const EntityCandidate &c : entry.candidates) {
          inputs.push_back(
              {c.entity_id, BuildCandidateSequence(store, *store.Find(c.entity_id))});
        }
        std::optional<CandidateScore> chosen = SelectEntity(
            inputs, tokens.source_text, provider, config.threshold);
        if (chosen) {
          group.mention_entity = chosen->entity_id;
          for (const EntityCandidate &c : entry.candidates) {
            if (c.entity_id != chosen->entity_id) continue;
            AppendBranches(c.triplets, config.ablation,
                           config.max_triplets_per_entity, group);
          }
        }
      }
    }
    tree.groups.push_back(std::move(group));
  }
  add_singletons(tokens.size());

  result.override_misses = unmatched_overrides.size();
  if (config.gating && tree.BranchCount() > 0 &&
      FlattenedLength(tree) > config.max_length) {
    tree = tree.Bare();
    result.gated = true;
  }
  return result;
}

}  // namespace kfuse
