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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "test_util.h"

namespace kfuse {
namespace {

using testing::FixtureStore;

// Returns preset 2-d unit vectors: the sentence maps to (1, 0) and each
// registered text to (s, sqrt(1 - s^2)), so cosine equals s.
class PresetProvider final : public EmbeddingProvider {
 public:
  void Set(const std::string &text, double similarity) { sims_[text] = similarity; }

  std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) const override {
    std::vector<EmbeddingVector> out;
    for (const std::string &t : texts) {
      auto it = sims_.find(t);
      double s = it == sims_.end() ? 1.0 : it->second;
      out.push_back({{s, std::sqrt(std::max(0.0, 1.0 - s * s))}});
    }
    return out;
  }
  std::string Describe() const override { return "preset"; }

 private:
  std::map<std::string, double> sims_;
};

class FailingProvider final : public EmbeddingProvider {
 public:
  std::vector<EmbeddingVector> Embed(std::span<const std::string>) const override {
    throw EmbeddingError("service down");
  }
  std::string Describe() const override { return "failing"; }
};

TEST(KQuery, ManchesterUnitedIsAFootballClub) {
  KgStore store = FixtureStore();
  TokenSequence tokens = Tokenize("Manchester United signed a striker");
  auto result = KQuery(tokens, store, FindMentions(tokens, store), {});
  ASSERT_EQ(result.size(), 1u);
  ASSERT_EQ(result[0].candidates.size(), 1u);
  const EntityCandidate &c = result[0].candidates[0];
  EXPECT_EQ(c.entity_id, "Q1");
  bool found = false;
  for (const Triplet &t : c.triplets) {
    found |= t.relation == "instance of" && t.object_text == "football club";
  }
  EXPECT_TRUE(found);
}

TEST(KQuery, FullAblationKeepsCandidatesWithoutTriplets) {
  KgStore store = FixtureStore();
  TokenSequence tokens = Tokenize("Apple and Manchester United");
  auto result = KQuery(tokens, store, FindMentions(tokens, store), CategorySet::All());
  ASSERT_EQ(result.size(), 2u);
  EXPECT_EQ(result[0].candidates.size(), 2u);
  for (const auto &m : result) {
    for (const auto &c : m.candidates) EXPECT_TRUE(c.triplets.empty());
  }
}

TEST(KQuery, NoMentions) {
  KgStore store = FixtureStore();
  TokenSequence tokens = Tokenize("nothing here");
  EXPECT_TRUE(KQuery(tokens, store, FindMentions(tokens, store), {}).empty());
}

TEST(BuildCandidateSequence, Rules) {
  KgStore store = FixtureStore();
  EXPECT_EQ(BuildCandidateSequence(store, {"X1", "Apple Inc.", {}, "technology company", {}, {}}),
            "Apple Inc.; technology company");
  EXPECT_EQ(BuildCandidateSequence(store, {"X2", "Lonely", {}, "", {}, {}}), "Lonely");
  // Q1 by hand: label; aliases in order; instance of Q100 -> its label;
  // description.
  EXPECT_EQ(BuildCandidateSequence(store, *store.Find("Q1")),
            "Manchester United; Man Utd; Red Devils; football club; English football club");
}

TEST(SelectEntity, ThresholdIsStrict) {
  PresetProvider provider;
  provider.Set("A", 0.7);
  std::vector<CandidateInput> one = {{"Q1", "A"}};
  auto chosen = SelectEntity(one, "sentence", provider, 0.5);
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->entity_id, "Q1");
  EXPECT_NEAR(chosen->similarity, 0.7, 1e-12);

  provider.Set("A", 0.4);
  EXPECT_FALSE(SelectEntity(one, "sentence", provider, 0.5));

  std::vector<CandidateScore> at_threshold = {{"Q1", "A", 0.5}};
  EXPECT_FALSE(SelectBest(at_threshold, 0.5));
  EXPECT_FALSE(SelectEntity({}, "sentence", provider, 0.5));
}

TEST(SelectEntity, PicksTheMostSimilar) {
  PresetProvider provider;
  provider.Set("A", 0.55);
  provider.Set("B", 0.72);
  std::vector<CandidateInput> inputs = {{"Q1", "A"}, {"Q2", "B"}};
  // Brute force over the scored list.
  std::vector<double> sims = {0.55, 0.72};
  size_t best = std::max_element(sims.begin(), sims.end()) - sims.begin();
  auto chosen = SelectEntity(inputs, "sentence", provider, 0.5);
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->entity_id, inputs[best].entity_id);
}

TEST(SelectBest, TiesGoToSmallerId) {
  std::vector<CandidateScore> scored = {{"Q9", "x", 0.8}, {"Q10", "y", 0.8}, {"Q5", "z", 0.1}};
  auto chosen = SelectBest(scored, 0.5);
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->entity_id, "Q10");  // lexicographic id order
}

TEST(SelectBest, RoundingNoiseCountsAsTie) {
  std::vector<CandidateScore> scored = {{"Q2", "x", 0.3 + 1e-15}, {"Q1", "y", 0.3}};
  EXPECT_EQ(SelectBest(scored, 0.0)->entity_id, "Q1");
  scored[0].similarity = 0.3 + 1e-9;
  EXPECT_EQ(SelectBest(scored, 0.0)->entity_id, "Q2");
}

TEST(SelectEntity, ProviderErrorsPropagate) {
  FailingProvider provider;
  std::vector<CandidateInput> inputs = {{"Q1", "A"}};
  EXPECT_THROW(SelectEntity(inputs, "s", provider, 0.0), EmbeddingError);
}

TEST(InjectionConfig, DefaultsAndValidation) {
  EXPECT_EQ(InjectionConfig::PairTaskDefaults().threshold, 0.5);
  EXPECT_EQ(InjectionConfig::PairTaskDefaults().max_length, 256u);
  EXPECT_EQ(InjectionConfig::SingleTaskDefaults().threshold, 0.6);
  EXPECT_EQ(InjectionConfig::SingleTaskDefaults().max_length, 128u);
  EXPECT_EQ(InjectionConfig().max_triplets_per_entity, 3u);
  InjectionConfig bad;
  bad.threshold = 1.5;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = InjectionConfig();
  bad.max_triplets_per_entity = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

InjectionConfig Permissive() {
  InjectionConfig config;
  config.threshold = -1.0;
  return config;
}

TEST(InjectSentence, NoMentionsGivesSingletonGroups) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  auto r = InjectSentence(Tokenize("stocks fell sharply"), store, provider, Permissive());
  ASSERT_EQ(r.tree.groups.size(), 3u);
  for (const auto &g : r.tree.groups) {
    EXPECT_EQ(g.tokens.size(), 1u);
    EXPECT_TRUE(g.branches.empty());
    EXPECT_FALSE(g.mention_entity);
  }
  EXPECT_FALSE(r.injected());
}

TEST(InjectSentence, InjectsSelectedEntityAfterItsGroup) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  auto r = InjectSentence(Tokenize("Manchester United won"), store, provider, Permissive());
  ASSERT_EQ(r.tree.groups.size(), 2u);
  const TokenGroup &g = r.tree.groups[0];
  EXPECT_EQ(g.tokens, (std::vector<std::string>{"Manchester", "United"}));
  EXPECT_EQ(g.mention_entity, "Q1");
  ASSERT_EQ(g.branches.size(), 3u);  // capped at max_triplets_per_entity
  EXPECT_EQ(g.branches[0].relation, "alias");
  EXPECT_EQ(g.branches[0].object_tokens, (std::vector<std::string>{"Man", "Utd"}));
  EXPECT_EQ(g.branches[2].relation, "instance of");
  EXPECT_EQ(g.branches[2].object_tokens, (std::vector<std::string>{"football", "club"}));
}

TEST(InjectSentence, CapAndAblation) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  InjectionConfig config = Permissive();
  config.max_triplets_per_entity = 1;
  config.ablation = {Category::kAlias};
  auto r = InjectSentence(Tokenize("Manchester United"), store, provider, config);
  ASSERT_EQ(r.tree.groups[0].branches.size(), 1u);
  EXPECT_EQ(r.tree.groups[0].branches[0].relation, "instance of");
}

TEST(InjectSentence, ThresholdOneInjectsNothing) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  InjectionConfig config;
  config.threshold = 1.0;
  auto r = InjectSentence(Tokenize("Manchester United"), store, provider, config);
  EXPECT_FALSE(r.injected());
}

TEST(InjectSentence, GatingDropsKnowledgeThatWouldForceTruncation) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  InjectionConfig config = Permissive();
  config.gating = true;
  TokenSequence tokens = Tokenize("Manchester United beat Apple");
  config.max_length = tokens.size();
  auto r = InjectSentence(tokens, store, provider, config);
  EXPECT_FALSE(r.injected());
  EXPECT_TRUE(r.gated);
  EXPECT_EQ(Flatten(r.tree).tokens, tokens.tokens);

  config.max_length = 1000;
  r = InjectSentence(tokens, store, provider, config);
  EXPECT_TRUE(r.injected());
  EXPECT_FALSE(r.gated);
}

TEST(InjectSentence, OverridesBypassScoringAndHonourAblation) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  ManualOverrideTable overrides;
  overrides.Add("s1", "manchester UNITED",
                {{"Q1", "description", "football club", Category::kDesc},
                 {"Q1", "alias", "Man Utd", Category::kAlias}});
  overrides.Add("s1", "Apple", {});  // suppress
  overrides.Add("s1", "Nowhere", {{"", "alias", "x", Category::kAlias}});
  InjectionConfig config;
  config.threshold = 1.0;  // scoring alone would inject nothing
  config.ablation = {Category::kAlias};
  auto r = InjectSentence(Tokenize("Manchester United and Apple"), store, provider,
                          config, &overrides, "s1");
  ASSERT_EQ(r.tree.groups.size(), 3u);
  ASSERT_EQ(r.tree.groups[0].branches.size(), 1u);
  EXPECT_EQ(r.tree.groups[0].branches[0].relation, "description");
  EXPECT_EQ(r.tree.groups[2].tokens, std::vector<std::string>{"Apple"});
  EXPECT_TRUE(r.tree.groups[2].branches.empty());
  EXPECT_EQ(r.override_misses, 1u);

  // Other sentence ids are unaffected.
  auto other = InjectSentence(Tokenize("Manchester United"), store, provider,
                              config, &overrides, "s2");
  EXPECT_FALSE(other.injected());
  EXPECT_EQ(other.override_misses, 0u);
}

TEST(InjectSentence, ProviderFailurePropagates) {
  KgStore store = FixtureStore();
  FailingProvider provider;
  EXPECT_THROW(InjectSentence(Tokenize("Apple"), store, provider, Permissive()),
               EmbeddingError);
}

TEST(InjectSentence, DeterministicAndAblationSound) {
  KgStore store = FixtureStore();
  HashEmbedder provider;
  const char *sentences[] = {"Apple unveils iPod.", "Man Utd fly United to the U.S.",
                             "Red Devils and apple pie"};
  for (CategorySet ablation : {CategorySet{}, CategorySet{Category::kCat},
                               CategorySet{Category::kAlias, Category::kDesc}}) {
    InjectionConfig config = Permissive();
    config.ablation = ablation;
    for (const char *s : sentences) {
      auto a = InjectSentence(Tokenize(s), store, provider, config);
      auto b = InjectSentence(Tokenize(s), store, provider, config);
      EXPECT_EQ(a.tree, b.tree);
      for (const auto &g : a.tree.groups) {
        for (const auto &br : g.branches) {
          EXPECT_FALSE(ablation.Contains(CategoryOfRelation(br.relation)));
        }
      }
    }
  }
}

TEST(ManualOverrideTable, LoadAndErrors) {
  testing::TempDir dir;
  auto good = dir.Write("o.jsonl",
      R"({"sentence_id":"7","surface":"Apple","triplets":[{"relation":"instance of","object_text":"company"}]})" "\n"
      R"({"sentence_id":8,"surface":"iPod","triplets":[]})" "\n");
  ManualOverrideTable table = ManualOverrideTable::Load(good);
  EXPECT_EQ(table.size(), 2u);
  ASSERT_NE(table.Find("7", "APPLE"), nullptr);
  EXPECT_EQ(table.Find("7", "apple")->at(0).category, Category::kCat);
  ASSERT_NE(table.Find("8", "ipod"), nullptr);
  EXPECT_TRUE(table.Find("8", "ipod")->empty());

  auto dup = dir.Write("d.jsonl",
      R"({"sentence_id":"1","surface":"A","triplets":[]})" "\n"
      R"({"sentence_id":"1","surface":"a","triplets":[]})" "\n");
  EXPECT_THROW(ManualOverrideTable::Load(dup), std::runtime_error);
  auto bad = dir.Write("b.jsonl",
      R"({"sentence_id":"1","surface":"A","triplets":[{"relation":"spouse","object_text":"x"}]})" "\n");
  EXPECT_THROW(ManualOverrideTable::Load(bad), std::runtime_error);
}

}  // namespace
}  // namespace kfuse
