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

#include "kfuse/entity_matcher.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <random>

#include "test_util.h"

namespace kfuse {
namespace {

KgStore UnitedStore() {
  return KgStore::FromRecords({
      {"Q1", "Manchester United", {}, "", {}, {}},
      {"Q2", "United", {}, "", {}, {}},
  });
}

TEST(FindMentions, LongestMatchWins) {
  auto mentions = FindMentions(Tokenize("Manchester United won"), UnitedStore());
  ASSERT_EQ(mentions.size(), 1u);
  EXPECT_EQ(mentions[0].start, 0u);
  EXPECT_EQ(mentions[0].end, 2u);
  EXPECT_EQ(mentions[0].surface, "Manchester United");
  EXPECT_EQ(mentions[0].candidate_ids, std::vector<std::string>{"Q1"});
}

TEST(FindMentions, ShortSurface) {
  auto mentions = FindMentions(Tokenize("united we stand"), UnitedStore());
  ASSERT_EQ(mentions.size(), 1u);
  EXPECT_EQ(mentions[0].start, 0u);
  EXPECT_EQ(mentions[0].end, 1u);
  EXPECT_EQ(mentions[0].candidate_ids, std::vector<std::string>{"Q2"});
}

TEST(FindMentions, NoMatches) {
  EXPECT_TRUE(FindMentions(Tokenize("nothing to see here"), UnitedStore()).empty());
  EXPECT_TRUE(FindMentions(Tokenize(""), UnitedStore()).empty());
}

TEST(FindMentions, MaxSpanLimitsWindow) {
  auto mentions = FindMentions(Tokenize("Manchester United"), UnitedStore(), 1);
  ASSERT_EQ(mentions.size(), 1u);
  EXPECT_EQ(mentions[0].surface, "United");
  EXPECT_THROW(FindMentions(Tokenize("x"), UnitedStore(), 0), std::invalid_argument);
}

TEST(FindMentions, InternalPunctuationMatchesButEdgesDoNot) {
  KgStore store = testing::FixtureStore();
  auto mentions = FindMentions(Tokenize("The U.S. economy grew."), store);
  ASSERT_EQ(mentions.size(), 1u);
  EXPECT_EQ(mentions[0].surface, "U . S");
  EXPECT_EQ(mentions[0].start, 1u);
  EXPECT_EQ(mentions[0].end, 4u);
}

TEST(FindMentions, HomonymsCarryAllCandidates) {
  auto mentions = FindMentions(Tokenize("Apple unveils iPod."), testing::FixtureStore());
  ASSERT_EQ(mentions.size(), 2u);
  EXPECT_EQ(mentions[0].candidate_ids, (std::vector<std::string>{"Q3", "Q4"}));
  EXPECT_EQ(mentions[1].candidate_ids, std::vector<std::string>{"Q5"});
}

// Properties over random sentences drawn from fixture surfaces and filler.
TEST(FindMentions, Properties) {
  KgStore store = testing::FixtureStore();
  const std::vector<std::string> vocab = {
      "Manchester", "United", "Man", "Utd", "Apple", "Inc", ".", "iPod", "the",
      "won", "U", "S", "States", "Red", "Devils", "airlines", ",", "apple"};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    size_t len = rng() % 12;
    for (size_t i = 0; i < len; ++i) text += vocab[rng() % vocab.size()] + " ";
    TokenSequence seq = Tokenize(text);
    auto mentions = FindMentions(seq, store);

    size_t prev_end = 0;
    for (const MentionSpan &m : mentions) {
      ASSERT_LT(m.start, m.end);
      ASSERT_LE(m.end, seq.size());
      ASSERT_GE(m.start, prev_end);  // sorted, non-overlapping
      prev_end = m.end;
      auto hits = store.LookupSurface(m.surface);
      ASSERT_EQ(hits.size(), m.candidate_ids.size());
      for (size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i]->id, m.candidate_ids[i]);
      // Greedy: no longer window starting here is indexed.
      for (size_t end = m.end + 1; end <= std::min(seq.size(), m.start + kDefaultMaxSpan); ++end) {
        if (IsPunctuationToken(seq.tokens[end - 1])) continue;
        EXPECT_EQ(store.FindKey(NormalizeTokens(seq.tokens, m.start, end)), nullptr);
      }
    }

    std::string upper = text;
    for (char &c : upper) c = char(std::toupper(static_cast<unsigned char>(c)));
    auto shouted = FindMentions(Tokenize(upper), store);
    ASSERT_EQ(shouted.size(), mentions.size());
    for (size_t i = 0; i < mentions.size(); ++i) {
      EXPECT_EQ(shouted[i].start, mentions[i].start);
      EXPECT_EQ(shouted[i].end, mentions[i].end);
      EXPECT_EQ(shouted[i].candidate_ids, mentions[i].candidate_ids);
    }
  }
}

}  // namespace
}  // namespace kfuse
