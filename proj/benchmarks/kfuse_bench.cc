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

#include <benchmark/benchmark.h>

#include <random>

#include "kfuse/attention.h"
#include "kfuse/embedding.h"
#include "kfuse/injector.h"
#include "kfuse/kg_store.h"
#include "kfuse/sentence_tree.h"
#include "kfuse/stats.h"
#include "kfuse/text.h"
#include "kfuse/visible_matrix.h"

namespace kfuse {
namespace {

DenseMatrix RandomSymmetric(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  DenseMatrix m(n);
  for (size_t i = 0; i < n; ++i) {
    m(i, i) = 1;
    for (size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = uint8_t(rng() & 1);
  }
  return m;
}

// Main tokens in groups of two; every third group carries two branches.
SentenceTree WideTree(size_t groups) {
  SentenceTree tree;
  for (size_t g = 0; g < groups; ++g) {
    TokenGroup group;
    group.tokens = {"w" + std::to_string(g), "x"};
    if (g % 3 == 0) {
      group.mention_entity = "Q" + std::to_string(g);
      group.branches.push_back({"alias", {"a", "b"}});
      group.branches.push_back({"instance of", {"c"}});
    }
    tree.groups.push_back(std::move(group));
  }
  return tree;
}

void BM_Pack(benchmark::State &state) {
  DenseMatrix m = RandomSymmetric(size_t(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Pack(m));
}
BENCHMARK(BM_Pack)->Arg(128)->Arg(256)->Arg(512);

void BM_Unpack(benchmark::State &state) {
  PackedVisibleMatrix p = Pack(RandomSymmetric(size_t(state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(Unpack(p));
}
BENCHMARK(BM_Unpack)->Arg(128)->Arg(256)->Arg(512);

void BM_FlattenAndVisible(benchmark::State &state) {
  SentenceTree tree = WideTree(size_t(state.range(0)));
  for (auto _ : state) {
    FlattenedSequence seq = Flatten(tree);
    benchmark::DoNotOptimize(BuildVisibleMatrix(seq));
  }
}
BENCHMARK(BM_FlattenAndVisible)->Arg(16)->Arg(48);

void BM_MaskedAttention(benchmark::State &state) {
  FlattenedSequence seq = Flatten(WideTree(size_t(state.range(0))));
  PackedVisibleMatrix visible = BuildVisibleMatrix(seq);
  for (auto _ : state) benchmark::DoNotOptimize(MaskedAttention(seq, visible, 64, 7));
}
BENCHMARK(BM_MaskedAttention)->Arg(16)->Arg(48);

void BM_InjectSentence(benchmark::State &state) {
  KgStore store = KgStore::FromRecords({
      {"Q1", "Manchester United", {"Man Utd", "Red Devils"}, "English football club", {"Q100"}, {}},
      {"Q100", "football club", {}, "", {}, {}},
      {"Q3", "Apple Inc.", {"Apple"}, "technology company", {}, {}},
      {"Q4", "apple", {}, "fruit", {}, {}},
  });
  HashEmbedder provider(64);
  InjectionConfig config;
  config.threshold = 0.0;
  TokenSequence tokens =
      Tokenize("Manchester United fans bought Apple shares while the Red Devils trained");
  for (auto _ : state) {
    benchmark::DoNotOptimize(InjectSentence(tokens, store, provider, config));
  }
}
BENCHMARK(BM_InjectSentence);

void BM_TCdf(benchmark::State &state) {
  double t = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(TCdf(t, 18));
    t = t > 3.0 ? -3.0 : t + 0.01;
  }
}
BENCHMARK(BM_TCdf);

}  // namespace
}  // namespace kfuse

BENCHMARK_MAIN();
