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

#ifndef KFUSE_SENTENCE_TREE_H_
#define KFUSE_SENTENCE_TREE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfuse/visible_matrix.h"

namespace kfuse {

// One (relation, object) pair attached after its head group.
struct KnowledgeBranch {
  std::string relation;
  std::vector<std::string> object_tokens;

  bool operator==(const KnowledgeBranch &other) const = default;
};

// A run of contiguous sentence tokens injected as one unit. Branches are
// only attached to groups that carry a mention entity.
struct TokenGroup {
  std::vector<std::string> tokens;
  std::optional<std::string> mention_entity;
  std::vector<KnowledgeBranch> branches;

  bool operator==(const TokenGroup &other) const = default;
};

struct SentenceTree {
  std::vector<TokenGroup> groups;

  // Number of original sentence tokens.
  size_t MainTokenCount() const;
  size_t BranchCount() const;
  // Same tree with every branch removed.
  SentenceTree Bare() const;

  bool operator==(const SentenceTree &other) const = default;
};

// Tree unrolled into a flat token stream.
//
// Emission order is, per group: the group tokens, then each branch as its
// tokenized relation followed by its object tokens. Main tokens take
// consecutive soft positions. A branch starts at (last position of its head
// group) + 1 and counts up; every branch of a group restarts there, and the
// next main token reuses that same position.
//
// branch_of is -1 for main tokens and a sequence-unique branch index
// otherwise; visibility is a function of (is_branch, group_of, branch_of).
struct FlattenedSequence {
  std::vector<std::string> tokens;
  std::vector<int64_t> soft_positions;
  std::vector<bool> is_branch;
  std::vector<int64_t> group_of;
  std::vector<int64_t> branch_of;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  // First n tokens.
  FlattenedSequence Prefix(size_t n) const;

  bool operator==(const FlattenedSequence &other) const = default;
};

FlattenedSequence Flatten(const SentenceTree &tree);

// Length of Flatten(tree) without materializing it.
size_t FlattenedLength(const SentenceTree &tree);

// Visibility over the flattened order:
//   main <-> main                    visible
//   branch <-> token of head group   visible
//   tokens of the same branch        visible
//   branch <-> other branch          invisible (even on the same group)
//   branch <-> main outside head     invisible
// The diagonal is always visible.
PackedVisibleMatrix BuildVisibleMatrix(const FlattenedSequence &seq);
PackedVisibleMatrix BuildVisibleMatrix(const SentenceTree &tree);

// Kept lengths for a sentence pair under max_length. Each half gets
// floor(max_length / 2); slots one side does not need go to the other, and
// the spare slot of an odd max_length goes to the first sentence when both
// need it.
std::pair<size_t, size_t> PairBudget(size_t len_a, size_t len_b,
                                     size_t max_length);

// Tail truncation. Since branch tokens are emitted after their head group,
// dropping a head-group token also drops its branches, and the visible
// matrix of the result is the leading block of the original.
FlattenedSequence TruncateSingle(const FlattenedSequence &seq,
                                 size_t max_length);

// Throws std::invalid_argument if max_length < 2.
std::pair<FlattenedSequence, FlattenedSequence> TruncatePair(
    const FlattenedSequence &a, const FlattenedSequence &b, size_t max_length);

// Joins a pair into one sequence. Main tokens of b continue the soft
// position counter after a; group and branch indices are offset so the
// halves stay distinct. Main tokens of both halves see each other.
FlattenedSequence Concatenate(const FlattenedSequence &a,
                              const FlattenedSequence &b);

}  // namespace kfuse

#endif  // KFUSE_SENTENCE_TREE_H_
