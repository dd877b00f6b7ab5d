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

#include "kfuse/sentence_tree.h"

#include <algorithm>
#include <stdexcept>

#include "kfuse/text.h"

namespace kfuse {

size_t SentenceTree::MainTokenCount() const {
  size_t count = 0;
  for (const TokenGroup &g : groups) count += g.tokens.size();
  return count;
}

size_t SentenceTree::BranchCount() const {
  size_t count = 0;
  for (const TokenGroup &g : groups) count += g.branches.size();
  return count;
}

SentenceTree SentenceTree::Bare() const {
  SentenceTree bare = *this;
  for (TokenGroup &g : bare.groups) g.branches.clear();
  return bare;
}

FlattenedSequence FlattenedSequence::Prefix(size_t n) const {
  n = std::min(n, size());
  FlattenedSequence out;
  out.tokens.assign(tokens.begin(), tokens.begin() + n);
  out.soft_positions.assign(soft_positions.begin(), soft_positions.begin() + n);
  out.is_branch.assign(is_branch.begin(), is_branch.begin() + n);
  out.group_of.assign(group_of.begin(), group_of.begin() + n);
  out.branch_of.assign(branch_of.begin(), branch_of.begin() + n);
  return out;
}

FlattenedSequence Flatten(const SentenceTree &tree) {
  FlattenedSequence seq;
  auto emit = [&seq](const std::string &token, int64_t position, bool branch,
                     int64_t group, int64_t branch_id) {
    seq.tokens.push_back(token);
    seq.soft_positions.push_back(position);
    seq.is_branch.push_back(branch);
    seq.group_of.push_back(group);
    seq.branch_of.push_back(branch_id);
  };

  // Next main position. Branches never advance it: the token after a group
  // reuses (last head position) + 1, overlapping the branch positions.
  int64_t next_main = 0;
  int64_t next_branch_id = 0;
  for (size_t g = 0; g < tree.groups.size(); ++g) {
    const TokenGroup &group = tree.groups[g];
    for (const std::string &token : group.tokens) {
      emit(token, next_main++, false, int64_t(g), -1);
    }
    for (const KnowledgeBranch &branch : group.branches) {
      int64_t position = next_main;
      int64_t id = next_branch_id++;
      for (const std::string &token : Tokenize(branch.relation).tokens) {
        emit(token, position++, true, int64_t(g), id);
      }
      for (const std::string &token : branch.object_tokens) {
        emit(token, position++, true, int64_t(g), id);
      }
    }
  }
  return seq;
}

size_t FlattenedLength(const SentenceTree &tree) {
  size_t n = 0;
  for (const TokenGroup &group : tree.groups) {
    n += group.tokens.size();
    for (const KnowledgeBranch &branch : group.branches) {
      n += Tokenize(branch.relation).size() + branch.object_tokens.size();
    }
  }
  return n;
}

PackedVisibleMatrix BuildVisibleMatrix(const FlattenedSequence &seq) {
  const size_t n = seq.size();
  PackedVisibleMatrix visible(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      bool vis;
      if (!seq.is_branch[i] && !seq.is_branch[j]) {
        vis = true;
      } else if (seq.is_branch[i] && seq.is_branch[j]) {
        vis = seq.branch_of[i] == seq.branch_of[j];
      } else {
        vis = seq.group_of[i] == seq.group_of[j];
      }
      if (vis) visible.Set(i, j, true);
    }
  }
  return visible;
}

PackedVisibleMatrix BuildVisibleMatrix(const SentenceTree &tree) {
  return BuildVisibleMatrix(Flatten(tree));
}

std::pair<size_t, size_t> PairBudget(size_t len_a, size_t len_b,
                                     size_t max_length) {
  const size_t half = max_length / 2;
  size_t keep_a = std::min(len_a, half);
  size_t keep_b = std::min(len_b, half);
  size_t leftover = max_length - keep_a - keep_b;
  size_t extra_a = std::min(leftover, len_a - keep_a);
  keep_a += extra_a;
  leftover -= extra_a;
  keep_b += std::min(leftover, len_b - keep_b);
  return {keep_a, keep_b};
}

FlattenedSequence TruncateSingle(const FlattenedSequence &seq,
                                 size_t max_length) {
  return seq.Prefix(max_length);
}

std::pair<FlattenedSequence, FlattenedSequence> TruncatePair(
    const FlattenedSequence &a, const FlattenedSequence &b, size_t max_length) {
  if (max_length < 2) {
    throw std::invalid_argument("truncate_pair: max_length must be >= 2");
  }
  auto [keep_a, keep_b] = PairBudget(a.size(), b.size(), max_length);
  return {a.Prefix(keep_a), b.Prefix(keep_b)};
}

FlattenedSequence Concatenate(const FlattenedSequence &a,
                              const FlattenedSequence &b) {
  int64_t position_shift = 0;
  int64_t group_shift = 0;
  int64_t branch_shift = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a.is_branch[i]) {
      position_shift = std::max(position_shift, a.soft_positions[i] + 1);
    }
    group_shift = std::max(group_shift, a.group_of[i] + 1);
    branch_shift = std::max(branch_shift, a.branch_of[i] + 1);
  }
  FlattenedSequence out = a;
  for (size_t i = 0; i < b.size(); ++i) {
    out.tokens.push_back(b.tokens[i]);
    out.soft_positions.push_back(b.soft_positions[i] + position_shift);
    out.is_branch.push_back(b.is_branch[i]);
    out.group_of.push_back(b.group_of[i] + group_shift);
    out.branch_of.push_back(b.branch_of[i] < 0 ? -1
                                               : b.branch_of[i] + branch_shift);
  }
  return out;
}

}  // namespace kfuse
