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

#ifndef KFUSE_ENTITY_MATCHER_H_
#define KFUSE_ENTITY_MATCHER_H_

#include <string>
#include <vector>

#include "kfuse/kg_store.h"
#include "kfuse/text.h"

namespace kfuse {

inline constexpr size_t kDefaultMaxSpan = 6;

// A matched entity mention over the token window [start, end).
struct MentionSpan {
  size_t start = 0;
  size_t end = 0;
  std::string surface;
  std::vector<std::string> candidate_ids;

  size_t length() const { return end - start; }
  bool operator==(const MentionSpan &other) const = default;
};

// Greedy left-to-right longest match against the store's surface index. At
// each position the longest window of at most max_span tokens whose
// normalized form is indexed becomes a mention, and matching resumes after
// it. Windows never start or end on a punctuation token. Throws
// std::invalid_argument if max_span is zero.
std::vector<MentionSpan> FindMentions(const TokenSequence &tokens,
                                      const KgStore &store,
                                      size_t max_span = kDefaultMaxSpan);

}  // namespace kfuse

#endif  // KFUSE_ENTITY_MATCHER_H_
