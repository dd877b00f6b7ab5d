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

#include <algorithm>
#include <stdexcept>

namespace kfuse {

std::vector<MentionSpan> FindMentions(const TokenSequence &tokens,
                                      const KgStore &store, size_t max_span) {
  if (max_span == 0) throw std::invalid_argument("max_span must be >= 1");
  std::vector<MentionSpan> mentions;
  const std::vector<std::string> &words = tokens.tokens;
  const size_t n = words.size();
  const size_t longest = std::min(max_span, store.max_surface_tokens());

  size_t start = 0;
  while (start < n) {
    if (IsPunctuationToken(words[start])) {
      ++start;
      continue;
    }
    size_t matched = 0;
    for (size_t len = std::min(longest, n - start); len >= 1; --len) {
      if (IsPunctuationToken(words[start + len - 1])) continue;
      const std::vector<std::string> *ids =
          store.FindKey(NormalizeTokens(words, start, start + len));
      if (ids == nullptr) continue;
      MentionSpan span;
      span.start = start;
      span.end = start + len;
      span.surface = Join(
          std::vector<std::string>(words.begin() + start,
                                   words.begin() + start + len),
          " ");
      span.candidate_ids = *ids;
      mentions.push_back(std::move(span));
      matched = len;
      break;
    }
    start += matched > 0 ? matched : 1;
  }
  return mentions;
}

}  // namespace kfuse
