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

#ifndef KFUSE_TEXT_H_
#define KFUSE_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kfuse {

// Word-level tokenization of a sentence. Tokens are split on ASCII
// whitespace and every ASCII punctuation character becomes a token of its
// own. Bytes outside the ASCII range are treated as word characters so UTF-8
// text passes through untouched.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_text;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

TokenSequence Tokenize(std::string_view text);

// True if the token consists of a single ASCII punctuation character.
bool IsPunctuationToken(std::string_view token);

// Canonical key used for gazetteer matching: tokenize, lowercase, drop
// punctuation tokens at either end and join with single spaces. Equivalent
// to lowercasing, collapsing whitespace and stripping surrounding
// punctuation, with punctuation inside the string kept as separate tokens.
std::string Normalize(std::string_view text);

// Normalized key of a token window [begin, end).
std::string NormalizeTokens(const std::vector<std::string> &tokens,
                            size_t begin, size_t end);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// 64-bit FNV-1a over the raw bytes.
uint64_t Fnv1a64(std::string_view bytes);

}  // namespace kfuse

#endif  // KFUSE_TEXT_H_
