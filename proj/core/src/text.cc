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

#include "kfuse/text.h"

namespace kfuse {
namespace {

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsAsciiPunct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) ||
         (c >= 0x5b && c <= 0x60) || (c >= 0x7b && c <= 0x7e);
}

char AsciiLower(char c) {
  return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c;
}

}  // namespace

TokenSequence Tokenize(std::string_view text) {
  TokenSequence seq;
  seq.source_text = std::string(text);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) seq.tokens.push_back(std::move(word));
    word.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (IsAsciiSpace(c)) {
      flush();
    } else if (IsAsciiPunct(c)) {
      flush();
      seq.tokens.emplace_back(1, ch);
    } else {
      word.push_back(ch);
    }
  }
  flush();
  return seq;
}

bool IsPunctuationToken(std::string_view token) {
  return token.size() == 1 && IsAsciiPunct(static_cast<unsigned char>(token[0]));
}

std::string NormalizeTokens(const std::vector<std::string> &tokens,
                            size_t begin, size_t end) {
  while (begin < end && IsPunctuationToken(tokens[begin])) ++begin;
  while (end > begin && IsPunctuationToken(tokens[end - 1])) --end;
  std::string key;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) key.push_back(' ');
    for (char c : tokens[i]) key.push_back(AsciiLower(c));
  }
  return key;
}

std::string Normalize(std::string_view text) {
  TokenSequence seq = Tokenize(text);
  return NormalizeTokens(seq.tokens, 0, seq.tokens.size());
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace kfuse
