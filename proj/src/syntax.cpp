// Copyright 2026 The errscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "errscope/syntax.hpp"

#include <algorithm>
#include <cstdint>

namespace errscope {

namespace {

// Decodes the code point at `pos`, returning its byte length (1 for invalid
// sequences, which decode as U+FFFD).
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  int len = 0;
  char32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    cp = 0xFFFD;
    return 1;
  }
  for (int k = 1; k < len; ++k) {
    const int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      cp = 0xFFFD;
      return 1;
    }
    value = (value << 6) | static_cast<char32_t>(c);
  }
  cp = value;
  return static_cast<std::size_t>(len);
}

bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

void push_chunk(std::string_view text, std::size_t begin, std::size_t end,
                std::vector<TokenSpan>& out) {
  std::size_t lo = begin;
  std::size_t hi = end;
  std::vector<TokenSpan> trailing;
  while (lo < hi && is_detachable_punctuation(text[lo])) {
    out.push_back({std::string(1, text[lo]), lo, lo + 1});
    ++lo;
  }
  while (hi > lo && is_detachable_punctuation(text[hi - 1])) {
    trailing.push_back({std::string(1, text[hi - 1]), hi - 1, hi});
    --hi;
  }
  if (lo < hi) out.push_back({std::string(text.substr(lo, hi - lo)), lo, hi});
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

bool is_detachable_punctuation(char c) {
  return kDetachablePunctuation.find(c) != std::string_view::npos;
}

std::vector<TokenSpan> tokenize(std::string_view text) {
  std::vector<TokenSpan> tokens;
  std::size_t pos = 0;
  std::size_t chunk_start = std::string_view::npos;
  while (pos < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, pos, cp);
    if (is_unicode_space(cp)) {
      if (chunk_start != std::string_view::npos) {
        push_chunk(text, chunk_start, pos, tokens);
        chunk_start = std::string_view::npos;
      }
    } else if (chunk_start == std::string_view::npos) {
      chunk_start = pos;
    }
    pos += len;
  }
  if (chunk_start != std::string_view::npos) {
    push_chunk(text, chunk_start, text.size(), tokens);
  }
  return tokens;
}

bool is_punctuation_token(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), is_detachable_punctuation);
}

int word_count(std::string_view text) {
  const auto tokens = tokenize(text);
  return static_cast<int>(std::count_if(tokens.begin(), tokens.end(), [](const auto& t) {
    return !is_punctuation_token(t.text);
  }));
}

int effective_word_count(std::string_view text, const SyntaxRow* row) {
  if (row != nullptr && row->token_count_override) return *row->token_count_override;
  return word_count(text);
}

TagSet syntax_tags(std::string_view text, const SyntaxRow* row,
                   const Thresholds& thresholds) {
  TagSet tags;
  const int words = effective_word_count(text, row);
  if (words > thresholds.long_sentence_tokens) {
    tags.insert(SmartTag::kLongSentence);
  } else if (words < thresholds.short_sentence_tokens) {
    tags.insert(SmartTag::kShortSentence);
  }
  if (row != nullptr) {
    if (!row->has_subject) tags.insert(SmartTag::kMissingSubject);
    if (!row->has_verb) tags.insert(SmartTag::kMissingVerb);
    if (!row->has_object) tags.insert(SmartTag::kMissingObject);
  }
  return tags;
}

}  // namespace errscope
