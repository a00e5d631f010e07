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

#ifndef ERRSCOPE_SYNTAX_HPP_
#define ERRSCOPE_SYNTAX_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errscope/config.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

struct TokenSpan {
  std::string text;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Characters detached from the edges of whitespace-delimited chunks.
inline constexpr std::string_view kDetachablePunctuation = ".,!?;:'\"()";

bool is_detachable_punctuation(char c);

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// off each chunk as one-character tokens. Invalid UTF-8 bytes are treated as
// non-whitespace.
std::vector<TokenSpan> tokenize(std::string_view text);

// True for tokens made only of detachable punctuation.
bool is_punctuation_token(std::string_view token);

// Tokens that are not punctuation.
int word_count(std::string_view text);

// Word count, or the syntax row override when one is present.
int effective_word_count(std::string_view text, const SyntaxRow* row);

TagSet syntax_tags(std::string_view text, const SyntaxRow* row,
                   const Thresholds& thresholds);

}  // namespace errscope

#endif  // ERRSCOPE_SYNTAX_HPP_
