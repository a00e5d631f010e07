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

#ifndef ERRSCOPE_QUERY_STRING_HPP_
#define ERRSCOPE_QUERY_STRING_HPP_

#include <map>
#include <string>
#include <string_view>

#include "errscope/config.hpp"
#include "errscope/query.hpp"

namespace errscope {

// Query parameters as decoded key/value pairs; keys may repeat.
using QueryParams = std::multimap<std::string, std::string>;

// Multi-valued facets use repeated keys (label, prediction, outcome,
// smart_tag, data_action). Scalars: confidence_min, confidence_max, text,
// pipeline, postprocessed. Defaults are omitted from the encoding.
std::string encode_filter(const FilterSpec& spec, const ProjectConfig& config);
std::string encode_sort_page(const SortSpec& sort, const PageSpec& page);

// Unknown keys are ignored. Throws UnknownClass, UnknownTagName,
// UnknownAction, BadRequest or InvalidRange.
FilterSpec parse_filter(const QueryParams& params, const ProjectConfig& config);
SortSpec parse_sort(const QueryParams& params);
PageSpec parse_page(const QueryParams& params, PageSpec defaults = {});

QueryParams parse_query_string(std::string_view query);
std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

}  // namespace errscope

#endif  // ERRSCOPE_QUERY_STRING_HPP_
