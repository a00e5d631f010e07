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

#include "errscope/query_string.hpp"

#include <charconv>
#include <cstdio>

#include "errscope/error.hpp"

namespace errscope {

namespace {

void append(std::string& out, std::string_view key, std::string_view value) {
  if (!out.empty()) out += '&';
  out += key;
  out += '=';
  out += percent_encode(value);
}

// Shortest decimal that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kBadRequest, key + ": not a number: '" + value + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kBadRequest, key + ": not an integer: '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::kBadRequest, key + ": expected true or false, got '" + value + "'");
}

ClassIndex parse_class(const std::string& name, const ProjectConfig& config) {
  auto c = config.class_index(name);
  if (!c) throw Error(ErrorCode::kUnknownClass, "unknown class: " + name);
  return *c;
}

template <typename F>
void for_each(const QueryParams& params, const std::string& key, F&& f) {
  auto [lo, hi] = params.equal_range(key);
  for (auto it = lo; it != hi; ++it) f(it->second);
}

const std::string* last_value(const QueryParams& params, const std::string& key) {
  auto [lo, hi] = params.equal_range(key);
  if (lo == hi) return nullptr;
  return &std::prev(hi)->second;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    const bool unreserved = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                            (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' ||
                            c == '~';
    if (unreserved) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() &&
               hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

QueryParams parse_query_string(std::string_view query) {
  QueryParams out;
  if (!query.empty() && query.front() == '?') query.remove_prefix(1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    std::string_view pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
      out.emplace(percent_decode(pair), "");
    } else {
      out.emplace(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
    }
  }
  return out;
}

std::string encode_filter(const FilterSpec& spec, const ProjectConfig& config) {
  std::string out;
  for (ClassIndex c : spec.labels) append(out, "label", config.class_name(c));
  for (ClassIndex c : spec.predictions) append(out, "prediction", config.class_name(c));
  for (Outcome o : spec.outcomes) append(out, "outcome", outcome_name(o));
  for (auto name : spec.smart_tags.names()) append(out, "smart_tag", name);
  for (ActionValue a : spec.data_actions) append(out, "data_action", action_name(a));
  if (spec.confidence_min != 0.0) {
    append(out, "confidence_min", format_double(spec.confidence_min));
  }
  if (spec.confidence_max != 1.0) {
    append(out, "confidence_max", format_double(spec.confidence_max));
  }
  if (!spec.text_contains.empty()) append(out, "text", spec.text_contains);
  if (!spec.pipeline_id.empty()) append(out, "pipeline", spec.pipeline_id);
  if (!spec.postprocessed) append(out, "postprocessed", "false");
  return out;
}

std::string encode_sort_page(const SortSpec& sort, const PageSpec& page) {
  std::string out;
  append(out, "sort", sort_field_name(sort.field));
  append(out, "order", sort.direction == SortDirection::kAscending ? "asc" : "desc");
  append(out, "offset", std::to_string(page.offset));
  append(out, "limit", std::to_string(page.limit));
  return out;
}

FilterSpec parse_filter(const QueryParams& params, const ProjectConfig& config) {
  FilterSpec spec;
  for_each(params, "label", [&](const std::string& v) {
    spec.labels.insert(parse_class(v, config));
  });
  for_each(params, "prediction", [&](const std::string& v) {
    spec.predictions.insert(parse_class(v, config));
  });
  for_each(params, "outcome", [&](const std::string& v) {
    auto o = parse_outcome(v);
    if (!o) throw Error(ErrorCode::kBadRequest, "unknown outcome: " + v);
    spec.outcomes.insert(*o);
  });
  for_each(params, "smart_tag", [&](const std::string& v) {
    auto t = parse_tag(v);
    if (!t) throw Error(ErrorCode::kUnknownTagName, "unknown smart tag: " + v);
    spec.smart_tags.insert(*t);
  });
  for_each(params, "data_action", [&](const std::string& v) {
    auto a = parse_action(v);
    if (!a) throw Error(ErrorCode::kUnknownAction, "unknown action: " + v);
    spec.data_actions.insert(*a);
  });
  if (auto* v = last_value(params, "confidence_min")) {
    spec.confidence_min = parse_double("confidence_min", *v);
  }
  if (auto* v = last_value(params, "confidence_max")) {
    spec.confidence_max = parse_double("confidence_max", *v);
  }
  if (auto* v = last_value(params, "text")) spec.text_contains = *v;
  if (auto* v = last_value(params, "pipeline")) {
    if (!v->empty() && !config.has_pipeline(*v)) {
      throw Error(ErrorCode::kUnknownPipeline, "unknown pipeline: " + *v);
    }
    spec.pipeline_id = *v;
  }
  if (auto* v = last_value(params, "postprocessed")) {
    spec.postprocessed = parse_bool("postprocessed", *v);
  }
  validate(spec);
  return spec;
}

SortSpec parse_sort(const QueryParams& params) {
  SortSpec sort;
  if (auto* v = last_value(params, "sort")) {
    auto f = parse_sort_field(*v);
    if (!f) throw Error(ErrorCode::kBadRequest, "unknown sort field: " + *v);
    sort.field = *f;
  }
  if (auto* v = last_value(params, "order")) {
    if (*v == "asc") {
      sort.direction = SortDirection::kAscending;
    } else if (*v == "desc") {
      sort.direction = SortDirection::kDescending;
    } else {
      throw Error(ErrorCode::kBadRequest, "order must be asc or desc, got '" + *v + "'");
    }
  }
  return sort;
}

PageSpec parse_page(const QueryParams& params, PageSpec page) {
  if (auto* v = last_value(params, "offset")) page.offset = parse_int("offset", *v);
  if (auto* v = last_value(params, "limit")) page.limit = parse_int("limit", *v);
  if (page.offset < 0) throw Error(ErrorCode::kInvalidRange, "offset must be >= 0");
  return page;
}

}  // namespace errscope
