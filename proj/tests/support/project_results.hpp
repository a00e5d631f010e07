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

#ifndef ERRSCOPE_TESTS_SUPPORT_PROJECT_RESULTS_HPP_
#define ERRSCOPE_TESTS_SUPPORT_PROJECT_RESULTS_HPP_

#include "errscope/project.hpp"
#include "errscope/serialization.hpp"
#include "json.hpp"

namespace errscope::testing {

using nlohmann::json;

// Every cached module of a full project, serialized, for comparisons.
inline json all_results(Project& p) {
  json out;
  out["warnings"] = *p.warnings();
  for (const std::string split : {"train", "eval"}) {
    for (const auto& id : p.pipelines_for(split)) {
      const std::string k = split + "/" + id;
      out[k]["predictions"] = *p.predictions(split, id);
      out[k]["metrics_raw"] = *p.split_metrics(split, id, false);
      out[k]["metrics_post"] = *p.split_metrics(split, id, true);
      out[k]["tags"] = *p.tags(split, id);
      if (auto e = p.epistemic(split, id)) out[k]["epistemic"] = *e;
      if (auto b = p.behavioral(split, id)) out[k]["behavioral"] = *b;
      if (auto inv = p.invariance(split, id)) out[k]["invariance"] = *inv;
    }
    for (const std::string target : {"train", "eval"}) {
      out[split]["vs_" + target] = *p.neighbors(split, target);
    }
  }
  return out;
}

}  // namespace errscope::testing

#endif  // ERRSCOPE_TESTS_SUPPORT_PROJECT_RESULTS_HPP_
