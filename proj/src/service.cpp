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

#include "errscope/service.hpp"

#include <charconv>
#include <thread>

#include "errscope/hash.hpp"
#include "errscope/query_string.hpp"
#include "errscope/serialization.hpp"
#include "httplib.h"

namespace errscope {

using nlohmann::json;

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField:
    case ErrorCode::kInvalidThreshold:
    case ErrorCode::kUnknownSplitName:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kBadRequest:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kEmptyVector:
      return 400;
    case ErrorCode::kUnknownSplit:
    case ErrorCode::kUnknownUtterance:
    case ErrorCode::kUnknownPipeline:
    case ErrorCode::kMissingEmbeddings:
    case ErrorCode::kMissingSaliency:
    case ErrorCode::kMissingPredictions:
      return 404;
    case ErrorCode::kUnknownAction:
    case ErrorCode::kUnknownTagName:
    case ErrorCode::kUnknownClass:
      return 422;
    case ErrorCode::kProviderUnavailable:
      return 502;
    case ErrorCode::kIoError:
    case ErrorCode::kRowCountMismatch:
    case ErrorCode::kMalformedRow:
    case ErrorCode::kTooFewSamples:
    case ErrorCode::kZeroVector:
    case ErrorCode::kMissingPerturbedPrediction:
    case ErrorCode::kComputationFailed:
    case ErrorCode::kBindFailure:
      return 500;
  }
  return 500;
}

ApiError api_error_for(const Error& error) {
  ApiError out;
  out.code = std::string(error_code_name(error.code()));
  out.message = error.what();
  out.status = http_status_for(error.code());
  if (error.code() == ErrorCode::kComputationFailed) {
    // A failed analysis is never the caller's fault.
    out.status = std::max(500, http_status_for(error.root_code()));
  }
  return out;
}

json api_error_json(const ApiError& e) {
  return {{"status", e.status}, {"code", e.code}, {"message", e.message}};
}

namespace {

json prediction_json(const PostprocessedPrediction& p, Outcome outcome,
                     const ProjectConfig& config) {
  json ranked = json::array();
  for (ClassIndex c : p.ranked_classes) ranked.push_back(config.class_name(c));
  return {{"prediction", config.class_name(p.top_class)},
          {"top_confidence", p.top_confidence},
          {"outcome", outcome_name(outcome)},
          {"ranked_classes", ranked}};
}

std::int64_t parse_id(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kBadRequest, "utterance id must be an integer: " + s);
  }
  return v;
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

struct Service::Impl {
  explicit Impl(Project& p) : project(p) { routes(); }

  Project& project;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  template <typename F>
  httplib::Server::Handler handle(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        const ApiError err = api_error_for(e);
        res.status = err.status;
        res.set_content(dump(api_error_json(err)), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(dump(api_error_json({500, "InternalError", e.what()})),
                        "application/json");
      }
    };
  }

  template <typename F>
  httplib::Server::Handler json_handler(F f) {
    return handle([f](const httplib::Request& req, httplib::Response& res) {
      res.status = 200;
      res.set_content(dump(f(req)), "application/json");
    });
  }

  const Split& split_of(const httplib::Request& req) const {
    return project.split(req.matches[1].str());
  }

  FilterSpec filter_of(const httplib::Request& req) const {
    return parse_filter(req.params, project.config());
  }

  void routes() {
    server.Get("/admin/status", json_handler([this](const httplib::Request&) {
      json tasks = json::array();
      for (const auto& t : project.progress().snapshot()) {
        tasks.push_back({{"name", t.name},
                         {"status", task_status_name(t.status)},
                         {"error", t.error.empty() ? json(nullptr) : json(t.error)}});
      }
      json counts = json::object();
      for (const auto& [status, n] : project.progress().counts()) {
        counts[std::string(task_status_name(status))] = n;
      }
      const bool ready = !tasks.empty() && project.progress().finished();
      return json{{"ready", ready},
                  {"counts", counts},
                  {"tasks", tasks},
                  {"computations", project.scheduler().computations()}};
    }));

    server.Get("/config", json_handler([this](const httplib::Request&) {
      json j = config_to_json(project.config());
      j["config_hash"] = hex64(project.config().hash);
      j["fingerprint"] = hex64(project.state().fingerprint);
      return j;
    }));

    server.Get("/dashboard/warnings", json_handler([this](const httplib::Request&) {
      return json{{"warnings", warnings_to_api(*project.warnings(), project.config())}};
    }));

    server.Get(R"(/dataset_splits/([^/]+)/utterances)",
               json_handler([this](const httplib::Request& req) {
                 const ProjectConfig& config = project.config();
                 const Split& split = split_of(req);
                 const FilterSpec spec = filter_of(req);
                 const SortSpec sort = parse_sort(req.params);
                 const PageSpec page = parse_page(req.params);
                 const FilterResult result = project.query(split.name, spec, sort, page);
                 auto preds = project.predictions(split.name, spec.pipeline_id);
                 auto tags = project.tags(split.name, spec.pipeline_id);
                 const auto& stage = preds->stage(spec.postprocessed);
                 json rows = json::array();
                 for (std::int64_t id : result.ids) {
                   const auto i = static_cast<std::size_t>(id);
                   const Utterance& u = split.at(id);
                   rows.push_back({{"id", id},
                                   {"text", u.text},
                                   {"label", config.class_name(u.label)},
                                   {"prediction",
                                    config.class_name(stage.predictions[i].top_class)},
                                   {"top_confidence", stage.predictions[i].top_confidence},
                                   {"outcome", outcome_name(stage.outcomes[i])},
                                   {"smart_tags", tags_to_api((*tags)[i])},
                                   {"proposed_action",
                                    action_name(project.actions().get(split.name, id))}});
                 }
                 return json{{"split", split.name},
                             {"pipeline", preds->pipeline_id},
                             {"total_count", result.total_count},
                             {"offset", page.offset},
                             {"limit", page.limit},
                             {"utterances", rows}};
               }));

    server.Get(R"(/dataset_splits/([^/]+)/utterances/([^/]+))",
               json_handler([this](const httplib::Request& req) { return detail(req); }));

    server.Patch(
        R"(/dataset_splits/([^/]+)/utterances/([^/]+)/proposed_action)",
        json_handler([this](const httplib::Request& req) {
          const Split& split = split_of(req);
          const std::int64_t id = parse_id(req.matches[2].str());
          json body = json::parse(req.body, nullptr, false);
          if (body.is_discarded() || !body.is_object() || !body.contains("proposed_action") ||
              !body["proposed_action"].is_string()) {
            throw Error(ErrorCode::kBadRequest,
                        "body must be a JSON object with a string 'proposed_action'");
          }
          const auto value = body["proposed_action"].get<std::string>();
          return action_to_api(project.actions().set(split, id, value));
        }));

    server.Get(R"(/dataset_splits/([^/]+)/metrics)",
               json_handler([this](const httplib::Request& req) {
                 const Split& split = split_of(req);
                 return metrics_to_api(project.metrics(split.name, filter_of(req)),
                                       project.config());
               }));

    server.Get(R"(/dataset_splits/([^/]+)/confusion_matrix)",
               json_handler([this](const httplib::Request& req) {
                 const Split& split = split_of(req);
                 bool normalized = false;
                 if (req.has_param("normalized")) {
                   const auto v = req.get_param_value("normalized");
                   if (v != "true" && v != "false") {
                     throw Error(ErrorCode::kBadRequest, "normalized must be true or false");
                   }
                   normalized = v == "true";
                 }
                 return confusion_to_api(
                     project.confusion(split.name, filter_of(req), normalized),
                     project.config(), normalized);
               }));

    server.Get(R"(/dataset_splits/([^/]+)/confidence_histogram)",
               json_handler([this](const httplib::Request& req) {
                 const Split& split = split_of(req);
                 return json{{"bins", histogram_to_api(
                                          project.histogram(split.name, filter_of(req)))}};
               }));

    server.Get(R"(/dataset_splits/([^/]+)/top_words)",
               json_handler([this](const httplib::Request& req) {
                 const Split& split = split_of(req);
                 int n = 20;
                 if (req.has_param("n")) n = static_cast<int>(parse_id(req.get_param_value("n")));
                 return salient_words_to_api(project.top_words(split.name, filter_of(req), n));
               }));

    server.Get(R"(/dataset_splits/([^/]+)/behavioral_summary)",
               json_handler([this](const httplib::Request& req) {
                 const Split& split = split_of(req);
                 const FilterSpec spec = filter_of(req);
                 auto summary = project.behavioral(split.name, spec.pipeline_id);
                 if (!summary) {
                   return json{{"available", false},
                               {"families", json::array()},
                               {"tests", json::array()}};
                 }
                 json j = behavioral_summary_to_api(*summary);
                 j["available"] = true;
                 return j;
               }));

    server.Get("/threshold_comparison", json_handler([this](const httplib::Request& req) {
      const std::string split =
          req.has_param("split") ? req.get_param_value("split") : std::string("eval");
      const std::string pipeline =
          req.has_param("pipeline") ? req.get_param_value("pipeline") : std::string();
      std::vector<double> thresholds;
      const auto n = req.get_param_value_count("threshold");
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = req.get_param_value("threshold", i);
        double t = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), t);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
          throw Error(ErrorCode::kBadRequest, "threshold: not a number: " + v);
        }
        thresholds.push_back(t);
      }
      if (thresholds.empty()) {
        for (int i = 0; i <= 20; ++i) thresholds.push_back(i / 20.0);
      }
      return json{{"split", split},
                  {"pipeline", project.pipeline(pipeline).id},
                  {"points", sweep_to_api(project.threshold_comparison(split, pipeline,
                                                                       thresholds))}};
    }));

    server.Get("/export/proposed_actions",
               handle([this](const httplib::Request&, httplib::Response& res) {
                 res.status = 200;
                 res.set_header("Content-Disposition",
                                "attachment; filename=\"proposed_actions.csv\"");
                 res.set_content(proposed_actions_csv(project.actions(), project.state()),
                                 "text/csv; charset=utf-8");
               }));
  }

  json detail(const httplib::Request& req) {
    const ProjectConfig& config = project.config();
    const Split& split = split_of(req);
    const std::int64_t id = parse_id(req.matches[2].str());
    if (!split.contains(id)) {
      throw Error(ErrorCode::kUnknownUtterance,
                  "no utterance " + std::to_string(id) + " in split " + split.name);
    }
    const FilterSpec spec = filter_of(req);
    const std::string pipeline = project.pipeline(spec.pipeline_id).id;
    const auto i = static_cast<std::size_t>(id);
    const Utterance& u = split.at(id);
    auto preds = project.predictions(split.name, pipeline);
    auto tags = project.tags(split.name, pipeline);

    json neighbors = json::object();
    for (const char* target : {"train", "eval"}) {
      auto table = project.neighbors(split.name, target);
      if (!table) {
        neighbors[target] = nullptr;
        continue;
      }
      const Split& t = project.split(target);
      json list = json::array();
      for (const auto& nb : table->rows[i]) {
        const Utterance& other = t.at(nb.id);
        list.push_back({{"id", nb.id},
                        {"similarity", nb.similarity},
                        {"label", config.class_name(other.label)},
                        {"text", other.text}});
      }
      neighbors[target] = list;
    }

    json saliency = nullptr;
    if (const SaliencyTable* s = project.state().saliency_table(pipeline, split.name)) {
      saliency = {{"tokens", s->rows[i].tokens}, {"scores", s->rows[i].scores}};
    }

    json perturbations = nullptr;
    if (auto results = project.invariance(split.name, pipeline)) {
      perturbations = json::array();
      for (const auto& r : *results) {
        if (r.variant.id != id) continue;
        perturbations.push_back({{"test_name", r.variant.test_name},
                                 {"family", family_name(r.variant.family)},
                                 {"perturbed_text", r.variant.perturbed_text},
                                 {"original_prediction", config.class_name(r.original_class)},
                                 {"perturbed_prediction", config.class_name(r.perturbed_class)},
                                 {"confidence_delta", r.confidence_delta},
                                 {"passed", r.passed}});
      }
    }

    json epistemic = nullptr;
    if (auto scores = project.epistemic(split.name, pipeline)) {
      epistemic = (*scores)[i];
    }

    const auto action = project.actions().find(split.name, id);
    return {{"split", split.name},
            {"id", id},
            {"text", u.text},
            {"label", config.class_name(u.label)},
            {"pipeline", pipeline},
            {"predictions",
             {{"raw", prediction_json(preds->raw.predictions[i], preds->raw.outcomes[i], config)},
              {"postprocessed",
               prediction_json(preds->post.predictions[i], preds->post.outcomes[i], config)}}},
            {"smart_tags", tags_to_api((*tags)[i])},
            {"neighbors", neighbors},
            {"saliency", saliency},
            {"perturbations", perturbations},
            {"epistemic", epistemic},
            {"proposed_action", action_name(action ? action->value : ActionValue::kNoAction)},
            {"proposed_action_updated_at", action ? json(action->updated_at) : json(nullptr)}};
  }
};

Service::Service(Project& project) : impl_(std::make_unique<Impl>(project)) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kBindFailure,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void Service::run() {
  if (!impl_->bound) throw Error(ErrorCode::kBindFailure, "run() before bind()");
  impl_->server.listen_after_bind();
}

void Service::start() {
  if (!impl_->bound) throw Error(ErrorCode::kBindFailure, "start() before bind()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace errscope
