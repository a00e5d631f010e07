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

#include "errscope/project.hpp"

#include <atomic>
#include <thread>

#include "errscope/providers.hpp"
#include "errscope/serialization.hpp"
#include "errscope/tagging.hpp"

namespace errscope {

namespace fs = std::filesystem;

namespace {

std::optional<fs::path> cache_root(const ProjectState& state, const ProjectOptions& o) {
  if (!o.disk_cache) return std::nullopt;
  if (o.cache_dir) return *o.cache_dir;
  return state.config.project_dir / "cache";
}

fs::path action_log(const ProjectState& state, const ProjectOptions& o) {
  if (o.action_log) return *o.action_log;
  return state.config.project_dir / "proposed_actions.jsonl";
}

}  // namespace

Project::Project(ProjectState state, ProjectOptions options)
    : state_(std::move(state)),
      scheduler_(cache_root(state_, options)),
      actions_(action_log(state_, options)),
      stopwords_(make_stopwords(state_.config.stopwords)),
      warmup_workers_(std::max(1, options.warmup_workers)) {}

std::unique_ptr<Project> Project::open(const fs::path& config_path, ProjectOptions options) {
  return std::make_unique<Project>(load_artifacts(load_config(config_path)), std::move(options));
}

const Split& Project::split(std::string_view name) const { return state_.split(name); }

const PipelineSource& Project::pipeline(std::string_view id) const {
  return config().pipeline(resolve_pipeline(id));
}

std::string Project::resolve_pipeline(std::string_view id) const {
  if (id.empty()) return config().pipelines.front().id;
  return config().pipeline(id).id;
}

std::vector<std::string> Project::pipelines_for(std::string_view split) const {
  state_.split(split);
  std::vector<std::string> out;
  for (const auto& p : config().pipelines) {
    if (state_.has_predictions(p.id, split)) out.push_back(p.id);
  }
  return out;
}

TaskKey Project::key(std::string module, std::string split, std::string pipeline) const {
  return TaskKey{std::move(module), std::move(split), std::move(pipeline), state_.fingerprint};
}

void Project::set_provider(const std::string& pipeline, const std::string& split,
                           std::shared_ptr<PredictionProvider> provider) {
  std::lock_guard lock(provider_mutex_);
  providers_[{pipeline, split}] = std::move(provider);
}

std::shared_ptr<PredictionProvider> Project::provider(const std::string& pipeline,
                                                      const std::string& split) {
  const PipelineSource& p = this->pipeline(pipeline);
  std::lock_guard lock(provider_mutex_);
  auto& slot = providers_[{p.id, split}];
  if (slot) return slot;
  if (auto it = p.perturbed_predictions.find(split); it != p.perturbed_predictions.end()) {
    slot = std::make_shared<FileBackedProvider>(config().resolve(it->second),
                                                config().class_count());
  } else if (!p.provider_url.empty()) {
    slot = std::make_shared<RemoteProvider>(p.provider_url, config().class_count());
  }
  return slot;
}

std::shared_ptr<const std::vector<Warning>> Project::warnings() {
  return scheduler_.get_or_compute<std::vector<Warning>>(
      key("dataset_warnings", "all"), [this] { return dataset_warnings(state_); });
}

std::shared_ptr<const PredictionSet> Project::predictions(const std::string& split,
                                                          const std::string& pipeline) {
  const PipelineSource& p = this->pipeline(pipeline);
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute<PredictionSet>(key("predictions", split, p.id), [&] {
    return predict_split(s, state_.prediction_table(p.id, split), p.prediction_threshold,
                         config().rejection_index());
  });
}

std::shared_ptr<const MetricsReport> Project::split_metrics(const std::string& split,
                                                            const std::string& pipeline,
                                                            bool postprocessed) {
  const std::string id = resolve_pipeline(pipeline);
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute<MetricsReport>(
      key(postprocessed ? "metrics_post" : "metrics_raw", split, id), [&] {
        auto preds = predictions(split, id);
        const auto ids = all_ids(s);
        return compute_metrics(ids, s, *preds, postprocessed, config().thresholds.ece_bins);
      });
}

std::shared_ptr<const NeighborTable> Project::neighbors(const std::string& query_split,
                                                        const std::string& target_split) {
  state_.split(query_split);
  state_.split(target_split);
  const EmbeddingMatrix* q = state_.embedding(query_split);
  const EmbeddingMatrix* t = state_.embedding(target_split);
  if (q == nullptr || t == nullptr) return nullptr;
  return scheduler_.get_or_compute<NeighborTable>(
      key("similarity_vs_" + target_split, query_split),
      [&] { return compute_neighbor_table(q, t, config().thresholds.neighbor_count); });
}

std::shared_ptr<const std::vector<InvarianceResult>> Project::invariance(
    const std::string& split, const std::string& pipeline) {
  const std::string id = resolve_pipeline(pipeline);
  auto prov = provider(id, split);
  if (!prov) return nullptr;
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute<std::vector<InvarianceResult>>(
      key("behavioral_invariance", split, id), [&] {
        auto preds = predictions(split, id);
        return evaluate_invariance(s, *preds, *prov, config().seed, config().thresholds,
                                   config().rejection_index());
      });
}

std::shared_ptr<const BehavioralSummary> Project::behavioral(const std::string& split,
                                                             const std::string& pipeline) {
  const std::string id = resolve_pipeline(pipeline);
  if (!provider(id, split)) return nullptr;
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute<BehavioralSummary>(
      key("behavioral_summary", split, id), [&] {
        auto results = invariance(split, id);
        return behavioral_tags_and_summary(*results, s.size());
      });
}

std::shared_ptr<const std::vector<EpistemicScore>> Project::epistemic(
    const std::string& split, const std::string& pipeline) {
  const std::string id = resolve_pipeline(pipeline);
  const McSampleTable* mc = state_.mc_table(id, split);
  if (mc == nullptr) return nullptr;
  return scheduler_.get_or_compute<std::vector<EpistemicScore>>(
      key("uncertainty", split, id), [mc] { return epistemic_scores(*mc); });
}

std::shared_ptr<const std::vector<TagSet>> Project::tags(const std::string& split,
                                                         const std::string& pipeline) {
  const std::string id = resolve_pipeline(pipeline);
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute<std::vector<TagSet>>(key("tags", split, id), [&] {
    auto preds = predictions(split, id);
    std::vector<std::shared_ptr<const PredictionSet>> others;
    TagInputs in;
    in.split = &s;
    in.predictions = preds.get();
    in.rejection_class = config().rejection_index();
    in.thresholds = config().thresholds;
    in.syntax = state_.syntax_table(split);

    auto vs_train = neighbors(split, "train");
    auto vs_eval = neighbors(split, "eval");
    in.train = &state_.split("train");
    in.vs_train = vs_train.get();
    in.eval = &state_.split("eval");
    in.vs_eval = vs_eval.get();

    auto scores = epistemic(split, id);
    in.epistemic = scores.get();
    auto behavior = behavioral(split, id);
    in.behavioral = behavior.get();

    for (const auto& other : pipelines_for(split)) {
      others.push_back(other == id ? preds : predictions(split, other));
      in.pipelines.push_back(others.back().get());
    }
    return evaluate_tags(in);
  });
}

std::shared_ptr<const QueryTable> Project::query_table(const std::string& split,
                                                       const std::string& pipeline) {
  const std::string id = resolve_pipeline(pipeline);
  const Split& s = state_.split(split);
  return scheduler_.get_or_compute_in_memory<QueryTable>(key("query_table", split, id), [&] {
    auto preds = predictions(split, id);
    auto t = tags(split, id);
    std::vector<std::string> names;
    for (int c = 0; c < config().declared_class_count(); ++c) {
      names.push_back(config().class_name(c));
    }
    return build_query_table(s, *preds, *t, names);
  });
}

FilterResult Project::query(const std::string& split, const FilterSpec& spec,
                            const SortSpec& sort, const PageSpec& page) {
  validate(spec);
  auto table = query_table(split, spec.pipeline_id);
  const auto actions = actions_.values_for(state_.split(split));
  return filter_utterances(*table, actions, spec, sort, page);
}

std::vector<std::int64_t> Project::population(const std::string& split, const FilterSpec& spec) {
  validate(spec);
  auto table = query_table(split, spec.pipeline_id);
  const auto actions = actions_.values_for(state_.split(split));
  return matching_ids(*table, actions, spec);
}

MetricsReport Project::metrics(const std::string& split, const FilterSpec& spec) {
  const auto ids = population(split, spec);
  auto preds = predictions(split, resolve_pipeline(spec.pipeline_id));
  return compute_metrics(ids, state_.split(split), *preds, spec.postprocessed,
                         config().thresholds.ece_bins);
}

Eigen::MatrixXd Project::confusion(const std::string& split, const FilterSpec& spec,
                                   bool normalized) {
  const auto ids = population(split, spec);
  auto preds = predictions(split, resolve_pipeline(spec.pipeline_id));
  return confusion_matrix(ids, state_.split(split), *preds, spec.postprocessed, normalized);
}

std::vector<HistogramBin> Project::histogram(const std::string& split, const FilterSpec& spec) {
  const auto ids = population(split, spec);
  auto preds = predictions(split, resolve_pipeline(spec.pipeline_id));
  return confidence_histogram(ids, *preds, spec.postprocessed);
}

SalientWords Project::top_words(const std::string& split, const FilterSpec& spec, int n) {
  const std::string id = resolve_pipeline(spec.pipeline_id);
  const auto ids = population(split, spec);
  auto preds = predictions(split, id);
  return top_salient_words(ids, state_.saliency_table(id, split), *preds, spec.postprocessed,
                           stopwords_, n);
}

std::vector<SweepPoint> Project::threshold_comparison(const std::string& split,
                                                      const std::string& pipeline,
                                                      std::span<const double> thresholds) {
  const std::string id = resolve_pipeline(pipeline);
  const Split& s = state_.split(split);
  const auto ids = all_ids(s);
  return threshold_sweep(ids, s, state_.prediction_table(id, split), thresholds,
                         config().rejection_index());
}

std::vector<TaskProgress> Project::warm_startup() {
  struct Task {
    std::string name;
    std::function<void()> run;
  };
  std::vector<Task> tasks;
  tasks.push_back({"dataset_warnings", [this] { warnings(); }});
  for (const auto& [split, unused] : state_.splits) {
    for (const auto& id : pipelines_for(split)) {
      const std::string suffix = "/" + split + "/" + id;
      tasks.push_back({"metrics_raw" + suffix, [=, this] { split_metrics(split, id, false); }});
      tasks.push_back({"metrics_post" + suffix, [=, this] { split_metrics(split, id, true); }});
      tasks.push_back({"tags" + suffix, [=, this] { tags(split, id); }});
    }
  }
  for (const auto& t : tasks) progress_.add(t.name);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      progress_.set(tasks[i].name, TaskStatus::kRunning);
      try {
        tasks[i].run();
        progress_.set(tasks[i].name, TaskStatus::kDone);
      } catch (const std::exception& e) {
        progress_.set(tasks[i].name, TaskStatus::kFailed, e.what());
      }
    }
  };
  std::vector<std::thread> threads;
  const int n = std::min<int>(warmup_workers_, static_cast<int>(tasks.size()));
  for (int i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return progress_.snapshot();
}

}  // namespace errscope
