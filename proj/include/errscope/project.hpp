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

#ifndef ERRSCOPE_PROJECT_HPP_
#define ERRSCOPE_PROJECT_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "errscope/action_store.hpp"
#include "errscope/behavioral.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/prediction.hpp"
#include "errscope/query.hpp"
#include "errscope/saliency.hpp"
#include "errscope/scheduler.hpp"
#include "errscope/similarity.hpp"
#include "errscope/uncertainty.hpp"
#include "errscope/warnings.hpp"

namespace errscope {

struct ProjectOptions {
  // Defaults to <project_dir>/cache; disable to keep everything in memory.
  std::optional<std::filesystem::path> cache_dir;
  bool disk_cache = true;
  // Defaults to <project_dir>/proposed_actions.jsonl.
  std::optional<std::filesystem::path> action_log;
  int warmup_workers = 2;
};

// A loaded project: immutable artifacts, the analysis cache and the action
// store. All analysis accessors are thread-safe and go through the
// scheduler, so each (module, split, pipeline) is computed once.
class Project {
 public:
  explicit Project(ProjectState state, ProjectOptions options = {});

  static std::unique_ptr<Project> open(const std::filesystem::path& config_path,
                                       ProjectOptions options = {});

  const ProjectState& state() const { return state_; }
  const ProjectConfig& config() const { return state_.config; }
  AnalysisScheduler& scheduler() { return scheduler_; }
  ActionStore& actions() { return actions_; }
  const ActionStore& actions() const { return actions_; }
  ProgressBoard& progress() { return progress_; }

  // Throws UnknownSplit / UnknownPipeline; an empty id selects the first
  // pipeline.
  const Split& split(std::string_view name) const;
  const PipelineSource& pipeline(std::string_view id) const;
  // Pipelines with predictions for `split`, in config order.
  std::vector<std::string> pipelines_for(std::string_view split) const;

  // Replaces the configured provider for (pipeline, split). Intended for
  // tests and embedding; cached behavioral results are not invalidated.
  void set_provider(const std::string& pipeline, const std::string& split,
                    std::shared_ptr<PredictionProvider> provider);
  // Injected, then file-backed, then remote; null when none is configured.
  std::shared_ptr<PredictionProvider> provider(const std::string& pipeline,
                                               const std::string& split);

  std::shared_ptr<const std::vector<Warning>> warnings();
  std::shared_ptr<const PredictionSet> predictions(const std::string& split,
                                                   const std::string& pipeline);
  // Metrics over the full split.
  std::shared_ptr<const MetricsReport> split_metrics(const std::string& split,
                                                     const std::string& pipeline,
                                                     bool postprocessed);
  // Null when either split has no embeddings.
  std::shared_ptr<const NeighborTable> neighbors(const std::string& query_split,
                                                 const std::string& target_split);
  // Null when no provider is available.
  std::shared_ptr<const std::vector<InvarianceResult>> invariance(const std::string& split,
                                                                  const std::string& pipeline);
  std::shared_ptr<const BehavioralSummary> behavioral(const std::string& split,
                                                      const std::string& pipeline);
  // Null when no MC samples are configured.
  std::shared_ptr<const std::vector<EpistemicScore>> epistemic(const std::string& split,
                                                               const std::string& pipeline);
  std::shared_ptr<const std::vector<TagSet>> tags(const std::string& split,
                                                  const std::string& pipeline);
  std::shared_ptr<const QueryTable> query_table(const std::string& split,
                                                const std::string& pipeline);

  // Subpopulation queries. FilterSpec::pipeline_id selects the pipeline.
  FilterResult query(const std::string& split, const FilterSpec& spec, const SortSpec& sort,
                     const PageSpec& page);
  std::vector<std::int64_t> population(const std::string& split, const FilterSpec& spec);
  MetricsReport metrics(const std::string& split, const FilterSpec& spec);
  Eigen::MatrixXd confusion(const std::string& split, const FilterSpec& spec, bool normalized);
  std::vector<HistogramBin> histogram(const std::string& split, const FilterSpec& spec);
  SalientWords top_words(const std::string& split, const FilterSpec& spec, int n);
  std::vector<SweepPoint> threshold_comparison(const std::string& split,
                                               const std::string& pipeline,
                                               std::span<const double> thresholds);

  // Schedules warnings, metrics and tags for every (split, pipeline) pair
  // and blocks until all are done or failed. Progress is mirrored in
  // progress().
  std::vector<TaskProgress> warm_startup();

 private:
  TaskKey key(std::string module, std::string split, std::string pipeline = {}) const;
  std::string resolve_pipeline(std::string_view id) const;

  ProjectState state_;
  AnalysisScheduler scheduler_;
  ActionStore actions_;
  ProgressBoard progress_;
  StopwordSet stopwords_;
  int warmup_workers_;

  std::mutex provider_mutex_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<PredictionProvider>> providers_;
};

}  // namespace errscope

#endif  // ERRSCOPE_PROJECT_HPP_
