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

// Command-line entry point: serve the HTTP API or run single analyses.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "errscope/behavioral.hpp"
#include "errscope/project.hpp"
#include "errscope/query_string.hpp"
#include "errscope/serialization.hpp"
#include "errscope/service.hpp"

namespace {

using errscope::Project;
using nlohmann::json;

void print(const json& j) {
  std::cout << j.dump(2, ' ', false, json::error_handler_t::replace) << "\n";
}

std::unique_ptr<Project> open_project(const std::string& config, bool disk_cache) {
  errscope::ProjectOptions options;
  options.disk_cache = disk_cache;
  return Project::open(config, options);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"errscope: error analysis for text classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  bool no_disk_cache = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "project config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_flag("--no-disk-cache", no_disk_cache, "keep analysis results in memory only");
  };

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "load a project and serve the HTTP API");
  add_common(serve);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port (0 picks a free one)");

  auto* validate = app.add_subcommand("validate", "check artifacts and print a report");
  add_common(validate);

  auto* warnings = app.add_subcommand("warnings", "print dataset warnings");
  add_common(warnings);

  std::string split = "eval";
  std::string pipeline;
  std::string filter;
  auto* metrics = app.add_subcommand("metrics", "metrics for a filtered subpopulation");
  add_common(metrics);
  metrics->add_option("--split", split);
  metrics->add_option("--filter", filter, "filter as a query string, e.g. label=a&smart_tag=short_sentence");

  auto* tags = app.add_subcommand("tags", "print smart tags per utterance");
  add_common(tags);
  tags->add_option("--split", split);
  tags->add_option("--pipeline", pipeline);

  auto* warmup = app.add_subcommand("warmup", "precompute the cache and print task status");
  add_common(warmup);

  std::string out_path;
  auto* export_actions = app.add_subcommand("export-actions", "write proposed actions as CSV");
  add_common(export_actions);
  export_actions->add_option("-o,--out", out_path)->required();

  auto* perturb = app.add_subcommand(
      "perturb", "write the generated perturbation variants of a split as JSON lines");
  add_common(perturb);
  perturb->add_option("--split", split);
  perturb->add_option("-o,--out", out_path, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    const bool disk = !no_disk_cache;
    if (serve->parsed()) {
      auto project = open_project(config_path, disk);
      errscope::Service service(*project);
      const int bound = service.bind(host, port);
      std::cerr << "errscope: serving " << project->config().project_name << " on http://"
                << host << ":" << bound << "\n";
      std::thread warm([&] { project->warm_startup(); });
      service.run();
      warm.join();
    } else if (validate->parsed()) {
      auto state = errscope::load_artifacts(errscope::load_config(config_path));
      const auto report = errscope::validate_artifacts(state);
      print(errscope::validation_to_json(report));
      return report.ok ? 0 : 1;
    } else if (warnings->parsed()) {
      auto project = open_project(config_path, disk);
      print(errscope::warnings_to_api(*project->warnings(), project->config()));
    } else if (metrics->parsed()) {
      auto project = open_project(config_path, disk);
      const auto spec =
          errscope::parse_filter(errscope::parse_query_string(filter), project->config());
      print(errscope::metrics_to_api(project->metrics(split, spec), project->config()));
    } else if (tags->parsed()) {
      auto project = open_project(config_path, disk);
      const auto& s = project->split(split);
      auto t = project->tags(split, pipeline);
      for (std::size_t i = 0; i < s.size(); ++i) {
        std::cout << json{{"id", s.utterances[i].id}, {"smart_tags", errscope::tags_to_api((*t)[i])}}
                         .dump()
                  << "\n";
      }
    } else if (warmup->parsed()) {
      auto project = open_project(config_path, disk);
      int failed = 0;
      for (const auto& t : project->warm_startup()) {
        std::cout << errscope::task_status_name(t.status) << "\t" << t.name;
        if (!t.error.empty()) std::cout << "\t" << t.error;
        std::cout << "\n";
        failed += t.status == errscope::TaskStatus::kFailed;
      }
      std::cout << "computations\t" << project->scheduler().computations() << "\n";
      return failed == 0 ? 0 : 1;
    } else if (export_actions->parsed()) {
      auto project = open_project(config_path, disk);
      const auto rows = errscope::export_proposed_actions(project->actions(), project->state(), out_path);
      std::cerr << "errscope: wrote " << rows << " rows to " << out_path << "\n";
    } else if (perturb->parsed()) {
      auto config = errscope::load_config(config_path);
      auto state = errscope::load_artifacts(config);
      const auto& s = state.split(split);
      std::ofstream file;
      if (!out_path.empty()) file.open(out_path, std::ios::binary | std::ios::trunc);
      std::ostream& out = out_path.empty() ? std::cout : file;
      for (const auto& u : s.utterances) {
        for (const auto& v : errscope::generate_perturbations(u, split, config.seed,
                                                              config.thresholds.typo_variants)) {
          out << json{{"id", v.id},
                      {"test_name", v.test_name},
                      {"family", errscope::family_name(v.family)},
                      {"text", v.perturbed_text}}
                     .dump()
              << "\n";
        }
      }
    }
  } catch (const errscope::Error& e) {
    std::cerr << "errscope: " << errscope::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "errscope: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
