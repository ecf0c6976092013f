// Copyright 2026 The ctxclean Authors.
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

#include <atomic>
#include <exception>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "ctxclean/error.h"
#include "ctxclean/pipeline.h"

namespace ctxclean {

namespace {

struct Flags {
  std::string context, data, config, out, truth, findings, repairs, repair_mode, detectors;
  std::string seed, tolerance, poll_seconds;
};

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "key=value settings file");
  sub->add_option("--context", flags.context, "context model (turtle)");
  sub->add_option("--data", flags.data, "CSV dataset");
  sub->add_option("--out", flags.out, "output directory");
  sub->add_option("--seed", flags.seed, "random seed");
  sub->add_option("--tolerance", flags.tolerance, "co-location tolerance");
  sub->add_option("--repair-mode", flags.repair_mode, "repair or delete");
  sub->add_option("--poll-seconds", flags.poll_seconds, "watch polling interval");
  sub->add_option("--detectors", flags.detectors, "comma separated detector names");
  sub->add_option("--truth", flags.truth, "ground truth CSV");
  sub->add_option("--findings", flags.findings, "findings CSV");
  sub->add_option("--repairs", flags.repairs, "repairs CSV");
}

RunConfig build_config(const CLI::App& sub, const Flags& flags) {
  Settings settings;
  if (!flags.config.empty()) {
    const std::filesystem::path path(flags.config);
    settings = Settings::parse(read_file(path), path.parent_path());
  }
  const std::pair<const char*, const std::string*> overrides[] = {
      {"context", &flags.context},     {"data", &flags.data},           {"out", &flags.out},
      {"seed", &flags.seed},           {"tolerance", &flags.tolerance}, {"repair-mode", &flags.repair_mode},
      {"poll-seconds", &flags.poll_seconds}, {"detectors", &flags.detectors}, {"truth", &flags.truth},
      {"findings", &flags.findings},   {"repairs", &flags.repairs}};
  for (const auto& [key, value] : overrides) {
    if (sub.count(std::string("--") + key) > 0) settings.set(key, *value);
  }
  return make_run_config(settings);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  CLI::App app{"Context-aware detection and repair of tabular data", "ctxclean"};
  app.require_subcommand(1, 1);
  Flags flags;
  auto* extract = app.add_subcommand("extract-ofds", "list dependencies derived from the context model");
  auto* inject = app.add_subcommand("inject", "inject errors and write ground truth");
  auto* clean = app.add_subcommand("clean", "detect and repair erroneous cells");
  auto* evaluate = app.add_subcommand("evaluate", "score findings and repairs against ground truth");
  auto* watch = app.add_subcommand("watch", "re-clean whenever the context model changes");
  for (auto* sub : {extract, inject, clean, evaluate, watch}) add_common(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (extract->parsed()) {
      cmd_extract_ofds(build_config(*extract, flags), out);
    } else if (inject->parsed()) {
      cmd_inject(build_config(*inject, flags), out);
    } else if (clean->parsed()) {
      cmd_clean(build_config(*clean, flags), out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(build_config(*evaluate, flags), out);
    } else if (watch->parsed()) {
      static const std::atomic<bool> never{false};
      cmd_watch(build_config(*watch, flags), err, stop ? *stop : never);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}

}  // namespace ctxclean
