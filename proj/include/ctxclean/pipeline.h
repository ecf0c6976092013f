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

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxclean/detectors.h"
#include "ctxclean/injector.h"
#include "ctxclean/metrics.h"
#include "ctxclean/ofd.h"
#include "ctxclean/repair.h"
#include "ctxclean/table.h"
#include "ctxclean/triple_store.h"

namespace ctxclean {

// Flat key=value settings. '#' starts a comment line. Keys may repeat;
// get() returns the last value, all() every value in order.
class Settings {
 public:
  // Relative values of path keys (context, data, out, truth, findings,
  // repairs) are resolved against `base_dir`.
  static Settings parse(std::string_view text, const std::filesystem::path& base_dir = {});

  void set(const std::string& key, std::string value);  // replaces every earlier value
  void add(std::string key, std::string value);

  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> all(std::string_view key) const;
  // (suffix, value) for every key starting with `prefix`.
  std::vector<std::pair<std::string, std::string>> with_prefix(std::string_view prefix) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct RunConfig {
  std::filesystem::path context_path;
  std::filesystem::path data_path;
  std::filesystem::path out_dir;
  std::filesystem::path truth_path;     // evaluate; default <out>/ground_truth.csv
  std::filesystem::path findings_path;  // evaluate; default <out>/findings.csv
  std::filesystem::path repairs_path;   // evaluate; default <out>/repairs.csv
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  RepairMode repair_mode = RepairMode::kRepair;
  double poll_seconds = 2.0;
  InjectionSpec injection;
  std::optional<std::set<std::string>> enabled_detectors;  // nullopt: all

  // Dataset bindings as written; IRIs may be prefixed names that are
  // resolved against the context model's prefixes.
  std::vector<std::pair<std::string, std::string>> column_bindings;
  std::vector<std::pair<std::string, std::string>> timestamp_bindings;
  std::map<std::string, ColumnType> column_types;
  std::optional<std::string> key_column;
  std::optional<std::string> sensor_id_column;
  std::optional<std::string> device_id_column;
  std::vector<std::array<std::string, 3>> health_ranges;  // device, start, end
};

// Throws ConfigError on unknown values or malformed numbers.
RunConfig make_run_config(const Settings& settings);

DatasetConfig dataset_config(const RunConfig& config, const TripleGraph& graph);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct CleanResult {
  DependencySet dependencies;
  DetectionReport report;
  RepairPlan plan;
  Table cleaned;
  std::vector<std::string> warnings;
};

// Detect, propose and apply repairs for one table.
CleanResult run_clean(const Table& table, const DependencySet& dependencies, const DatasetConfig& config,
                      RepairMode mode, const std::optional<std::set<std::string>>& enabled_detectors = std::nullopt);

// Writes cleaned.csv, findings.csv and repairs.csv.
void write_clean_outputs(const CleanResult& result, const std::filesystem::path& out_dir);

// One line per dependency: id, kind and parameters separated by tabs,
// followed by a "<n> dependencies" summary line.
std::string format_dependencies(const DependencySet& dependencies);

// Each command throws ctxclean::Error (ConfigError or DataError) on failure.
void cmd_extract_ofds(const RunConfig& config, std::ostream& out);
void cmd_inject(const RunConfig& config, std::ostream& out);
CleanResult cmd_clean(const RunConfig& config, std::ostream& out);
EvalReport cmd_evaluate(const RunConfig& config, std::ostream& out);
void cmd_watch(const RunConfig& config, std::ostream& log, const std::atomic<bool>& stop);

// Polls the context file and re-runs the cleaning pass whenever its content
// hash changes. A context file that fails to parse or extract is reported
// and the previous dependency set stays in force.
class ContextWatcher {
 public:
  ContextWatcher(RunConfig config, std::ostream& log);

  // Loads the context model and runs the first cleaning pass. Throws if the
  // initial context cannot be loaded.
  void start();
  // Returns true when the file changed and a refresh was applied.
  bool poll_once();
  void run(const std::atomic<bool>& stop);

  const DependencySet& dependencies() const { return dependencies_; }
  const CleanResult& last_result() const { return last_result_; }
  std::size_t refresh_count() const { return refreshes_; }
  std::shared_ptr<const TripleGraph> graph() const { return store_.snapshot(); }

 private:
  void clean_and_write(const TripleGraph& graph);

  RunConfig config_;
  std::ostream& log_;
  GraphStore store_;
  DependencySet dependencies_;
  CleanResult last_result_;
  std::uint64_t last_hash_ = 0;
  std::size_t refreshes_ = 0;
};

std::uint64_t content_hash(std::string_view text);

// Full command line entry point: parses argv (subcommand plus flags, with an
// optional --config file underneath) and returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* stop = nullptr);

}  // namespace ctxclean
