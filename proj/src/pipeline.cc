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

#include "ctxclean/pipeline.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ctxclean/metrics.h"

namespace ctxclean {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPathKeys[] = {"context", "data", "out", "truth", "findings", "repairs"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double_setting(const std::string& key, const std::string& value) {
  const auto number = parse_number(value);
  if (!number) throw ConfigError("setting '" + key + "' expects a number, got '" + value + "'");
  return *number;
}

std::uint64_t parse_seed(const std::string& value) {
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("setting 'seed' expects a non-negative integer, got '" + value + "'");
  }
  return seed;
}

std::string resolve_iri(const TripleGraph& graph, const std::string& name) {
  if (auto expanded = graph.expand(name)) return *expanded;
  return name;
}

void require(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing required setting '") + what + "'");
}

TripleGraph load_context(const fs::path& path) { return parse_context(read_file(path)); }

}  // namespace

Settings Settings::parse(std::string_view text, const fs::path& base_dir) {
  Settings settings;
  std::size_t line_number = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key=value");
    }
    std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
    const bool is_path = std::find(std::begin(kPathKeys), std::end(kPathKeys), key) != std::end(kPathKeys);
    if (is_path && !base_dir.empty() && !value.empty() && fs::path(value).is_relative()) {
      value = (base_dir / value).lexically_normal().string();
    }
    settings.add(std::move(key), std::move(value));
  }
  return settings;
}

void Settings::set(const std::string& key, std::string value) {
  std::erase_if(entries_, [&](const auto& entry) { return entry.first == key; });
  entries_.emplace_back(key, std::move(value));
}

void Settings::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

std::optional<std::string> Settings::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

std::vector<std::string> Settings::all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Settings::with_prefix(std::string_view prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : entries_) {
    if (k.size() > prefix.size() && k.starts_with(prefix)) out.emplace_back(k.substr(prefix.size()), v);
  }
  return out;
}

RunConfig make_run_config(const Settings& settings) {
  static constexpr std::string_view kPlainKeys[] = {
      "context",   "data",         "out",          "truth",      "findings",         "repairs",
      "seed",      "tolerance",    "repair-mode",  "poll-seconds", "config",         "detectors",
      "key-column", "sensor-id-column", "device-id-column", "health", "inject.rate", "inject.categories",
      "inject.columns", "inject.outlier-mode"};
  static constexpr std::string_view kPrefixedKeys[] = {"type.", "bind.", "timestamp.", "inject.rate."};

  RunConfig config;
  // Reject keys we do not understand so that typos do not pass silently.
  for (const auto& [key, value] : settings.with_prefix("")) {
    const bool plain = std::find(std::begin(kPlainKeys), std::end(kPlainKeys), key) != std::end(kPlainKeys);
    const bool prefixed = std::any_of(std::begin(kPrefixedKeys), std::end(kPrefixedKeys),
                                      [&](std::string_view p) { return key.size() > p.size() && key.starts_with(p); });
    if (!plain && !prefixed) throw ConfigError("unknown setting '" + key + "'");
  }

  if (auto v = settings.get("context")) config.context_path = *v;
  if (auto v = settings.get("data")) config.data_path = *v;
  if (auto v = settings.get("out")) config.out_dir = *v;
  config.truth_path = settings.get("truth").value_or("");
  config.findings_path = settings.get("findings").value_or("");
  config.repairs_path = settings.get("repairs").value_or("");
  if (auto v = settings.get("seed")) config.seed = parse_seed(*v);
  if (auto v = settings.get("tolerance")) {
    config.tolerance = parse_double_setting("tolerance", *v);
    if (*config.tolerance < 0) throw ConfigError("tolerance must be non-negative");
  }
  if (auto v = settings.get("repair-mode")) {
    const auto mode = parse_repair_mode(*v);
    if (!mode) throw ConfigError("repair-mode must be 'repair' or 'delete', got '" + *v + "'");
    config.repair_mode = *mode;
  }
  if (auto v = settings.get("poll-seconds")) {
    config.poll_seconds = parse_double_setting("poll-seconds", *v);
    if (!(config.poll_seconds > 0)) throw ConfigError("poll-seconds must be positive");
  }
  if (auto v = settings.get("detectors")) {
    std::set<std::string> enabled;
    for (const auto& name : split_list(*v)) enabled.insert(name);
    config.enabled_detectors = std::move(enabled);
  }

  InjectionSpec& spec = config.injection;
  spec.seed = config.seed;
  if (auto rate = settings.get("inject.rate")) {
    const double value = parse_double_setting("inject.rate", *rate);
    const auto categories = settings.get("inject.categories");
    if (!categories) throw ConfigError("inject.rate needs inject.categories");
    for (const auto& name : split_list(*categories)) {
      const auto category = parse_error_category(name);
      if (!category) throw ConfigError("unknown error category '" + name + "'");
      spec.rates[*category] = value;
    }
  }
  for (const auto& [name, value] : settings.with_prefix("inject.rate.")) {
    const auto category = parse_error_category(name);
    if (!category) throw ConfigError("unknown error category '" + name + "'");
    spec.rates[*category] = parse_double_setting("inject.rate." + name, value);
  }
  if (auto v = settings.get("inject.columns")) spec.target_columns = split_list(*v);
  if (auto v = settings.get("inject.outlier-mode")) {
    const auto mode = parse_outlier_mode(*v);
    if (!mode) throw ConfigError("inject.outlier-mode must be original_range or doubled_range");
    spec.outlier_mode = *mode;
  }

  for (const auto& [column, type_name] : settings.with_prefix("type.")) {
    const auto type = parse_column_type(type_name);
    if (!type) throw ConfigError("column '" + column + "' has unknown type '" + type_name + "'");
    config.column_types[column] = *type;
  }
  config.column_bindings = settings.with_prefix("bind.");
  config.timestamp_bindings = settings.with_prefix("timestamp.");
  config.key_column = settings.get("key-column");
  config.sensor_id_column = settings.get("sensor-id-column");
  config.device_id_column = settings.get("device-id-column");
  for (const auto& range : settings.all("health")) {
    const auto parts = split_list(range);
    if (parts.size() != 3) throw ConfigError("health expects 'device,start,end', got '" + range + "'");
    if (!is_timestamp(parts[1]) || !is_timestamp(parts[2])) {
      throw ConfigError("health range bounds must be timestamps: '" + range + "'");
    }
    config.health_ranges.push_back({parts[0], parts[1], parts[2]});
  }
  return config;
}

DatasetConfig dataset_config(const RunConfig& config, const TripleGraph& graph) {
  DatasetConfig out;
  for (const auto& [iri, column] : config.column_bindings) out.column_bindings[resolve_iri(graph, iri)] = column;
  for (const auto& [iri, column] : config.timestamp_bindings) out.timestamp_bindings[resolve_iri(graph, iri)] = column;
  out.column_types = config.column_types;
  if (config.tolerance) out.colocation_tolerance = *config.tolerance;
  out.key_column = config.key_column;
  out.sensor_id_column = config.sensor_id_column;
  out.device_id_column = config.device_id_column;
  for (const auto& [device, start, end] : config.health_ranges) {
    out.health_ranges.push_back({resolve_iri(graph, device), start, end});
  }
  return merge_binding_hints(graph, std::move(out));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

CleanResult run_clean(const Table& table, const DependencySet& dependencies, const DatasetConfig& config,
                      RepairMode mode, const std::optional<std::set<std::string>>& enabled_detectors) {
  CleanResult result;
  result.dependencies = dependencies;
  auto compiled = compile(dependencies, config, table);
  result.warnings = std::move(compiled.warnings);
  DetectionReport all = detect_all(table, compiled.plans);
  if (enabled_detectors) {
    for (const auto& finding : all) {
      if (enabled_detectors->contains(finding.detector)) result.report.add(finding);
    }
  } else {
    result.report = std::move(all);
  }
  result.plan = propose_repairs(table, result.report, dependencies, config, mode);
  result.cleaned = apply_repairs(table, result.plan);
  return result;
}

void write_clean_outputs(const CleanResult& result, const fs::path& out_dir) {
  write_file(out_dir / "cleaned.csv", write_csv(result.cleaned));
  write_file(out_dir / "findings.csv", write_findings_csv(result.report));
  write_file(out_dir / "repairs.csv", write_repairs_csv(result.plan));
}

std::string format_dependencies(const DependencySet& dependencies) {
  std::string out;
  for (const auto& dependency : dependencies.dependencies) {
    out += dependency.id + "\t" + std::string(to_string(dependency.kind())) + "\t" + dependency.parameters() + "\n";
  }
  out += std::to_string(dependencies.size()) + " dependencies\n";
  return out;
}

void cmd_extract_ofds(const RunConfig& config, std::ostream& out) {
  require(config.context_path, "context");
  const auto dependencies = extract_all(load_context(config.context_path));
  const std::string listing = format_dependencies(dependencies);
  out << listing;
  if (!config.out_dir.empty()) write_file(config.out_dir / "ofds.txt", listing);
}

void cmd_inject(const RunConfig& config, std::ostream& out) {
  require(config.data_path, "data");
  require(config.out_dir, "out");
  if (config.injection.rates.empty()) throw ConfigError("no injection rates configured (inject.rate.<category>)");
  const TripleGraph graph = config.context_path.empty() ? TripleGraph{} : load_context(config.context_path);
  const Table clean = load_csv(read_file(config.data_path), dataset_config(config, graph));
  const auto result = inject(clean, config.injection);

  std::string meta = "seed=" + std::to_string(config.injection.seed) + "\n";
  meta += "generator=mt19937_64/v" + std::to_string(SeededRng::kVersion) + "\n";
  meta += "outlier_mode=" + std::string(to_string(config.injection.outlier_mode)) + "\n";
  for (const auto& [category, rate] : config.injection.rates) {
    const auto it = result.injected.find(category);
    meta += std::string(to_string(category)) + "=" + std::to_string(it == result.injected.end() ? 0 : it->second) + "\n";
  }
  meta += "injected=" + std::to_string(result.truth.size()) + "\n";

  write_file(config.out_dir / "dirty.csv", write_csv(result.dirty));
  write_file(config.out_dir / "ground_truth.csv", write_ground_truth_csv(result.truth));
  write_file(config.out_dir / "injection.txt", meta);
  out << meta;
}

CleanResult cmd_clean(const RunConfig& config, std::ostream& out) {
  require(config.context_path, "context");
  require(config.data_path, "data");
  require(config.out_dir, "out");
  const TripleGraph graph = load_context(config.context_path);
  const auto dependencies = extract_all(graph);
  const DatasetConfig dataset = dataset_config(config, graph);
  const Table table = load_csv(read_file(config.data_path), dataset);
  auto result = run_clean(table, dependencies, dataset, config.repair_mode, config.enabled_detectors);
  write_clean_outputs(result, config.out_dir);
  for (const auto& warning : result.warnings) out << "warning: " << warning << "\n";
  out << dependencies.size() << " dependencies, " << result.report.size() << " findings on "
      << result.report.cells().size() << " cells, " << result.plan.size() << " repairs\n";
  return result;
}

EvalReport cmd_evaluate(const RunConfig& config, std::ostream& out) {
  require(config.out_dir, "out");
  const fs::path findings = config.findings_path.empty() ? config.out_dir / "findings.csv" : config.findings_path;
  const fs::path repairs = config.repairs_path.empty() ? config.out_dir / "repairs.csv" : config.repairs_path;
  const fs::path truth = config.truth_path.empty() ? config.out_dir / "ground_truth.csv" : config.truth_path;
  const auto report = evaluate(read_findings_csv(read_file(findings)), read_repairs_csv(read_file(repairs)),
                               read_ground_truth_csv(read_file(truth)));
  write_file(config.out_dir / "eval.json", to_json(report));
  const auto& d = report.detection;
  out << "precision=" << d.precision << " recall=" << d.recall << " f1=" << d.f1
      << " repair_recall=" << report.repair.repair_recall << " repair_f1=" << report.repair.repair_f1 << "\n";
  return report;
}

void cmd_watch(const RunConfig& config, std::ostream& log, const std::atomic<bool>& stop) {
  ContextWatcher watcher(config, log);
  watcher.start();
  watcher.run(stop);
  log << "watch stopped after " << watcher.refresh_count() << " refreshes\n";
}

std::uint64_t content_hash(std::string_view text) {
  // FNV-1a, 64 bit.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

ContextWatcher::ContextWatcher(RunConfig config, std::ostream& log) : config_(std::move(config)), log_(log) {
  require(config_.context_path, "context");
  require(config_.data_path, "data");
}

void ContextWatcher::start() {
  const std::string text = read_file(config_.context_path);
  last_hash_ = content_hash(text);
  TripleGraph graph = parse_context(text);
  dependencies_ = extract_all(graph);
  store_.update(graph);
  clean_and_write(graph);
  log_ << "watching " << config_.context_path.string() << " with " << dependencies_.size() << " dependencies\n";
}

bool ContextWatcher::poll_once() {
  std::string text;
  try {
    text = read_file(config_.context_path);
  } catch (const Error& e) {
    log_ << "warning: " << e.what() << "\n";
    return false;
  }
  const std::uint64_t hash = content_hash(text);
  if (hash == last_hash_) return false;
  last_hash_ = hash;

  TripleGraph graph;
  DependencySet refreshed;
  std::vector<ChangeEvent> events;
  try {
    graph = parse_context(text);
    events = diff(*store_.snapshot(), graph);
    refreshed = refresh(dependencies_, graph, events);
  } catch (const DataError& e) {
    log_ << "warning: context update rejected, keeping " << dependencies_.size() << " dependencies: " << e.what()
         << "\n";
    return false;
  }
  events = store_.update(graph);
  dependencies_ = std::move(refreshed);
  ++refreshes_;
  log_ << "refresh " << refreshes_ << ": " << events.size() << " change events, " << dependencies_.size()
       << " dependencies\n";
  try {
    clean_and_write(graph);
  } catch (const Error& e) {
    log_ << "warning: cleaning pass failed: " << e.what() << "\n";
  }
  return true;
}

void ContextWatcher::run(const std::atomic<bool>& stop) {
  using namespace std::chrono;
  const auto interval = duration_cast<milliseconds>(duration<double>(config_.poll_seconds));
  while (!stop.load()) {
    const auto wake = steady_clock::now() + interval;
    while (!stop.load() && steady_clock::now() < wake) std::this_thread::sleep_for(milliseconds(20));
    if (stop.load()) break;
    poll_once();
  }
}

void ContextWatcher::clean_and_write(const TripleGraph& graph) {
  const DatasetConfig dataset = dataset_config(config_, graph);
  const Table table = load_csv(read_file(config_.data_path), dataset);
  last_result_ = run_clean(table, dependencies_, dataset, config_.repair_mode, config_.enabled_detectors);
  for (const auto& warning : last_result_.warnings) log_ << "warning: " << warning << "\n";
  if (!config_.out_dir.empty()) write_clean_outputs(last_result_, config_.out_dir);
}

}  // namespace ctxclean
