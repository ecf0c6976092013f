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

#include "ctxclean/ofd.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

namespace ctxclean {

namespace {

Term predicate(std::string_view local) { return Term::Iri(vocab::iri(local)); }

std::string format_number(double value) { return fmt::format("{}", value); }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Accumulates dependencies and vocabulary violations for one extraction pass.
class Extraction {
 public:
  explicit Extraction(const TripleGraph& graph) : graph_(graph) {}

  const TripleGraph& graph() const { return graph_; }

  // (subject, predicate, ?o) for a fixed subject.
  std::vector<Triple> outgoing(const Term& subject, std::string_view pred) const {
    std::vector<Triple> out;
    for (const auto& binding : match_pattern(graph_, {subject, predicate(pred), Wildcard{"o"}})) {
      out.push_back({subject, predicate(pred), binding.at("o")});
    }
    return out;
  }

  // Every (?s, predicate, ?o) triple.
  std::vector<Triple> all(std::string_view pred) const {
    std::vector<Triple> out;
    for (const auto& binding : match_pattern(graph_, {Wildcard{"s"}, predicate(pred), Wildcard{"o"}})) {
      out.push_back({binding.at("s"), predicate(pred), binding.at("o")});
    }
    return out;
  }

  void add(Dependency dependency, const std::vector<Triple>& sources) {
    auto [it, inserted] = provenance_.try_emplace(dependency.id);
    it->second.insert(sources.begin(), sources.end());
    if (inserted) dependencies_.push_back(std::move(dependency));
  }

  void violation(const std::string& message, const std::vector<Triple>& triples) {
    problems_.push_back(message);
    offending_.insert(triples.begin(), triples.end());
  }

  bool requires_iri(const Triple& triple) {
    if (triple.subject.is_iri() && triple.object.is_iri()) return true;
    violation("'" + local_name(triple.predicate.text()) + "' expects IRIs on both ends (blank nodes and literals are not allowed)",
              {triple});
    return false;
  }

  // Table column name for a Column node: its mapsToColumn literal, else its local name.
  std::optional<std::string> column_name(const Term& node, std::vector<Triple>& sources) {
    const auto mapped = outgoing(node, vocab::kMapsToColumn);
    if (mapped.empty()) return local_name(node.text());
    if (mapped.size() > 1 || !mapped.front().object.is_literal()) {
      violation("column node <" + node.text() + "> needs exactly one literal mapsToColumn", mapped);
      return std::nullopt;
    }
    sources.push_back(mapped.front());
    return mapped.front().object.text();
  }

  void finish(DependencySet& out) {
    if (!problems_.empty()) {
      std::string message = "context vocabulary violation: " + problems_.front();
      if (problems_.size() > 1) message += " (and " + std::to_string(problems_.size() - 1) + " more)";
      throw VocabularyError(message, std::vector<Triple>(offending_.begin(), offending_.end()));
    }
    for (auto& dependency : dependencies_) {
      const auto& sources = provenance_.at(dependency.id);
      out.provenance[dependency.id] = std::vector<Triple>(sources.begin(), sources.end());
      out.dependencies.push_back(std::move(dependency));
    }
  }

 private:
  const TripleGraph& graph_;
  std::vector<Dependency> dependencies_;
  std::map<std::string, std::set<Triple>> provenance_;
  std::vector<std::string> problems_;
  std::set<Triple> offending_;
};

void extract_denials(Extraction& ex) {
  for (const auto& triple : ex.all(vocab::kDetermines)) {
    if (!ex.requires_iri(triple)) continue;
    std::vector<Triple> sources{triple};
    const auto lhs = ex.column_name(triple.subject, sources);
    const auto rhs = ex.column_name(triple.object, sources);
    if (!lhs || !rhs) continue;
    if (*lhs == *rhs) {
      ex.violation("denial dependency with identical sides '" + *lhs + "'", sources);
      continue;
    }
    ex.add({"denial:" + *lhs + "->" + *rhs, Denial{*lhs, *rhs}}, sources);
  }
}

void extract_matchings(Extraction& ex) {
  for (const auto& link : ex.all(vocab::kMatchesSimilar)) {
    if (!ex.requires_iri(link)) continue;
    const auto targets = ex.outgoing(link.object, vocab::kSimilarTo);
    const auto thresholds = ex.outgoing(link.object, vocab::kThreshold);
    if (targets.empty()) {
      ex.violation("matching node <" + link.object.text() + "> has no similarTo target", {link});
      continue;
    }
    if (thresholds.size() != 1 || !thresholds.front().object.numeric()) {
      auto offending = thresholds;
      offending.push_back(link);
      ex.violation("matching node <" + link.object.text() + "> needs exactly one numeric threshold", offending);
      continue;
    }
    double threshold = *thresholds.front().object.numeric();
    if (threshold > 1.0) threshold /= 100.0;  // percent form, e.g. "75"
    if (!(threshold > 0.0 && threshold <= 1.0)) {
      ex.violation("matching threshold out of (0, 1]: " + thresholds.front().object.text(), {thresholds.front()});
      continue;
    }
    for (const auto& target : targets) {
      if (!ex.requires_iri(target)) continue;
      std::vector<Triple> sources{link, target, thresholds.front()};
      const auto lhs = ex.column_name(link.subject, sources);
      const auto rhs = ex.column_name(target.object, sources);
      if (!lhs || !rhs) continue;
      if (*lhs == *rhs) {
        ex.violation("matching dependency with identical sides '" + *lhs + "'", sources);
        continue;
      }
      ex.add({"matching:" + *lhs + "->" + *rhs + "@" + format_number(threshold), Matching{*lhs, *rhs, threshold}},
             sources);
    }
  }
}

template <typename Payload>
void extract_pairs(Extraction& ex, std::string_view pred, std::string_view tag) {
  for (const auto& triple : ex.all(pred)) {
    if (!ex.requires_iri(triple)) continue;
    const auto& from = triple.subject.text();
    const auto& to = triple.object.text();
    if constexpr (std::is_same_v<Payload, Temporal>) {
      if (from == to) {
        ex.violation("device <" + from + "> cannot send to itself", {triple});
        continue;
      }
    }
    ex.add({std::string(tag) + ":" + from + "->" + to, Payload{from, to}}, {triple});
  }
}

void extract_localities(Extraction& ex) {
  for (const auto& deployed : ex.all(vocab::kDeployedAt)) {
    if (!ex.requires_iri(deployed)) continue;
    for (const auto& located : ex.outgoing(deployed.object, vocab::kAtLocation)) {
      if (!ex.requires_iri(located)) continue;
      const auto& device = deployed.subject.text();
      const auto& place = located.object.text();
      ex.add({"locality:" + device + "->" + place, Locality{device, place}}, {deployed, located});
    }
  }
}

void extract_capabilities(Extraction& ex) {
  struct Bound {
    double value;
    std::vector<Triple> sources;
  };
  std::map<std::string, std::pair<std::vector<Bound>, std::vector<Bound>>> bounds;  // sensor -> (mins, maxes)

  for (const auto& link : ex.all(vocab::kHasMetadata)) {
    if (!ex.requires_iri(link)) continue;
    const auto types = ex.outgoing(link.object, vocab::kMetadataType);
    const auto values = ex.outgoing(link.object, vocab::kMetadataValue);
    std::vector<Triple> sources{link};
    sources.insert(sources.end(), types.begin(), types.end());
    sources.insert(sources.end(), values.begin(), values.end());

    if (types.size() != 1 || !types.front().object.is_literal()) {
      ex.violation("metadata <" + link.object.text() + "> needs exactly one literal metadataType", sources);
      continue;
    }
    if (values.size() != 1 || !values.front().object.numeric()) {
      ex.violation("metadata <" + link.object.text() + "> needs exactly one numeric metadataValue", sources);
      continue;
    }
    const std::string type = lowercase(types.front().object.text());
    const double value = *values.front().object.numeric();
    CapabilityKind kind;
    if (type == "min") {
      kind = CapabilityKind::kMin;
    } else if (type == "max") {
      kind = CapabilityKind::kMax;
    } else if (type == "resolution") {
      kind = CapabilityKind::kResolution;
      if (value <= 0) {
        ex.violation("resolution must be positive for <" + link.subject.text() + ">", sources);
        continue;
      }
    } else {
      ex.violation("unknown metadataType '" + types.front().object.text() + "'", sources);
      continue;
    }
    const auto& sensor = link.subject.text();
    if (kind == CapabilityKind::kMin) bounds[sensor].first.push_back({value, sources});
    if (kind == CapabilityKind::kMax) bounds[sensor].second.push_back({value, sources});
    ex.add({"capability:" + sensor + ":" + type + "=" + format_number(value), Capability{sensor, kind, value}},
           sources);
  }

  for (const auto& [sensor, minmax] : bounds) {
    for (const auto& low : minmax.first) {
      for (const auto& high : minmax.second) {
        if (low.value > high.value) {
          auto offending = low.sources;
          offending.insert(offending.end(), high.sources.begin(), high.sources.end());
          ex.violation("min exceeds max for <" + sensor + ">", offending);
        }
      }
    }
  }
}

void extract_kind(Extraction& ex, DependencyKind kind) {
  switch (kind) {
    case DependencyKind::kDenial: extract_denials(ex); break;
    case DependencyKind::kMatching: extract_matchings(ex); break;
    case DependencyKind::kDeviceLink: extract_pairs<DeviceLink>(ex, vocab::kAttachedTo, "device_link"); break;
    case DependencyKind::kTemporal: extract_pairs<Temporal>(ex, vocab::kSendsTo, "temporal"); break;
    case DependencyKind::kLocality: extract_localities(ex); break;
    case DependencyKind::kMonitoring: extract_pairs<Monitoring>(ex, vocab::kMonitoredBy, "monitoring"); break;
    case DependencyKind::kCapability: extract_capabilities(ex); break;
  }
}

constexpr DependencyKind kAllKinds[] = {DependencyKind::kDenial,   DependencyKind::kMatching,   DependencyKind::kDeviceLink,
                                        DependencyKind::kTemporal, DependencyKind::kLocality,   DependencyKind::kMonitoring,
                                        DependencyKind::kCapability};

void sort_dependencies(DependencySet& set) {
  std::sort(set.dependencies.begin(), set.dependencies.end(), [](const Dependency& a, const Dependency& b) {
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    return a.id < b.id;
  });
}

// Dependency kinds whose extraction reads triples with this predicate.
std::vector<DependencyKind> kinds_reading(const Term& pred) {
  if (!pred.text().starts_with(vocab::kNamespace)) return {};
  const std::string_view name = std::string_view(pred.text()).substr(vocab::kNamespace.size());
  using K = DependencyKind;
  if (name == vocab::kDetermines) return {K::kDenial};
  if (name == vocab::kMatchesSimilar || name == vocab::kSimilarTo || name == vocab::kThreshold) return {K::kMatching};
  if (name == vocab::kMapsToColumn) return {K::kDenial, K::kMatching};
  if (name == vocab::kAttachedTo) return {K::kDeviceLink};
  if (name == vocab::kSendsTo) return {K::kTemporal};
  if (name == vocab::kDeployedAt || name == vocab::kAtLocation) return {K::kLocality};
  if (name == vocab::kMonitoredBy) return {K::kMonitoring};
  if (name == vocab::kHasMetadata || name == vocab::kMetadataType || name == vocab::kMetadataValue) {
    return {K::kCapability};
  }
  return {};
}

std::string require_numeric_column(const Table& table, const std::string& column, const std::string& dependency) {
  const auto index = table.column_index(column);
  if (!index) throw ConfigError("dependency " + dependency + ": table has no column '" + column + "'");
  if (table.column(*index).type != ColumnType::kNumber) {
    throw ConfigError("dependency " + dependency + ": column '" + column + "' must be numeric");
  }
  return column;
}

std::string require_column(const Table& table, const std::string& column, const std::string& dependency) {
  if (!table.column_index(column)) throw ConfigError("dependency " + dependency + ": table has no column '" + column + "'");
  return column;
}

const std::string* lookup(const std::map<std::string, std::string>& map, const std::string& key) {
  const auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

}  // namespace

std::string vocab::iri(std::string_view local) { return std::string(kNamespace) + std::string(local); }

std::string local_name(std::string_view iri) {
  const auto cut = iri.find_last_of("#/:");
  return std::string(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
}

std::string_view to_string(DependencyKind kind) {
  switch (kind) {
    case DependencyKind::kDenial: return "denial";
    case DependencyKind::kMatching: return "matching";
    case DependencyKind::kDeviceLink: return "device_link";
    case DependencyKind::kTemporal: return "temporal";
    case DependencyKind::kLocality: return "locality";
    case DependencyKind::kMonitoring: return "monitoring";
    case DependencyKind::kCapability: return "capability";
  }
  return "unknown";
}

std::string_view to_string(CapabilityKind kind) {
  switch (kind) {
    case CapabilityKind::kMin: return "min";
    case CapabilityKind::kMax: return "max";
    case CapabilityKind::kResolution: return "resolution";
  }
  return "unknown";
}

std::string Dependency::parameters() const {
  struct Visitor {
    std::string operator()(const Denial& d) const { return "lhs=" + d.lhs + " rhs=" + d.rhs; }
    std::string operator()(const Matching& m) const {
      return "lhs=" + m.lhs + " rhs=" + m.rhs + " threshold=" + format_number(m.threshold);
    }
    std::string operator()(const DeviceLink& d) const { return "sensor=" + d.sensor + " device=" + d.device; }
    std::string operator()(const Temporal& t) const {
      return "predecessor=" + t.predecessor + " successor=" + t.successor;
    }
    std::string operator()(const Locality& l) const { return "device=" + l.device + " locality=" + l.locality; }
    std::string operator()(const Monitoring& m) const { return "device=" + m.device + " monitor=" + m.monitor; }
    std::string operator()(const Capability& c) const {
      return "sensor=" + c.sensor + " " + std::string(to_string(c.kind)) + "=" + format_number(c.value);
    }
  };
  return std::visit(Visitor{}, payload);
}

const Dependency* DependencySet::find(std::string_view id) const {
  for (const auto& dependency : dependencies) {
    if (dependency.id == id) return &dependency;
  }
  return nullptr;
}

VocabularyError::VocabularyError(const std::string& message, std::vector<Triple> offending)
    : DataError(message), offending_(std::move(offending)) {}

DependencySet extract_all(const TripleGraph& graph) {
  Extraction ex(graph);
  for (const auto kind : kAllKinds) extract_kind(ex, kind);
  DependencySet out;
  ex.finish(out);
  sort_dependencies(out);
  return out;
}

DependencySet refresh(const DependencySet& current, const TripleGraph& graph_after,
                      std::span<const ChangeEvent> events) {
  std::set<DependencyKind> affected;
  for (const auto& event : events) {
    for (const auto kind : kinds_reading(event.triple.predicate)) affected.insert(kind);
  }
  if (affected.empty()) return current;

  Extraction ex(graph_after);
  for (const auto kind : affected) extract_kind(ex, kind);
  DependencySet out;
  ex.finish(out);
  for (const auto& dependency : current.dependencies) {
    if (affected.contains(dependency.kind())) continue;
    out.dependencies.push_back(dependency);
    out.provenance[dependency.id] = current.provenance.at(dependency.id);
  }
  sort_dependencies(out);
  return out;
}

DatasetConfig merge_binding_hints(const TripleGraph& graph, DatasetConfig config) {
  const auto merge = [&](std::string_view pred, std::map<std::string, std::string>& into) {
    for (const auto& binding : match_pattern(graph, {Wildcard{"s"}, predicate(pred), Wildcard{"o"}})) {
      const auto& subject = binding.at("s");
      const auto& column = binding.at("o");
      if (subject.is_iri() && column.is_literal()) into.try_emplace(subject.text(), column.text());
    }
  };
  merge(vocab::kMapsToColumn, config.column_bindings);
  merge(vocab::kTimestampColumn, config.timestamp_bindings);
  return config;
}

std::vector<std::string> CheckPlan::bound_columns() const {
  struct Visitor {
    std::vector<std::string> operator()(const DenialPlan& p) const { return {p.lhs_column, p.rhs_column}; }
    std::vector<std::string> operator()(const MatchingPlan& p) const { return {p.lhs_column, p.rhs_column}; }
    std::vector<std::string> operator()(const DeviceLinkPlan& p) const { return {p.sensor_column, p.device_column}; }
    std::vector<std::string> operator()(const TemporalPlan& p) const {
      return {p.predecessor_column, p.successor_column};
    }
    std::vector<std::string> operator()(const ColocationPlan& p) const { return {p.first_column, p.second_column}; }
    std::vector<std::string> operator()(const MonitoringPlan& p) const {
      std::vector<std::string> out{p.timestamp_column};
      out.insert(out.end(), p.value_columns.begin(), p.value_columns.end());
      return out;
    }
    std::vector<std::string> operator()(const CapabilityPlan& p) const { return {p.column}; }
  };
  return std::visit(Visitor{}, check);
}

CompiledPlans compile(const DependencySet& depset, const DatasetConfig& config, const Table& table) {
  config.validate(table);
  CompiledPlans out;
  const auto skip = [&](const Dependency& dependency, const std::string& why) {
    out.warnings.push_back("skipping " + dependency.id + ": " + why);
  };

  // device IRI -> sensors attached to it, for monitoring value columns.
  std::map<std::string, std::vector<std::string>> attached;
  // locality IRI -> (dependency id, bound column) in dependency order.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> localities;

  for (const auto& dependency : depset.dependencies) {
    if (const auto* link = std::get_if<DeviceLink>(&dependency.payload)) {
      attached[link->device].push_back(link->sensor);
    }
  }

  for (const auto& dependency : depset.dependencies) {
    const auto& id = dependency.id;
    std::visit(
        [&](const auto& payload) {
          using T = std::decay_t<decltype(payload)>;
          if constexpr (std::is_same_v<T, Denial>) {
            out.plans.push_back({id, DenialPlan{require_column(table, payload.lhs, id), require_column(table, payload.rhs, id)}});
          } else if constexpr (std::is_same_v<T, Matching>) {
            out.plans.push_back({id, MatchingPlan{require_column(table, payload.lhs, id),
                                                  require_column(table, payload.rhs, id), payload.threshold}});
          } else if constexpr (std::is_same_v<T, DeviceLink>) {
            if (!config.sensor_id_column || !config.device_id_column) {
              skip(dependency, "no sensor/device id columns configured");
              return;
            }
            out.plans.push_back({id, DeviceLinkPlan{*config.sensor_id_column, *config.device_id_column,
                                                    local_name(payload.sensor), local_name(payload.device)}});
          } else if constexpr (std::is_same_v<T, Temporal>) {
            const auto* from = lookup(config.timestamp_bindings, payload.predecessor);
            const auto* to = lookup(config.timestamp_bindings, payload.successor);
            if (from == nullptr || to == nullptr) {
              skip(dependency, "missing timestamp column binding");
              return;
            }
            out.plans.push_back({id, TemporalPlan{*from, *to}});
          } else if constexpr (std::is_same_v<T, Locality>) {
            const auto* column = lookup(config.column_bindings, payload.device);
            if (column == nullptr) {
              skip(dependency, "device has no column binding");
              return;
            }
            localities[payload.locality].emplace_back(id, require_numeric_column(table, *column, id));
          } else if constexpr (std::is_same_v<T, Monitoring>) {
            const auto* ts = lookup(config.timestamp_bindings, payload.device);
            if (ts == nullptr) {
              skip(dependency, "missing timestamp column binding");
              return;
            }
            MonitoringPlan plan{payload.device, *ts, {}, {}};
            if (const auto* own = lookup(config.column_bindings, payload.device)) plan.value_columns.push_back(*own);
            for (const auto& sensor : attached[payload.device]) {
              if (const auto* column = lookup(config.column_bindings, sensor)) plan.value_columns.push_back(*column);
            }
            std::sort(plan.value_columns.begin(), plan.value_columns.end());
            plan.value_columns.erase(std::unique(plan.value_columns.begin(), plan.value_columns.end()),
                                     plan.value_columns.end());
            if (plan.value_columns.empty()) {
              skip(dependency, "no value columns bound for the monitored device");
              return;
            }
            for (const auto& range : config.health_ranges) {
              if (range.device == payload.device) plan.unhealthy.push_back(range);
            }
            out.plans.push_back({id, std::move(plan)});
          } else if constexpr (std::is_same_v<T, Capability>) {
            const auto* column = lookup(config.column_bindings, payload.sensor);
            if (column == nullptr) {
              skip(dependency, "sensor has no column binding");
              return;
            }
            out.plans.push_back({id, CapabilityPlan{require_numeric_column(table, *column, id), payload.kind, payload.value}});
          }
        },
        dependency.payload);
  }

  for (const auto& [place, members] : localities) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (members[i].second == members[j].second) continue;  // same column bound twice
        out.plans.push_back({members[i].first, ColocationPlan{place, members[i].first, members[j].first,
                                                              members[i].second, members[j].second,
                                                              config.colocation_tolerance}});
      }
    }
  }
  return out;
}

}  // namespace ctxclean
