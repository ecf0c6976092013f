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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctxclean/table.h"
#include "ctxclean/triple_store.h"

namespace ctxclean {

// Context vocabulary. All predicates live under one namespace.
namespace vocab {
inline constexpr std::string_view kNamespace = "https://ctxclean.dev/vocab#";

inline constexpr std::string_view kHasDevice = "hasDevice";
inline constexpr std::string_view kHasSensingDevice = "hasSensingDevice";
inline constexpr std::string_view kHasSensor = "hasSensor";
inline constexpr std::string_view kAttachedTo = "attachedTo";
inline constexpr std::string_view kDeployedAt = "deployedAt";
inline constexpr std::string_view kAtLocation = "atLocation";
inline constexpr std::string_view kSendsTo = "sendsTo";
inline constexpr std::string_view kMonitoredBy = "monitoredBy";
inline constexpr std::string_view kHasMetadata = "hasMetadata";
inline constexpr std::string_view kMetadataType = "metadataType";
inline constexpr std::string_view kMetadataValue = "metadataValue";
inline constexpr std::string_view kDetermines = "determines";
inline constexpr std::string_view kMatchesSimilar = "matchesSimilar";
inline constexpr std::string_view kSimilarTo = "similarTo";
inline constexpr std::string_view kThreshold = "threshold";
inline constexpr std::string_view kMapsToColumn = "mapsToColumn";
inline constexpr std::string_view kTimestampColumn = "timestampColumn";

std::string iri(std::string_view local);
}  // namespace vocab

// Text after the last '#', '/' or ':' of an IRI.
std::string local_name(std::string_view iri);

enum class DependencyKind { kDenial, kMatching, kDeviceLink, kTemporal, kLocality, kMonitoring, kCapability };
std::string_view to_string(DependencyKind kind);

// lhs determines rhs: equal lhs values force equal rhs values.
struct Denial {
  std::string lhs;
  std::string rhs;
  friend bool operator==(const Denial&, const Denial&) = default;
};

// Rows with equal lhs must have rhs values at least `threshold` similar.
struct Matching {
  std::string lhs;
  std::string rhs;
  double threshold = 1.0;  // fraction in (0, 1]
  friend bool operator==(const Matching&, const Matching&) = default;
};

struct DeviceLink {
  std::string sensor;
  std::string device;
  friend bool operator==(const DeviceLink&, const DeviceLink&) = default;
};

// Messages flow from predecessor to successor, so the predecessor's
// timestamp must be strictly earlier.
struct Temporal {
  std::string predecessor;
  std::string successor;
  friend bool operator==(const Temporal&, const Temporal&) = default;
};

struct Locality {
  std::string device;
  std::string locality;
  friend bool operator==(const Locality&, const Locality&) = default;
};

struct Monitoring {
  std::string device;
  std::string monitor;
  friend bool operator==(const Monitoring&, const Monitoring&) = default;
};

enum class CapabilityKind { kMin, kMax, kResolution };
std::string_view to_string(CapabilityKind kind);

struct Capability {
  std::string sensor;
  CapabilityKind kind = CapabilityKind::kMin;
  double value = 0.0;
  friend bool operator==(const Capability&, const Capability&) = default;
};

// Alternative order matches DependencyKind.
using DependencyPayload = std::variant<Denial, Matching, DeviceLink, Temporal, Locality, Monitoring, Capability>;

struct Dependency {
  std::string id;
  DependencyPayload payload;

  DependencyKind kind() const { return static_cast<DependencyKind>(payload.index()); }
  // Human-readable parameter list, e.g. "lhs=ZipCode rhs=City".
  std::string parameters() const;

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

struct DependencySet {
  std::vector<Dependency> dependencies;  // sorted by kind, then id
  std::map<std::string, std::vector<Triple>> provenance;

  std::size_t size() const { return dependencies.size(); }
  bool empty() const { return dependencies.empty(); }
  const Dependency* find(std::string_view id) const;

  friend bool operator==(const DependencySet&, const DependencySet&) = default;
};

class VocabularyError : public DataError {
 public:
  VocabularyError(const std::string& message, std::vector<Triple> offending);
  const std::vector<Triple>& offending() const { return offending_; }

 private:
  std::vector<Triple> offending_;
};

// Queries the graph for every dependency kind. Throws VocabularyError listing
// all offending triples when the vocabulary is used inconsistently.
DependencySet extract_all(const TripleGraph& graph);

// Brings `current` (extracted from the graph before `events`) up to date with
// `graph_after`. Only kinds whose predicates appear in the events are queried
// again; the result equals extract_all(graph_after).
DependencySet refresh(const DependencySet& current, const TripleGraph& graph_after,
                      std::span<const ChangeEvent> events);

// Adds mapsToColumn / timestampColumn hints from the graph to the config.
// Entries already present in the config win.
DatasetConfig merge_binding_hints(const TripleGraph& graph, DatasetConfig config);

struct DenialPlan {
  std::string lhs_column;
  std::string rhs_column;
};

struct MatchingPlan {
  std::string lhs_column;
  std::string rhs_column;
  double threshold = 1.0;
};

// Long-format check: rows naming `sensor_name` in the sensor id column must
// name `device_name` in the device id column.
struct DeviceLinkPlan {
  std::string sensor_column;
  std::string device_column;
  std::string sensor_name;
  std::string device_name;
};

struct TemporalPlan {
  std::string predecessor_column;
  std::string successor_column;
};

// Two sensors deployed at the same locality. Findings on first_column are
// attributed to first_dependency and likewise for the second.
struct ColocationPlan {
  std::string locality;
  std::string first_dependency;
  std::string second_dependency;
  std::string first_column;
  std::string second_column;
  double tolerance = 5.0;
};

struct MonitoringPlan {
  std::string device;
  std::string timestamp_column;
  std::vector<std::string> value_columns;
  std::vector<HealthRange> unhealthy;
};

struct CapabilityPlan {
  std::string column;
  CapabilityKind kind = CapabilityKind::kMin;
  double value = 0.0;
};

using Check = std::variant<DenialPlan, MatchingPlan, DeviceLinkPlan, TemporalPlan, ColocationPlan, MonitoringPlan,
                           CapabilityPlan>;

struct CheckPlan {
  std::string dependency_id;  // first dependency for co-location plans
  Check check;

  std::vector<std::string> bound_columns() const;
};

struct CompiledPlans {
  std::vector<CheckPlan> plans;
  std::vector<std::string> warnings;  // dependencies skipped for lack of bindings
};

// Binds dependencies to the table's columns. Dependencies without bindings
// are skipped with a warning; a binding or column name the table lacks is a
// ConfigError.
CompiledPlans compile(const DependencySet& depset, const DatasetConfig& config, const Table& table);

}  // namespace ctxclean
