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

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctxclean/error.h"

namespace ctxclean {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

// A node of the context graph. IRIs are always held in expanded form, so two
// spellings that expand to the same IRI are the same term.
class Term {
 public:
  enum class Kind : std::uint8_t { kIri, kLiteral, kBlank };

  static Term Iri(std::string expanded) { return Term(Kind::kIri, std::move(expanded)); }
  static Term Literal(std::string text) { return Term(Kind::kLiteral, std::move(text)); }
  static Term Blank(std::string label) { return Term(Kind::kBlank, std::move(label)); }

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  bool is_iri() const { return kind_ == Kind::kIri; }
  bool is_literal() const { return kind_ == Kind::kLiteral; }
  bool is_blank() const { return kind_ == Kind::kBlank; }

  // Decimal value of a literal whose text is a bare decimal number
  // ([+-]?digits[.digits]); nullopt for anything else, including IRIs.
  std::optional<double> numeric() const;

  // Ordered by text first so that sorted containers list terms by their
  // expanded spelling.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.text_ <=> b.text_; c != 0) return c;
    return a.kind_ <=> b.kind_;
  }
  friend bool operator==(const Term& a, const Term& b) = default;

 private:
  Term(Kind kind, std::string text) : kind_(kind), text_(std::move(text)) {}

  Kind kind_;
  std::string text_;
};

// True when `text` is a bare decimal literal as accepted by the context syntax.
bool is_decimal_literal(std::string_view text);

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

class TripleGraph {
 public:
  using Prefixes = std::map<std::string, std::string>;
  using const_iterator = std::set<Triple>::const_iterator;

  // Returns false if the triple was already present. Throws DataError when the
  // subject is a literal or the predicate is not an IRI.
  bool insert(Triple triple);
  bool erase(const Triple& triple) { return triples_.erase(triple) > 0; }
  bool contains(const Triple& triple) const { return triples_.contains(triple); }

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }

  const Prefixes& prefixes() const { return prefixes_; }
  void set_prefix(std::string name, std::string base) { prefixes_[std::move(name)] = std::move(base); }

  // Expands `prefix:local` using the declared prefixes. Absolute IRIs written
  // in angle brackets are returned without the brackets.
  std::optional<std::string> expand(std::string_view name) const;

  // Prefixes are presentation only; graphs are equal when their triple sets are.
  friend bool operator==(const TripleGraph& a, const TripleGraph& b) { return a.triples_ == b.triples_; }

 private:
  std::set<Triple> triples_;
  Prefixes prefixes_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Parses the terse triple syntax: @prefix declarations, `.`-terminated
// statements, `;` predicate lists, `,` object lists, quoted literals, bare
// decimals and `a` for rdf:type.
TripleGraph parse_context(std::string_view text);

// Canonical text: prefixes sorted by name, then one statement per line in
// (subject, predicate, object) order of expanded text.
std::string serialize(const TripleGraph& graph);

struct Wildcard {
  std::string name;
};
using PatternTerm = std::variant<Term, Wildcard>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

using Binding = std::map<std::string, Term>;

// Every assignment of the pattern's wildcards that yields a triple of the
// graph, sorted by the bound terms. A repeated wildcard name must bind the
// same term at each position.
std::vector<Binding> match_pattern(const TripleGraph& graph, const TriplePattern& pattern);

enum class ChangeKind : std::uint8_t { kInsert, kDelete };

struct ChangeEvent {
  ChangeKind kind;
  Triple triple;
  std::uint64_t sequence;

  friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

// Deletes (old minus next) followed by inserts (next minus old), each block
// in triple order, numbered from `first_sequence`.
std::vector<ChangeEvent> diff(const TripleGraph& old_graph, const TripleGraph& next_graph,
                              std::uint64_t first_sequence = 0);

TripleGraph apply_events(TripleGraph graph, std::span<const ChangeEvent> events);

// Holds the current context graph for one writer and any number of readers.
// Readers get immutable snapshots; update() swaps in a new graph and reports
// the change events, with sequence numbers increasing across updates.
class GraphStore {
 public:
  GraphStore() : current_(std::make_shared<const TripleGraph>()) {}
  explicit GraphStore(TripleGraph initial) : current_(std::make_shared<const TripleGraph>(std::move(initial))) {}

  std::shared_ptr<const TripleGraph> snapshot() const;
  std::vector<ChangeEvent> update(TripleGraph next);

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const TripleGraph> current_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace ctxclean
