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

#include "ctxclean/triple_store.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace ctxclean {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

bool is_local_name(std::string_view s) { return std::all_of(s.begin(), s.end(), is_name_char); }

enum class TokenKind { kIri, kPrefixedName, kBlank, kString, kNumber, kA, kPrefixKeyword, kDot, kSemicolon, kComma, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    const std::size_t line = line_;
    const std::size_t column = column_;
    if (pos_ >= text_.size()) return {TokenKind::kEnd, "", line, column};

    const char c = text_[pos_];
    switch (c) {
      case '.':
        advance();
        return {TokenKind::kDot, ".", line, column};
      case ';':
        advance();
        return {TokenKind::kSemicolon, ";", line, column};
      case ',':
        advance();
        return {TokenKind::kComma, ",", line, column};
      case '<':
        return lex_iri(line, column);
      case '"':
        return lex_string(line, column);
      case '@':
        return lex_directive(line, column);
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '+' || c == '-') return lex_number(line, column);
    if (c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
      advance(2);
      std::string label = take_while(is_name_char);
      if (label.empty()) throw ParseError(line, column, "empty blank node label");
      return {TokenKind::kBlank, std::move(label), line, column};
    }
    if (is_name_char(c) || c == ':') return lex_name(line, column);
    throw ParseError(line, column, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::string out;
    while (pos_ < text_.size() && pred(text_[pos_])) {
      out.push_back(text_[pos_]);
      advance();
    }
    return out;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_iri(std::size_t line, std::size_t column) {
    advance();  // '<'
    std::string iri;
    while (true) {
      if (pos_ >= text_.size()) throw ParseError(line, column, "unterminated IRI");
      const char c = text_[pos_];
      if (c == '>') break;
      if (std::isspace(static_cast<unsigned char>(c)) != 0 || c == '<' || c == '"') {
        throw ParseError(line_, column_, "invalid character in IRI");
      }
      iri.push_back(c);
      advance();
    }
    advance();  // '>'
    return {TokenKind::kIri, std::move(iri), line, column};
  }

  Token lex_string(std::size_t line, std::size_t column) {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw ParseError(line, column, "unterminated string literal");
      const char c = text_[pos_];
      if (c == '\n') throw ParseError(line_, column_, "newline in string literal");
      if (c == '"') break;
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) throw ParseError(line, column, "unterminated string literal");
        switch (text_[pos_]) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: throw ParseError(line_, column_, "unknown escape sequence");
        }
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
    advance();  // closing quote
    return {TokenKind::kString, std::move(out), line, column};
  }

  Token lex_directive(std::size_t line, std::size_t column) {
    advance();  // '@'
    std::string word = take_while([](char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0; });
    if (word != "prefix") throw ParseError(line, column, "unknown directive '@" + word + "'");
    return {TokenKind::kPrefixKeyword, "@prefix", line, column};
  }

  Token lex_number(std::size_t line, std::size_t column) {
    std::string out;
    if (text_[pos_] == '+' || text_[pos_] == '-') {
      out.push_back(text_[pos_]);
      advance();
    }
    const auto is_digit = [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; };
    std::string digits = take_while(is_digit);
    if (digits.empty()) throw ParseError(line, column, "malformed number");
    out += digits;
    // A '.' only belongs to the number when a digit follows; otherwise it ends the statement.
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
      out.push_back('.');
      advance();
      out += take_while(is_digit);
    }
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
      throw ParseError(line_, column_, "malformed number");
    }
    return {TokenKind::kNumber, std::move(out), line, column};
  }

  Token lex_name(std::size_t line, std::size_t column) {
    std::string prefix = take_while(is_name_char);
    if (pos_ < text_.size() && text_[pos_] == ':') {
      advance();
      std::string local = take_while(is_name_char);
      return {TokenKind::kPrefixedName, prefix + ":" + local, line, column};
    }
    if (prefix == "a") return {TokenKind::kA, "a", line, column};
    throw ParseError(line, column, "expected prefixed name, got '" + prefix + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  TripleGraph run() {
    while (current_.kind != TokenKind::kEnd) {
      if (current_.kind == TokenKind::kPrefixKeyword) {
        prefix_declaration();
      } else {
        statement();
      }
    }
    return std::move(graph_);
  }

 private:
  void shift() { current_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(current_.line, current_.column, message);
  }

  void expect(TokenKind kind, const char* what) {
    if (current_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  void prefix_declaration() {
    shift();
    if (current_.kind != TokenKind::kPrefixedName || current_.text.back() != ':') {
      fail("expected prefix name ending in ':'");
    }
    std::string name = current_.text.substr(0, current_.text.size() - 1);
    shift();
    if (current_.kind != TokenKind::kIri) fail("expected <IRI> in prefix declaration");
    graph_.set_prefix(std::move(name), current_.text);
    shift();
    expect(TokenKind::kDot, "'.' after prefix declaration");
  }

  Term resolve_name() {
    auto expanded = graph_.expand(current_.text);
    if (!expanded) {
      const auto colon = current_.text.find(':');
      fail("unresolved prefix '" + current_.text.substr(0, colon + 1) + "'");
    }
    return Term::Iri(std::move(*expanded));
  }

  Term subject() {
    Term term = Term::Iri("");
    switch (current_.kind) {
      case TokenKind::kIri: term = Term::Iri(current_.text); break;
      case TokenKind::kPrefixedName: term = resolve_name(); break;
      case TokenKind::kBlank: term = Term::Blank(current_.text); break;
      default: fail("expected subject (IRI or blank node)");
    }
    shift();
    return term;
  }

  Term verb() {
    Term term = Term::Iri("");
    switch (current_.kind) {
      case TokenKind::kIri: term = Term::Iri(current_.text); break;
      case TokenKind::kPrefixedName: term = resolve_name(); break;
      case TokenKind::kA: term = Term::Iri(std::string(kRdfType)); break;
      default: fail("expected predicate IRI");
    }
    shift();
    return term;
  }

  Term object() {
    Term term = Term::Iri("");
    switch (current_.kind) {
      case TokenKind::kIri: term = Term::Iri(current_.text); break;
      case TokenKind::kPrefixedName: term = resolve_name(); break;
      case TokenKind::kBlank: term = Term::Blank(current_.text); break;
      case TokenKind::kString:
      case TokenKind::kNumber: term = Term::Literal(current_.text); break;
      default: fail("expected object");
    }
    shift();
    return term;
  }

  void statement() {
    const Term subj = subject();
    while (true) {
      const Term pred = verb();
      while (true) {
        graph_.insert(Triple{subj, pred, object()});
        if (current_.kind != TokenKind::kComma) break;
        shift();
      }
      if (current_.kind != TokenKind::kSemicolon) break;
      shift();
      // A trailing ';' before '.' is allowed.
      if (current_.kind == TokenKind::kDot) break;
    }
    expect(TokenKind::kDot, "'.' at end of statement");
  }

  Lexer lexer_;
  Token current_{TokenKind::kEnd, "", 1, 1};
  TripleGraph graph_;
};

std::string escape_literal(const std::string& text) {
  std::string out = "\"";
  for (const char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string write_iri(const TripleGraph& graph, const std::string& iri) {
  const std::string* best_name = nullptr;
  std::size_t best_len = 0;
  for (const auto& [name, base] : graph.prefixes()) {
    if (base.size() >= best_len && iri.starts_with(base) && is_local_name(std::string_view(iri).substr(base.size()))) {
      if (best_name == nullptr || base.size() > best_len) {
        best_name = &name;
        best_len = base.size();
      }
    }
  }
  if (best_name != nullptr) return *best_name + ":" + iri.substr(best_len);
  return "<" + iri + ">";
}

std::string write_term(const TripleGraph& graph, const Term& term) {
  switch (term.kind()) {
    case Term::Kind::kIri: return write_iri(graph, term.text());
    case Term::Kind::kBlank: return "_:" + term.text();
    case Term::Kind::kLiteral: return term.numeric() ? term.text() : escape_literal(term.text());
  }
  return {};
}

bool bind(const PatternTerm& pattern, const Term& term, Binding& binding) {
  if (const auto* ground = std::get_if<Term>(&pattern)) return *ground == term;
  const auto& name = std::get<Wildcard>(pattern).name;
  auto [it, inserted] = binding.try_emplace(name, term);
  return inserted || it->second == term;
}

}  // namespace

bool is_decimal_literal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  const auto digits = [&] {
    const std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) != 0) ++i;
    return i - start;
  };
  if (digits() == 0) return false;
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (digits() == 0) return false;
  }
  return i == text.size();
}

std::optional<double> Term::numeric() const {
  if (kind_ != Kind::kLiteral || !is_decimal_literal(text_)) return std::nullopt;
  // from_chars rejects a leading '+'.
  std::string_view view = text_;
  if (view.front() == '+') view.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc() || ptr != view.data() + view.size()) return std::nullopt;
  return value;
}

bool TripleGraph::insert(Triple triple) {
  if (triple.subject.is_literal()) throw DataError("triple subject must be an IRI or blank node: " + triple.subject.text());
  if (!triple.predicate.is_iri()) throw DataError("triple predicate must be an IRI: " + triple.predicate.text());
  return triples_.insert(std::move(triple)).second;
}

std::optional<std::string> TripleGraph::expand(std::string_view name) const {
  if (name.size() >= 2 && name.front() == '<' && name.back() == '>') return std::string(name.substr(1, name.size() - 2));
  const auto colon = name.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto it = prefixes_.find(std::string(name.substr(0, colon)));
  if (it == prefixes_.end()) return std::nullopt;
  return it->second + std::string(name.substr(colon + 1));
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

TripleGraph parse_context(std::string_view text) { return Parser(text).run(); }

std::string serialize(const TripleGraph& graph) {
  std::ostringstream out;
  for (const auto& [name, base] : graph.prefixes()) out << "@prefix " << name << ": <" << base << "> .\n";
  if (!graph.prefixes().empty() && !graph.empty()) out << '\n';
  for (const auto& triple : graph) {
    out << write_term(graph, triple.subject) << ' ';
    out << (triple.predicate.text() == kRdfType ? std::string("a") : write_term(graph, triple.predicate)) << ' ';
    out << write_term(graph, triple.object) << " .\n";
  }
  return out.str();
}

std::vector<Binding> match_pattern(const TripleGraph& graph, const TriplePattern& pattern) {
  std::vector<Binding> out;
  for (const auto& triple : graph) {
    Binding binding;
    if (bind(pattern.subject, triple.subject, binding) && bind(pattern.predicate, triple.predicate, binding) &&
        bind(pattern.object, triple.object, binding)) {
      out.push_back(std::move(binding));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ChangeEvent> diff(const TripleGraph& old_graph, const TripleGraph& next_graph, std::uint64_t first_sequence) {
  std::vector<ChangeEvent> events;
  std::uint64_t sequence = first_sequence;
  for (const auto& triple : old_graph) {
    if (!next_graph.contains(triple)) events.push_back({ChangeKind::kDelete, triple, sequence++});
  }
  for (const auto& triple : next_graph) {
    if (!old_graph.contains(triple)) events.push_back({ChangeKind::kInsert, triple, sequence++});
  }
  return events;
}

TripleGraph apply_events(TripleGraph graph, std::span<const ChangeEvent> events) {
  for (const auto& event : events) {
    if (event.kind == ChangeKind::kInsert) {
      graph.insert(event.triple);
    } else {
      graph.erase(event.triple);
    }
  }
  return graph;
}

std::shared_ptr<const TripleGraph> GraphStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::vector<ChangeEvent> GraphStore::update(TripleGraph next) {
  std::lock_guard lock(mutex_);
  auto events = diff(*current_, next, next_sequence_);
  next_sequence_ += events.size();
  current_ = std::make_shared<const TripleGraph>(std::move(next));
  return events;
}

}  // namespace ctxclean
