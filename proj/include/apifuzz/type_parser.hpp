// Copyright 2026 The apifuzz Authors
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

// Type expression grammar:
//
//   TypeExpr := Name | Name "<" TypeExpr {"," TypeExpr} ">"
//   Name     := Ident {"." Ident}
//
// Whitespace between tokens is insignificant. `$top` and `$bottom` denote
// the universal types and `'<id>` a type variable by qualified id (the form
// to_ir_string() prints).

#pragma once

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apifuzz/error.hpp"
#include "apifuzz/type.hpp"

namespace apifuzz {

/// Type variables visible while parsing: short name -> qualified id.
/// Later entries shadow earlier ones.
class TypeScope {
 public:
  TypeScope() = default;
  explicit TypeScope(std::span<const std::string> names) {
    for (const auto& n : names) add(n, n);
  }

  void add(std::string short_name, std::string id) {
    vars_.emplace_back(std::move(short_name), std::move(id));
  }
  const std::string* find(std::string_view short_name) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (it->first == short_name) return &it->second;
    return nullptr;
  }

 private:
  std::vector<std::pair<std::string, std::string>> vars_;
};

/// Cursor-based parser; used directly by the IR parser to read types embedded
/// in larger text.
class TypeExprParser {
 public:
  TypeExprParser(std::string_view text, const TypeScope& scope, std::size_t pos = 0)
      : text_(text), scope_(scope), pos_(pos) {}

  Type parse() {
    skip_ws();
    if (at_end()) throw ParseError("expected type expression", pos_);
    if (peek() == '\'') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (is_ident_char(peek()) || peek() == '.' || peek() == '#')) ++pos_;
      if (pos_ == start) throw ParseError("expected type variable id", pos_);
      return Type::variable(std::string(text_.substr(start, pos_ - start)));
    }
    std::string name = parse_name();
    if (name == "$top") return Type::top();
    if (name == "$bottom") return Type::bottom();
    skip_ws();
    if (!at_end() && peek() == '<') {
      const std::size_t open = pos_;
      ++pos_;
      std::vector<Type> args;
      while (true) {
        args.push_back(parse());
        skip_ws();
        if (at_end()) throw ParseError("unbalanced angle brackets: '<' never closed", open);
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == '>') {
          ++pos_;
          break;
        }
        throw ParseError(std::string("expected ',' or '>' but found '") + peek() + "'", pos_);
      }
      return Type::instance(std::move(name), std::move(args));
    }
    if (name.find('.') == std::string::npos) {
      if (const std::string* id = scope_.find(name)) return Type::variable(*id);
    }
    return Type::class_type(std::move(name));
  }

  std::size_t position() const { return pos_; }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           (static_cast<unsigned char>(c) & 0x80);
  }

 private:
  std::string parse_name() {
    std::string name;
    while (true) {
      const std::size_t start = pos_;
      while (!at_end() && is_ident_char(peek())) ++pos_;
      if (pos_ == start) {
        if (at_end()) throw ParseError("unexpected end of type expression", pos_);
        if (peek() == '>') throw ParseError("unbalanced angle brackets: unexpected '>'", pos_);
        throw ParseError(std::string("expected identifier but found '") + peek() + "'", pos_);
      }
      name.append(text_.substr(start, pos_ - start));
      if (!at_end() && peek() == '.' && pos_ + 1 < text_.size() && is_ident_char(text_[pos_ + 1])) {
        name += '.';
        ++pos_;
        continue;
      }
      return name;
    }
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  const TypeScope& scope_;
  std::size_t pos_;
};

/// Parses a complete type expression. Names in `scope` become type variables;
/// every other name is a class reference, resolved later against a spec.
inline Type parse_type_expr(std::string_view text, const TypeScope& scope = {}) {
  TypeExprParser p(text, scope);
  Type t = p.parse();
  std::size_t pos = p.position();
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos < text.size()) {
    if (text[pos] == '>') throw ParseError("unbalanced angle brackets: unexpected '>'", pos);
    throw ParseError(std::string("unexpected trailing '") + text[pos] + "'", pos);
  }
  return t;
}

inline Type parse_type_expr(std::string_view text, std::span<const std::string> in_scope_vars) {
  return parse_type_expr(text, TypeScope(in_scope_vars));
}

}  // namespace apifuzz
