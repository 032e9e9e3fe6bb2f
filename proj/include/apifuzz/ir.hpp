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

// Canonical text form of API-IR programs.
//
//   # def: List.add
//   local var x: boolean = new List<Int>(constant(int)).add(constant(Int))
//
// Header lines carry metadata. Constructors print as `new C<...>(...)`,
// static members as `Owner.m`, free functions by name, instance members by
// name after their receiver. A `#<id>` suffix pins the definition when the
// name alone is ambiguous. Type variables print as `'<id>`.

#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/error.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/type_parser.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

namespace detail {

// Instance members named `name` visible on `recv`, nearest class first.
inline std::vector<const ApiDef*> members_named(const ApiSpec& spec, const Type& recv, std::string_view name) {
  std::vector<const ApiDef*> out;
  if (!recv.is_nominal()) return out;
  for (const Type& t : supertype_closure(spec, recv)) {
    const ClassDecl* c = spec.find_class(t.name());
    if (!c) continue;
    for (DefId id : c->members) {
      const ApiDef& d = spec.def(id);
      if (d.is_instance_member() && d.name == name) out.push_back(&d);
    }
  }
  return out;
}

// Sourceless definitions that print under the same reference text as `d`.
inline bool static_reference_unique(const ApiSpec& spec, const ApiDef& d) {
  for (const ApiDef& o : spec.defs()) {
    if (o.id == d.id || o.is_instance_member()) continue;
    if (o.owner == d.owner && o.is_constructor == d.is_constructor && (d.is_constructor || o.name == d.name))
      return false;
  }
  return true;
}

class IrPrinter {
 public:
  explicit IrPrinter(const ApiSpec& spec) : spec_(spec) {}

  std::string expr(const Expr& e) {
    std::string out;
    render(e, out);
    return out;
  }

 private:
  static void type_list(std::span<const Type> ts, std::string& out) {
    if (ts.empty()) return;
    out += '<';
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ',';
      out += to_ir_string(ts[i]);
    }
    out += '>';
  }

  void arg_list(std::span<const Expr> args, std::string& out) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      render(args[i], out);
    }
    out += ')';
  }

  std::string suffix(const ApiDef& d, bool unique) const {
    return unique ? std::string() : "#" + std::to_string(d.id.value);
  }

  void render(const Expr& e, std::string& out) {
    switch (e.kind()) {
      case Expr::Kind::empty: return;
      case Expr::Kind::constant:
        out += "constant(" + to_ir_string(e.type()) + ")";
        return;
      case Expr::Kind::local_var:
        out += "local var " + e.name() + ": " + to_ir_string(e.type()) + " = ";
        render(e.rhs(), out);
        return;
      case Expr::Kind::field_access:
      case Expr::Kind::call: break;
    }
    const ApiDef& d = spec_.def(e.def());
    if (e.receiver().is_empty()) {
      const bool unique = static_reference_unique(spec_, d);
      if (d.is_constructor) out += "new " + *d.owner + suffix(d, unique);
      else if (d.owner) out += *d.owner + "." + d.name + suffix(d, unique);
      else out += d.name + suffix(d, unique);
    } else {
      render(e.receiver(), out);
      out += '.';
      out += d.name;
      bool unique = false;
      if (auto rt = type_of(spec_, e.receiver())) {
        const auto named = members_named(spec_, *rt, d.name);
        unique = named.size() == 1 && named.front()->id == d.id;
      }
      out += suffix(d, unique);
    }
    if (e.is_call()) {
      type_list(e.type_args(), out);
      arg_list(e.args(), out);
    }
  }

  const ApiSpec& spec_;
};

class IrParser {
 public:
  IrParser(const ApiSpec& spec, std::string_view text) : spec_(spec), text_(text) {}

  Program program() {
    Program p;
    while (!at_end()) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '#') {
        ++pos_;
        const std::size_t eol = line_end();
        std::string line(text_.substr(pos_, eol - pos_));
        pos_ = eol;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("metadata line without ':'", pos_);
        p.metadata[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
        continue;
      }
      p.statements.push_back(statement());
      skip_spaces();
      if (!at_end() && peek() != '\n' && peek() != '\r')
        throw ParseError(std::string("unexpected '") + peek() + "' after statement", pos_);
    }
    return p;
  }

  Expr statement() {
    skip_spaces();
    if (consume_word("local")) {
      skip_spaces();
      if (!consume_word("var")) throw ParseError("expected 'var'", pos_);
      skip_spaces();
      std::string name = identifier();
      skip_spaces();
      expect(':');
      Type t = type();
      skip_spaces();
      expect('=');
      Expr rhs = expr();
      return Expr::local_var(std::move(name), std::move(t), std::move(rhs));
    }
    return expr();
  }

 private:
  struct Segment {
    std::string name;
    std::optional<std::uint32_t> id;
  };

  Expr expr() {
    skip_spaces();
    Expr e = primary();
    return postfix(std::move(e), {});
  }

  Expr primary() {
    if (starts_with("constant(")) {
      pos_ += 9;
      Type t = type();
      skip_spaces();
      expect(')');
      return Expr::constant(std::move(t));
    }
    if (consume_word("new")) {
      skip_spaces();
      std::vector<Segment> chain = segments();
      std::string owner;
      for (std::size_t i = 0; i < chain.size(); ++i) owner += (i ? "." : "") + chain[i].name;
      const ApiDef& d = static_def(owner, std::nullopt, chain.back().id, true);
      return call_rest(Expr::empty(), d);
    }
    std::vector<Segment> chain = segments();
    // Longest prefix naming a class selects a static member; otherwise the
    // first segment is a free function.
    std::size_t k = chain.size();
    std::string owner;
    while (k > 0) {
      std::string cand;
      for (std::size_t i = 0; i < k; ++i) cand += (i ? "." : "") + chain[i].name;
      if (k < chain.size() && spec_.find_class(cand)) {
        owner = cand;
        break;
      }
      --k;
    }
    Expr e;
    std::size_t next;
    if (!owner.empty()) {
      const ApiDef& d = static_def(owner, chain[k].name, chain[k].id, false);
      e = member_rest(Expr::empty(), d, k + 1 == chain.size());
      next = k + 1;
    } else {
      const ApiDef& d = static_def("", chain[0].name, chain[0].id, false);
      e = member_rest(Expr::empty(), d, chain.size() == 1);
      next = 1;
    }
    std::vector<Segment> rest(chain.begin() + static_cast<std::ptrdiff_t>(next), chain.end());
    return postfix(std::move(e), std::move(rest));
  }

  // Instance member accesses: the pending `chain` first, then `.name...`.
  Expr postfix(Expr e, std::vector<Segment> chain) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const ApiDef& d = instance_def(e, chain[i]);
      e = member_rest(std::move(e), d, i + 1 == chain.size());
    }
    while (true) {
      skip_spaces();
      if (at_end() || peek() != '.') return e;
      ++pos_;
      Segment s = segment();
      const ApiDef& d = instance_def(e, s);
      e = member_rest(std::move(e), d, true);
    }
  }

  // Parses optional type arguments and argument list for a member reached
  // by `d`; only the last segment of a chain may carry them.
  Expr member_rest(Expr recv, const ApiDef& d, bool last) {
    if (d.is_field()) return Expr::field_access(std::move(recv), d.id);
    if (!last) throw ParseError("call to " + d.name + " needs an argument list", pos_);
    return call_rest(std::move(recv), d);
  }

  Expr call_rest(Expr recv, const ApiDef& d) {
    std::vector<Type> type_args;
    skip_spaces();
    if (!at_end() && peek() == '<') {
      ++pos_;
      while (true) {
        type_args.push_back(type());
        skip_spaces();
        if (!at_end() && peek() == ',') {
          ++pos_;
          continue;
        }
        expect('>');
        break;
      }
    }
    skip_spaces();
    expect('(');
    std::vector<Expr> args;
    skip_spaces();
    if (!at_end() && peek() == ')') {
      ++pos_;
    } else {
      while (true) {
        args.push_back(expr());
        skip_spaces();
        if (!at_end() && peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
    }
    return Expr::call(std::move(recv), d.id, std::move(type_args), std::move(args));
  }

  const ApiDef& by_id(std::uint32_t id) {
    const ApiDef* d = spec_.find_def(DefId{id});
    if (!d) throw ParseError("unknown definition #" + std::to_string(id), pos_);
    return *d;
  }

  const ApiDef& static_def(const std::string& owner, const std::optional<std::string>& name,
                           std::optional<std::uint32_t> id, bool ctor) {
    if (id) return by_id(*id);
    const ApiDef* found = nullptr;
    for (const ApiDef& d : spec_.defs()) {
      if (d.is_instance_member() || d.is_constructor != ctor) continue;
      if (owner.empty() ? d.owner.has_value() : d.owner != owner) continue;
      if (!ctor && d.name != *name) continue;
      if (found) throw ParseError("ambiguous reference to " + (owner.empty() ? *name : owner), pos_);
      found = &d;
    }
    if (!found)
      throw ParseError("no " + std::string(ctor ? "constructor of " + owner
                                                 : "definition " + (owner.empty() ? "" : owner + ".") + *name),
                       pos_);
    return *found;
  }

  const ApiDef& instance_def(const Expr& recv, const Segment& s) {
    if (s.id) return by_id(*s.id);
    auto rt = type_of(spec_, recv);
    if (!rt) throw ParseError("cannot resolve member " + s.name + " on an ill-typed receiver", pos_);
    const auto named = members_named(spec_, *rt, s.name);
    if (named.size() != 1)
      throw ParseError((named.empty() ? "no member " : "ambiguous member ") + s.name + " on " + to_string(*rt), pos_);
    return *named.front();
  }

  std::vector<Segment> segments() {
    std::vector<Segment> out{segment()};
    while (pos_ + 1 < text_.size() && peek() == '.' && TypeExprParser::is_ident_char(text_[pos_ + 1])) {
      ++pos_;
      out.push_back(segment());
    }
    return out;
  }

  Segment segment() {
    Segment s{identifier(), std::nullopt};
    if (!at_end() && peek() == '#') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (start == pos_) throw ParseError("expected definition id after '#'", pos_);
      s.id = static_cast<std::uint32_t>(std::stoul(std::string(text_.substr(start, pos_ - start))));
    }
    return s;
  }

  Type type() {
    static const TypeScope no_scope;
    TypeExprParser p(text_, no_scope, pos_);
    Type t = p.parse();
    pos_ = p.position();
    return t;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (!at_end() && TypeExprParser::is_ident_char(peek())) ++pos_;
    if (start == pos_) {
      if (at_end()) throw ParseError("unexpected end of input", pos_);
      throw ParseError(std::string("expected identifier but found '") + peek() + "'", pos_);
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  bool consume_word(std::string_view w) {
    if (!starts_with(w)) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && TypeExprParser::is_ident_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  void expect(char c) {
    skip_spaces();
    if (at_end() || peek() != c) {
      throw ParseError(std::string("expected '") + c + "'" + (at_end() ? std::string(" at end") : std::string(" but found '") + peek() + "'"), pos_);
    }
    ++pos_;
  }

  std::size_t line_end() const {
    const std::size_t n = text_.find('\n', pos_);
    return n == std::string_view::npos ? text_.size() : n;
  }
  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_blank_lines() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  const ApiSpec& spec_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string print_ir(const ApiSpec& spec, const Expr& e) { return detail::IrPrinter(spec).expr(e); }

/// Metadata header lines followed by one statement per line.
inline std::string print_ir(const ApiSpec& spec, const Program& p) {
  std::string out;
  for (const auto& [k, v] : p.metadata) out += "# " + k + ": " + v + "\n";
  detail::IrPrinter printer(spec);
  for (const Expr& s : p.statements) out += printer.expr(s) + "\n";
  return out;
}

inline Program parse_ir(const ApiSpec& spec, std::string_view text) { return detail::IrParser(spec, text).program(); }

}  // namespace apifuzz
