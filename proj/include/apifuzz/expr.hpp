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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/type.hpp"

namespace apifuzz {

/// An API-IR expression. `empty` only appears in receiver position and
/// stands for static or top-level access.
class Expr {
 public:
  enum class Kind : std::uint8_t { empty, constant, field_access, call, local_var };

  Expr() = default;

  static Expr empty() { return Expr(Kind::empty); }
  static Expr constant(Type t) {
    Expr e(Kind::constant);
    e.type_ = std::move(t);
    return e;
  }
  static Expr field_access(Expr receiver, DefId def) {
    Expr e(Kind::field_access);
    e.def_ = def;
    e.children_.push_back(std::move(receiver));
    return e;
  }
  static Expr call(Expr receiver, DefId def, std::vector<Type> type_args, std::vector<Expr> args) {
    Expr e(Kind::call);
    e.def_ = def;
    e.type_args_ = std::move(type_args);
    e.children_.reserve(args.size() + 1);
    e.children_.push_back(std::move(receiver));
    for (Expr& a : args) e.children_.push_back(std::move(a));
    return e;
  }
  static Expr local_var(std::string name, Type declared, Expr rhs) {
    Expr e(Kind::local_var);
    e.name_ = std::move(name);
    e.type_ = std::move(declared);
    e.children_.push_back(std::move(rhs));
    return e;
  }

  Kind kind() const { return kind_; }
  bool is_empty() const { return kind_ == Kind::empty; }
  bool is_constant() const { return kind_ == Kind::constant; }
  bool is_field_access() const { return kind_ == Kind::field_access; }
  bool is_call() const { return kind_ == Kind::call; }
  bool is_local_var() const { return kind_ == Kind::local_var; }

  /// Constant type or local variable declared type.
  const Type& type() const { return type_; }
  DefId def() const { return def_; }
  const std::string& name() const { return name_; }
  std::span<const Type> type_args() const { return type_args_; }

  const Expr& receiver() const { return children_.front(); }
  std::span<const Expr> args() const {
    if (kind_ != Kind::call) return {};
    return std::span<const Expr>(children_).subspan(1);
  }
  const Expr& rhs() const { return children_.front(); }

  /// Same node with this call's explicit type arguments replaced.
  Expr with_type_args(std::vector<Type> type_args) const {
    Expr e = *this;
    e.type_args_ = std::move(type_args);
    return e;
  }

  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  explicit Expr(Kind k) : kind_(k) {}

  Kind kind_ = Kind::empty;
  Type type_;
  DefId def_;
  std::string name_;
  std::vector<Type> type_args_;
  std::vector<Expr> children_;
};

/// Position inside a call-like statement that a typing fault or a checker
/// diagnostic refers to.
struct Slot {
  enum class Kind : std::uint8_t { receiver, argument, expected, type_arguments };
  Kind kind = Kind::receiver;
  std::size_t index = 0;  // argument position for Kind::argument

  static Slot receiver() { return {Kind::receiver, 0}; }
  static Slot argument(std::size_t i) { return {Kind::argument, i}; }
  static Slot expected() { return {Kind::expected, 0}; }
  static Slot type_arguments() { return {Kind::type_arguments, 0}; }

  friend bool operator==(const Slot&, const Slot&) = default;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

inline std::string to_string(const Slot& s) {
  switch (s.kind) {
    case Slot::Kind::receiver: return "receiver";
    case Slot::Kind::argument: return "arg" + std::to_string(s.index);
    case Slot::Kind::expected: return "expected";
    case Slot::Kind::type_arguments: return "type_arguments";
  }
  return "?";
}

/// A client program: a statement list plus provenance (library, component,
/// typing sequence, seed, mode...).
struct Program {
  std::vector<Expr> statements;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace apifuzz
