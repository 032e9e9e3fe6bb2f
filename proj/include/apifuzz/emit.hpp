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

// Source emission. A dialect is a table of syntax templates; the renderer
// below is shared by all of them. Templates use `{name}` placeholders.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/error.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/ir.hpp"
#include "apifuzz/rng.hpp"
#include "apifuzz/type.hpp"

namespace apifuzz {

struct DialectProfile {
  std::string name;
  std::string extension;
  std::string generic_open = "<";
  std::string generic_close = ">";
  std::string type_arg_separator = ", ";
  /// Constant as the whole right-hand side of a declaration, e.g. `TODO()`.
  std::string constant_decl;
  /// Constant anywhere else; must carry its type. `{type}`.
  std::string constant_expr;
  /// `{name}`, `{type}`, `{expr}`.
  std::string local_var;
  std::string statement_end;
  std::string new_keyword;  // e.g. "new " or empty
  /// Explicit type arguments before the member name (`recv.<T>m()`).
  bool type_args_before_name = false;
  /// Constructor whose type arguments were erased: `new C<>()` vs `C()`.
  bool diamond_on_erased_constructor = false;
  std::string top_type;
  std::string bottom_type;
  std::string comment_prefix = "//";
  std::string import_line;  // `{name}`
  /// `{unit}`, `{imports}`, `{body}`, `{header}`.
  std::string file_template;
  std::string body_indent = "    ";
  std::vector<std::string> reserved;
  /// Passes the canonical IR through instead of rendering.
  bool canonical_ir = false;
};

inline const std::vector<DialectProfile>& dialect_profiles() {
  static const std::vector<DialectProfile> profiles = [] {
    std::vector<DialectProfile> v;

    DialectProfile ir;
    ir.name = "ir";
    ir.extension = "ir";
    ir.canonical_ir = true;
    v.push_back(ir);

    DialectProfile kt;
    kt.name = "kotlin-like";
    kt.extension = "kt";
    kt.constant_decl = "TODO()";
    kt.constant_expr = "(TODO() as {type})";
    kt.local_var = "val {name}: {type} = {expr}";
    kt.top_type = "Any?";
    kt.bottom_type = "Nothing";
    kt.import_line = "import {name}";
    kt.file_template = "{header}package {unit}\n{imports}\nfun test() {\n{body}}\n";
    kt.reserved = {"as", "break", "class", "continue", "do", "else", "false", "for", "fun", "if", "in",
                   "interface", "is", "null", "object", "package", "return", "super", "this", "throw",
                   "true", "try", "typealias", "typeof", "val", "var", "when", "while"};
    v.push_back(kt);

    DialectProfile sc;
    sc.name = "scala-like";
    sc.extension = "scala";
    sc.generic_open = "[";
    sc.generic_close = "]";
    sc.constant_decl = "???.asInstanceOf[{type}]";
    sc.constant_expr = "???.asInstanceOf[{type}]";
    sc.local_var = "val {name}: {type} = {expr}";
    sc.new_keyword = "new ";
    sc.top_type = "Any";
    sc.bottom_type = "Nothing";
    sc.import_line = "import {name}";
    sc.file_template = "{header}package {unit}\n{imports}\nobject Test {\n  def test(): Unit = {\n{body}  }\n}\n";
    sc.reserved = {"abstract", "case", "catch", "class", "def", "do", "else", "extends", "false", "final",
                   "finally", "for", "forSome", "if", "implicit", "import", "lazy", "match", "new", "null",
                   "object", "override", "package", "private", "protected", "return", "sealed", "super",
                   "this", "throw", "trait", "true", "try", "type", "val", "var", "while", "with", "yield"};
    v.push_back(sc);

    DialectProfile gr;
    gr.name = "groovy-like";
    gr.extension = "groovy";
    gr.constant_decl = "({type}) null";
    gr.constant_expr = "({type}) null";
    gr.local_var = "{type} {name} = {expr}";
    gr.new_keyword = "new ";
    gr.type_args_before_name = true;
    gr.diamond_on_erased_constructor = true;
    gr.top_type = "Object";
    gr.bottom_type = "Void";
    gr.import_line = "import {name}";
    gr.file_template =
        "{header}package {unit}\n{imports}\n@groovy.transform.TypeChecked\nclass Test {\n  static void test() {\n{body}  }\n}\n";
    gr.reserved = {"as", "assert", "break", "case", "catch", "class", "const", "continue", "def", "default",
                   "do", "else", "enum", "extends", "false", "finally", "for", "goto", "if", "implements",
                   "import", "in", "instanceof", "interface", "new", "null", "package", "return", "super",
                   "switch", "this", "throw", "throws", "trait", "true", "try", "var", "while"};
    v.push_back(gr);
    return v;
  }();
  return profiles;
}

inline const DialectProfile& dialect_profile(std::string_view name) {
  for (const DialectProfile& p : dialect_profiles())
    if (p.name == name) return p;
  std::string known;
  for (const DialectProfile& p : dialect_profiles()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown dialect '" + std::string(name) + "' (known: " + known + ")");
}

struct SourceFile {
  std::string text;
  std::string filename;
  std::vector<std::string> imports;
  std::vector<std::string> warnings;
};

/// Lower-case hex rendering of a 64-bit value, zero padded.
inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline std::string fill(std::string tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string::npos) {
        auto it = vars.find(tmpl.substr(i + 1, close - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out += tmpl[i];
  }
  return out;
}

class Renderer {
 public:
  Renderer(const ApiSpec& spec, const DialectProfile& profile) : spec_(spec), p_(profile) {}

  std::string statement(const Expr& s) {
    if (s.is_local_var()) {
      const std::string rhs = s.rhs().is_constant() ? fill(p_.constant_decl, {{"type", type(s.rhs().type())}})
                                                    : expr(s.rhs());
      return fill(p_.local_var, {{"name", ident(s.name())}, {"type", type(s.type())}, {"expr", rhs}}) +
             p_.statement_end;
    }
    return expr(s) + p_.statement_end;
  }

  std::string type(const Type& t) {
    switch (t.kind()) {
      case Type::Kind::top: return p_.top_type;
      case Type::Kind::bottom: return p_.bottom_type;
      case Type::Kind::variable: return ident(std::string(variable_display_name(t.name())));
      default: break;
    }
    std::string out = class_name(t.name());
    if (t.is_instance()) {
      out += p_.generic_open;
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += p_.type_arg_separator;
        out += type(t.args()[i]);
      }
      out += p_.generic_close;
    }
    return out;
  }

  std::string expr(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::empty: return "";
      case Expr::Kind::constant: return fill(p_.constant_expr, {{"type", type(e.type())}});
      case Expr::Kind::local_var: return statement(e);
      case Expr::Kind::field_access:
      case Expr::Kind::call: break;
    }
    const ApiDef& d = spec_.def(e.def());
    std::string targs;
    if (e.is_call() && !e.type_args().empty()) {
      targs = p_.generic_open;
      for (std::size_t i = 0; i < e.type_args().size(); ++i) {
        if (i) targs += p_.type_arg_separator;
        targs += type(e.type_args()[i]);
      }
      targs += p_.generic_close;
    }
    std::string args;
    if (e.is_call()) {
      args = "(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) args += ", ";
        args += expr(e.args()[i]);
      }
      args += ")";
    }
    if (d.is_constructor) {
      std::string head = p_.new_keyword + class_name(*d.owner);
      if (!targs.empty()) head += targs;
      else if (p_.diamond_on_erased_constructor && spec_.class_named(*d.owner).is_generic())
        head += p_.generic_open + p_.generic_close;
      return head + args;
    }
    std::string prefix;
    if (!e.receiver().is_empty()) {
      std::string r = expr(e.receiver());
      // Casts bind looser than member access.
      if (e.receiver().is_constant() && r.find(' ') != std::string::npos) r = "(" + r + ")";
      prefix = r + ".";
    } else if (d.owner) {
      prefix = class_name(*d.owner) + ".";
    }
    const std::string name = ident(d.name);
    if (!e.is_call()) return prefix + name;
    if (p_.type_args_before_name && !targs.empty()) return prefix + targs + name + args;
    return prefix + name + targs + args;
  }

  std::vector<std::string> imports() const { return {imports_.begin(), imports_.end()}; }
  std::vector<std::string>& warnings() { return warnings_; }

 private:
  std::string class_name(const std::string& qualified) {
    const auto dot = qualified.rfind('.');
    if (dot == std::string::npos) return ident(qualified);
    imports_.insert(qualified);
    return ident(qualified.substr(dot + 1));
  }

  // Reserved words get a deterministic `_` suffix.
  std::string ident(const std::string& name) {
    if (std::find(p_.reserved.begin(), p_.reserved.end(), name) == p_.reserved.end()) return name;
    const std::string renamed = name + "_";
    const std::string msg = "renamed reserved word '" + name + "' to '" + renamed + "'";
    if (std::find(warnings_.begin(), warnings_.end(), msg) == warnings_.end()) warnings_.push_back(msg);
    return renamed;
  }

  const ApiSpec& spec_;
  const DialectProfile& p_;
  std::set<std::string> imports_;
  std::vector<std::string> warnings_;
};

}  // namespace detail

/// Deterministic compilation unit name for a program: its `id` metadata when
/// present, otherwise a hash of its canonical IR.
inline std::string unit_name(const ApiSpec& spec, const Program& p) {
  if (auto it = p.metadata.find("id"); it != p.metadata.end()) return "p" + it->second;
  return "p" + hex64(fnv1a(print_ir(spec, p)));
}

/// Renders `p` as a source file of the given dialect, wrapped in a no-arg
/// test function inside a package named after the program.
inline SourceFile emit(const ApiSpec& spec, const Program& p, const DialectProfile& profile) {
  SourceFile f;
  const std::string unit = unit_name(spec, p);
  f.filename = unit + "." + profile.extension;
  if (profile.canonical_ir) {
    f.text = print_ir(spec, p);
    return f;
  }
  detail::Renderer r(spec, profile);
  std::string body;
  const std::string indent = profile.body_indent;
  for (const Expr& s : p.statements) body += indent + r.statement(s) + "\n";
  std::string header;
  for (const auto& [k, v] : p.metadata) header += profile.comment_prefix + " " + k + ": " + v + "\n";
  f.imports = r.imports();
  std::string imports;
  for (const std::string& imp : f.imports) imports += detail::fill(profile.import_line, {{"name", imp}}) + "\n";
  f.text = detail::fill(profile.file_template,
                        {{"header", header}, {"unit", unit}, {"imports", imports}, {"body", body}});
  f.warnings = std::move(r.warnings());
  return f;
}

}  // namespace apifuzz
