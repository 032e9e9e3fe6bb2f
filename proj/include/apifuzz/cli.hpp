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

// Command-line front end. Exit codes: 0 clean, 1 candidates (or ill-typed
// input for `check`), 2 configuration error, 3 internal gate violation.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apifuzz/campaign.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/ingest.hpp"
#include "apifuzz/ir.hpp"

namespace apifuzz {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigError("cannot write " + path);
}

inline void print_summary(const CampaignReport& rep, const std::filesystem::path& report_path, std::ostream& out) {
  out << "campaign " << rep.campaign_id << ": " << rep.records.size() << " programs";
  for (const auto& [cls, n] : rep.counts()) out << ", " << cls << " " << n;
  out << "\n";
  if (!rep.skipped.empty()) out << "skipped definitions: " << rep.skipped.size() << "\n";
  if (rep.masked_ill_typed) out << "erased ill-typed programs dropped as well typed: " << rep.masked_ill_typed << "\n";
  out << "deduplicated candidates: " << rep.candidates.size() << "\n";
  for (const std::string& g : rep.gate_violations) out << "GATE VIOLATION: " << g << "\n";
  if (!report_path.empty()) out << "report: " << report_path.string() << "\n";
  out << "time: " << rep.seconds << " s\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"API-driven synthesis of type-intensive programs for compiler testing"};
  app.require_subcommand(1);

  std::vector<std::string> apis;
  bool strict = false;
  CampaignConfig cfg;
  std::vector<std::string> modes{"well"};
  std::string dump_graph;
  std::size_t path_limit = cfg.inhabitants.path_limit;

  auto add_api = [&](CLI::App* sub) {
    sub->add_option("--api", apis, "API specification file or glob (JSON); repeat for several")
        ->required()
        ->allow_extra_args(false);
    sub->add_flag("--strict", strict, "reject references to undeclared types");
  };
  auto add_synthesis = [&](CLI::App* sub) {
    sub->add_option("--dialect", cfg.dialect, "output dialect: ir, kotlin-like, scala-like, groovy-like")
        ->capture_default_str();
    sub->add_option("--modes", modes, "synthesis modes: well, well-erased, ill, ill-erased")->delimiter(',');
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-sequences", cfg.caps.max_sequences, "well-typed sequences per definition")
        ->capture_default_str();
    sub->add_option("--incompatible-per-slot", cfg.caps.incompatible_per_slot,
                    "ill-typed sequences per slot")->capture_default_str();
    sub->add_option("--depth", cfg.substitution_depth, "maximum type nesting of drawn substitutions")
        ->capture_default_str();
    sub->add_option("--program-depth", cfg.inhabitants.program_depth, "maximum expression nesting")
        ->capture_default_str();
    sub->add_option("--path-limit", path_limit, "feasible paths considered per inhabitant (0 = all)")
        ->capture_default_str();
    sub->add_option("--substitutions", cfg.substitutions, "substitutions drawn per definition")
        ->capture_default_str();
    sub->add_option("--campaign-id", cfg.campaign_id, "name of the output subdirectory");
    sub->add_option("--dump-graph", dump_graph, "write the API graph in DOT format ('-' for stdout)");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate programs without compiling them");
  add_api(synth);
  add_synthesis(synth);

  CLI::App* fuzz = app.add_subcommand("fuzz", "generate, compile and classify programs");
  add_api(fuzz);
  add_synthesis(fuzz);
  fuzz->add_option("--compiler-cmd", cfg.compiler_cmd, "compiler command template with {files} and {classpath}");
  fuzz->add_option("--classpath", cfg.classpath, "value substituted for {classpath}");
  fuzz->add_option("--batch-size", cfg.batch_size, "programs per compiler invocation")->capture_default_str();
  fuzz->add_option("--timeout", cfg.timeout_seconds, "seconds per compiler invocation")->capture_default_str();
  fuzz->add_option("--crash-pattern", cfg.crash_pattern, "regex marking compiler crashes")->capture_default_str();
  fuzz->add_flag("--no-compile", cfg.no_compile, "use the internal checker verdict instead of a compiler");

  std::vector<std::string> ir_files;
  CLI::App* check_cmd = app.add_subcommand("check", "type check API-IR files with the reference checker");
  add_api(check_cmd);
  check_cmd->add_option("files", ir_files, "API-IR files")->required();

  CLI::App* stats = app.add_subcommand("stats", "print API graph statistics as JSON");
  add_api(stats);
  stats->add_option("--dump-graph", dump_graph, "write the API graph in DOT format ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const ApiSpec spec = load_api_files(apis, LoadOptions{strict});
    for (const std::string& w : spec.warnings()) err << "warning: " << w << "\n";

    if (*stats) {
      const ApiGraph g(spec);
      if (!dump_graph.empty()) detail::write_text(dump_graph, g.to_dot(), out);
      const GraphStats s = graph_stats(g);
      nlohmann::ordered_json j{{"nodes", s.nodes},
                               {"type_nodes", s.type_nodes},
                               {"def_nodes", s.def_nodes},
                               {"edges", s.edges},
                               {"classes", s.classes},
                               {"polymorphic_defs", s.polymorphic_defs},
                               {"constructors", s.constructors},
                               {"static_defs", s.static_defs},
                               {"fields", s.fields},
                               {"avg_signature_size", s.avg_signature_size}};
      if (dump_graph != "-") out << j.dump(2) << "\n";
      return 0;
    }

    if (*check_cmd) {
      int code = 0;
      for (const std::string& f : ir_files) {
        const Program p = parse_ir(spec, detail::read_file(f));
        const Verdict v = check(spec, p);
        for (const std::string& w : v.warnings) err << "warning: " << f << ": " << w << "\n";
        if (v) {
          out << f << ": well-typed\n";
        } else {
          out << f << ": type error in statement " << v.statement << " at " << to_string(v.slot) << ": "
              << v.reason << "\n";
          code = 1;
        }
      }
      return code;
    }

    cfg.api_globs = apis;
    cfg.modes.clear();
    for (const std::string& m : modes) {
      const Mode mode = parse_mode(m);
      if (std::find(cfg.modes.begin(), cfg.modes.end(), mode) == cfg.modes.end()) cfg.modes.push_back(mode);
    }
    cfg.inhabitants.path_limit = path_limit;
    if (*synth) cfg.no_compile = true;

    Campaign campaign(spec, cfg);
    for (DefId id : campaign.skipped())
      err << "warning: skipped " << campaign.spec().def(id).name << " (no valid substitution)\n";
    if (!dump_graph.empty()) detail::write_text(dump_graph, campaign.graph().to_dot(), out);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const fs::path report_path = fs::path(cfg.out_dir) / (campaign.campaign_id() + ".report.jsonl");
    std::ofstream report(report_path, std::ios::binary);
    if (!report) throw ConfigError("cannot write " + report_path.string());
    const CampaignReport rep = campaign.run(&report);
    report.close();

    const fs::path cand_path = fs::path(cfg.out_dir) / (campaign.campaign_id() + ".candidates.jsonl");
    std::ofstream cand(cand_path, std::ios::binary);
    for (const VerdictRecord& r : rep.candidates) cand << to_json(r, cfg.seed, rep.campaign_id).dump() << "\n";

    for (const std::string& w : rep.warnings)
      if (std::find(spec.warnings().begin(), spec.warnings().end(), w) == spec.warnings().end())
        err << "warning: " << w << "\n";
    detail::print_summary(rep, report_path, dump_graph == "-" ? err : out);
    return rep.exit_code();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace apifuzz
