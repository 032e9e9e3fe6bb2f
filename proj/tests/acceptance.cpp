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

// End-to-end acceptance checks. Prints one [PASS]/[FAIL] line per check and
// exits nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apifuzz/campaign.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/cli.hpp"
#include "apifuzz/enumeration.hpp"
#include "apifuzz/erasure.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/inhabitants.hpp"
#include "apifuzz/ir.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace apifuzz;
using namespace apifuzz::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string filter;  // runs only checks whose name contains it

template <typename F>
void run(const std::string& name, F&& f) {
  if (!filter.empty() && name.find(filter) == std::string::npos) return;
  try {
    f();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

void collections_graph() {
  const auto t0 = Clock::now();
  const ApiSpec spec = collections_api();
  const ApiGraph g(spec);
  std::set<std::string> edges;
  for (const GraphEdge& e : g.edges())
    edges.insert(g.node_label(e.from) + " -> " + g.node_label(e.to) + " " + to_string(e.label));
  const std::set<std::string> want{
      "Utils.createList -> List<T> {T->X}",
      "List.List -> List<T> {}",
      "List<T> -> List.add {}",
      "List<T> -> List.toSet {}",
      "List.add -> boolean {}",
      "List.toSet -> Set<E> {E->T}",
      "Set.Set -> Set<E> {}",
      "Set<E> -> Set.add {}",
      "Set<E> -> Set.toList {}",
      "Set.add -> boolean {}",
      "Set.toList -> List<T> {T->E}",
  };
  std::vector<std::string> sourceless;
  for (std::size_t n = 0; n < g.nodes().size(); ++n)
    if (g.node(n).is_def() && g.in_edges(n).empty()) sourceless.push_back(g.node_label(n));
  std::sort(sourceless.begin(), sourceless.end());
  const std::vector<std::string> want_sourceless{"List.List", "Set.Set", "Utils.createList"};
  const double secs = seconds_since(t0);
  const bool ok = g.def_node_count() == 7 && g.type_node_count() == 3 && edges == want &&
                  sourceless == want_sourceless && secs < 1.0;
  std::vector<std::string> missing, extra;
  std::set_difference(want.begin(), want.end(), edges.begin(), edges.end(), std::back_inserter(missing));
  std::set_difference(edges.begin(), edges.end(), want.begin(), want.end(), std::back_inserter(extra));
  std::ostringstream d;
  d << g.def_node_count() << " definition nodes, " << g.type_node_count() << " type nodes, " << edges.size()
    << " edges, sourceless {" << join(sourceless, ", ") << "}, " << secs << " s";
  if (!missing.empty()) d << "; missing " << join(missing, "; ");
  if (!extra.empty()) d << "; unexpected " << join(extra, "; ");
  report(ok, "collections API graph structure", d.str());
}

void subclass_enumeration() {
  const ApiSpec spec = subclass_method_api();
  const ApiGraph g(spec);
  Rng rng(1);
  std::set<std::string> got;
  for (const TypingSequence& s :
       enumerate_well_typed(spec, g, def_named(spec, "A", "m"), Substitution{}, EnumCaps{}, rng))
    got.insert(to_string(s));
  const std::set<std::string> want{"<A, B, B>", "<B, B, B>", "<A, B, A>", "<B, B, A>"};
  std::vector<std::string> v(got.begin(), got.end());
  report(got == want, "well-typed sequences of B m(B x) on A", "{" + join(v, " ") + "}");
}

void map_paths() {
  const ApiSpec spec = maps_api();
  const ApiGraph g(spec);
  const Type int_t = Type::class_type("Int");
  const Type set_int = Type::instance("Set", {int_t});
  const std::size_t target = g.type_node(decompose(spec, set_int).base);
  const DefId map_of = def_named(spec, "Utils", "mapOf");
  const DefId map_of_strs = def_named(spec, "Utils", "mapOfStrs");
  const ApiDef& mo = spec.def(map_of);
  const std::string x = mo.type_params[0].id, y = mo.type_params[1].id;
  const std::string e = spec.class_named("Set").type_params[0].id;

  bool strs_infeasible = false, map_of_feasible = false;
  std::size_t paths = 0;
  for (const GraphPath& p : g.paths_to(target, PathOptions{0, false})) {
    ++paths;
    const PathEvaluation ev = evaluate_path(g, p, set_int);
    const DefId first = g.node(p.nodes.front()).def;
    if (first == map_of_strs) strs_infeasible = !ev.feasible;
    if (first == map_of) map_of_feasible = ev.feasible;
  }

  // The seed is pinned so the free map value type comes out as String.
  Rng rng(1);
  InhabitantSearch search(g, rng);
  const std::vector<FeasiblePath> found = search.find_api_paths(set_int);
  bool bindings = false, y_valid = false;
  std::string printed, y_image;
  for (const FeasiblePath& fp : found) {
    if (fp.trivial()) continue;
    const Type* xi = fp.resolved.find(x);
    const Type* ei = fp.resolved.find(e);
    const Type* yi = fp.resolved.find(y);
    bindings = xi && *xi == int_t && ei && *ei == int_t;
    y_valid = yi && yi->is_ground() && spec.find_class(yi->name()) != nullptr;
    if (yi) y_image = to_string(*yi);
    printed = print_ir(spec, search.to_expr(fp, 2));
    break;
  }
  const bool ok = paths == 2 && strs_infeasible && map_of_feasible && found.size() == 2 && bindings && y_valid &&
                  printed == "Utils.mapOf<Int,String>().keySet()";
  report(ok, "feasible paths to Set<Int>",
         std::to_string(paths) + " paths, mapOfStrs " + (strs_infeasible ? "infeasible" : "feasible") + ", mapOf " +
             (map_of_feasible ? "feasible" : "infeasible") + ", X/E bound to Int: " + (bindings ? "yes" : "no") +
             ", Y -> " + y_image + ", expression " + printed);
}

void snippet_erasure() {
  const ApiSpec spec = inference_api();
  const Program p = parse_ir(spec, R"(m1<Object>(constant(String))
m1<String>(constant(String))
m2<String,String>(constant(String))
local var x: String = m2<String,String>(constant(String))
)");
  const Program e = erase(spec, p);
  std::vector<std::string> erased;
  for (std::size_t i = 0; i < e.statements.size(); ++i)
    if (erased_call_count(p.statements[i], e.statements[i]) > 0) erased.push_back(std::to_string(i + 1));
  report(erased == std::vector<std::string>{"2", "4"} && check(spec, e),
         "type arguments erased in the four-call snippet", "calls {" + join(erased, ", ") + "} erased");
}

void oracle_agreement() {
  const auto t0 = Clock::now();
  PropertyTally tally;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) agreement_trial(seed, tally);
  const double secs = seconds_since(t0);
  std::string d = std::to_string(tally.trials) + " random specs, " + std::to_string(tally.checks) +
                  " programs checked, " + std::to_string(tally.violations.size()) + " violations, " +
                  std::to_string(secs) + " s";
  if (!tally.ok()) d += "; first: " + tally.violations.front();
  report(tally.ok() && tally.trials >= 10000 && secs < 60, "checker agrees with synthesized sequences", d);
}

void path_oracle() {
  PropertyTally tally;
  for (std::uint64_t seed = 0; tally.trials < 1000 && seed < 5000; ++seed) path_trial(seed, tally);
  std::string d = std::to_string(tally.trials) + " graphs, " + std::to_string(tally.checks) + " targets, " +
                  std::to_string(tally.violations.size()) + " discrepancies";
  if (!tally.ok()) d += "; first: " + tally.violations.front();
  report(tally.ok() && tally.trials >= 1000, "feasible paths match brute-force enumeration", d);
}

void erasure_round_trip() {
  PropertyTally tally;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) erasure_trial(seed, tally);
  std::string d = std::to_string(tally.trials) + " random specs, " + std::to_string(tally.checks) +
                  " programs checked, " + std::to_string(tally.excluded) +
                  " erased ill-typed programs became well typed and were excluded, " +
                  std::to_string(tally.violations.size()) + " violations";
  if (!tally.ok()) d += "; first: " + tally.violations.front();
  report(tally.ok() && tally.trials >= 10000, "erasure round trip", d);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void scaling() {
  std::vector<double> log_edges, log_time;
  std::ostringstream d;
  double largest_mean = 0;
  std::size_t largest_edges = 0;
  for (std::size_t classes : {250, 500, 1000, 2000, 4200}) {
    const ApiSpec spec = load_api({synthetic_api_json(classes, 7)});
    CampaignConfig cfg;
    cfg.no_compile = true;
    cfg.write_programs = false;
    cfg.caps.max_sequences = 4;
    cfg.seed = 11;
    const Campaign campaign(spec, cfg);
    const std::size_t edges = campaign.graph().edges().size();
    // A fixed sample of definitions keeps the work per size comparable.
    Rng pick(5);
    const auto defs = campaign.spec().defs();
    std::size_t programs = 0;
    const auto t0 = Clock::now();
    for (int i = 0; i < 60; ++i) programs += campaign.synthesize(defs[uniform_index(pick, defs.size())]).programs.size();
    const double mean = seconds_since(t0) / static_cast<double>(std::max<std::size_t>(1, programs));
    log_edges.push_back(std::log(static_cast<double>(edges)));
    log_time.push_back(std::log(mean));
    d << edges << " edges: " << mean * 1000 << " ms/program; ";
    largest_mean = mean;
    largest_edges = edges;
  }
  const double r = pearson(log_edges, log_time);
  d << "r = " << r;
  report(largest_edges >= 25000 && largest_mean <= 1.0 && r >= 0.9, "synthesis time scales with graph size", d.str());
}

std::map<std::string, std::string> read_tree(const fs::path& root, bool strip_timings) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root).generic_string();
    if (rel.rfind("work/", 0) == 0) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (strip_timings && entry.path().extension() == ".jsonl") {
      std::istringstream lines(text);
      std::string line, stripped;
      while (std::getline(lines, line)) {
        auto j = nlohmann::ordered_json::parse(line);
        j.erase("timings");
        stripped += j.dump() + "\n";
      }
      text = stripped;
    }
    out[rel] = text;
  }
  return out;
}

void determinism() {
  const fs::path base = fs::temp_directory_path() / ("apifuzz-determinism-" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> trees;
  std::vector<int> codes;
  for (const char* run : {"a", "b"}) {
    const std::string out = (base / run).string();
    const std::string api = source_path("apis/shapes.json");
    const std::vector<const char*> argv{"apifuzz",     "fuzz",    "--api",   api.c_str(),
                                        "--no-compile", "--modes", "well,well-erased,ill,ill-erased",
                                        "--seed",      "42",      "--workers", "2",
                                        "--dialect",   "kotlin-like", "--out", out.c_str()};
    std::ostringstream o, e;
    codes.push_back(run_cli(static_cast<int>(argv.size()), argv.data(), o, e));
    trees.push_back(read_tree(out, true));
  }
  std::size_t programs = 0;
  for (const auto& [k, v] : trees[0])
    if (k.size() > 3 && k.substr(k.size() - 3) == ".kt") ++programs;
  const bool ok = codes[0] == 0 && codes[1] == 0 && programs > 0 && trees[0] == trees[1];
  report(ok, "two identical no-compile campaigns produce identical output",
         std::to_string(trees[0].size()) + " files (" + std::to_string(programs) +
             " programs), exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) +
             (trees[0] == trees[1] ? ", byte-identical" : ", outputs differ"));
  fs::remove_all(base);
}

void compiler_smoke() {
  const char* cmd = std::getenv("APIFUZZ_COMPILER_CMD");
  if (!cmd || !*cmd) {
    std::cout << "[SKIP] well-typed campaign against a real compiler: APIFUZZ_COMPILER_CMD not set" << std::endl;
    return;
  }
  const char* dialect = std::getenv("APIFUZZ_DIALECT");
  CampaignConfig cfg;
  cfg.compiler_cmd = cmd;
  cfg.dialect = dialect && *dialect ? dialect : "kotlin-like";
  cfg.modes = {Mode::well};
  cfg.seed = 1;
  cfg.caps.max_sequences = 20;
  cfg.out_dir = (fs::temp_directory_path() / ("apifuzz-smoke-" + std::to_string(::getpid()))).string();
  Campaign campaign(load_api_files({source_path("apis/shapes.json")}), cfg);
  const CampaignReport rep = campaign.run();
  std::size_t considered = std::min<std::size_t>(100, rep.records.size()), pass = 0;
  for (std::size_t i = 0; i < considered; ++i)
    if (rep.records[i].classification == Classification::pass) ++pass;
  const double ratio = considered ? static_cast<double>(pass) / static_cast<double>(considered) : 0;
  report(considered >= 100 && ratio >= 0.95, "well-typed campaign against a real compiler",
         std::to_string(pass) + "/" + std::to_string(considered) + " pass");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) filter = argv[1];
  run("collections API graph structure", collections_graph);
  run("well-typed sequences of B m(B x) on A", subclass_enumeration);
  run("feasible paths to Set<Int>", map_paths);
  run("type arguments erased in the four-call snippet", snippet_erasure);
  run("checker agrees with synthesized sequences", oracle_agreement);
  run("feasible paths match brute-force enumeration", path_oracle);
  run("erasure round trip", erasure_round_trip);
  run("synthesis time scales with graph size", scaling);
  run("two identical no-compile campaigns produce identical output", determinism);
  run("well-typed campaign against a real compiler", compiler_smoke);
  std::cout << (failures == 0 ? "all acceptance checks passed" : std::to_string(failures) + " acceptance checks failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
