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

// Fuzzing campaigns: synthesize programs per definition and mode, gate them
// through the reference checker, compile them with a user-supplied command
// and classify the compiler's answer against the expected one.
//
// Expected-accept programs are compiled in batches; a batch that does not
// compile cleanly is split into single-program runs to isolate blame.
// Expected-reject programs always compile alone, since one rejected file
// would mask the others.

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "apifuzz/api.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/emit.hpp"
#include "apifuzz/enumeration.hpp"
#include "apifuzz/erasure.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/ingest.hpp"
#include "apifuzz/inhabitants.hpp"
#include "apifuzz/ir.hpp"
#include "apifuzz/process.hpp"
#include "apifuzz/rng.hpp"

namespace apifuzz {

enum class Mode : std::uint8_t { well, well_erased, ill, ill_erased };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::well: return "well";
    case Mode::well_erased: return "well-erased";
    case Mode::ill: return "ill";
    case Mode::ill_erased: return "ill-erased";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::well, Mode::well_erased, Mode::ill, Mode::ill_erased})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown mode '" + std::string(s) + "' (known: well, well-erased, ill, ill-erased)");
}

inline bool expects_accept(Mode m) { return m == Mode::well || m == Mode::well_erased; }

enum class Outcome : std::uint8_t { accept, reject, crash, timeout };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::accept: return "accept";
    case Outcome::reject: return "reject";
    case Outcome::crash: return "crash";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

enum class Classification : std::uint8_t { pass, candidate_ucte, candidate_urb, candidate_crash, candidate_cpi };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::pass: return "pass";
    case Classification::candidate_ucte: return "candidate-UCTE";
    case Classification::candidate_urb: return "candidate-URB";
    case Classification::candidate_crash: return "candidate-crash";
    case Classification::candidate_cpi: return "candidate-CPI";
  }
  return "?";
}

inline Classification classify(bool expected_accept, Outcome outcome) {
  switch (outcome) {
    case Outcome::crash: return Classification::candidate_crash;
    case Outcome::timeout: return Classification::candidate_cpi;
    case Outcome::accept: return expected_accept ? Classification::pass : Classification::candidate_urb;
    case Outcome::reject: return expected_accept ? Classification::candidate_ucte : Classification::pass;
  }
  return Classification::pass;
}

struct CampaignConfig {
  std::vector<std::string> api_globs;
  std::string dialect = "ir";
  std::vector<Mode> modes{Mode::well};
  std::uint64_t seed = 0;
  EnumCaps caps;
  InhabitantOptions inhabitants;
  int substitution_depth = 2;
  int substitutions = 1;
  std::string compiler_cmd;
  std::string classpath;
  std::size_t batch_size = 45;
  double timeout_seconds = 60;
  std::string out_dir = "apifuzz-out";
  std::size_t workers = 1;
  bool no_compile = false;
  std::string crash_pattern = "Internal error|StackOverflow|exception while";
  std::string campaign_id;  // derived from the configuration when empty
  bool write_programs = true;
};

inline void validate(const CampaignConfig& c) {
  if (c.modes.empty()) throw ConfigError("at least one mode is required");
  dialect_profile(c.dialect);
  if (c.batch_size == 0) throw ConfigError("batch size must be positive");
  if (c.caps.max_sequences == 0) throw ConfigError("max sequences must be positive");
  if (c.substitution_depth < 0) throw ConfigError("substitution depth must not be negative");
  if (c.substitutions < 1) throw ConfigError("substitutions must be at least 1");
  if (c.inhabitants.program_depth < 1) throw ConfigError("program depth must be at least 1");
  if (c.timeout_seconds <= 0) throw ConfigError("timeout must be positive");
  if (!c.no_compile && c.compiler_cmd.empty())
    throw ConfigError("a compiler command is required unless --no-compile is given");
  if (!c.no_compile && c.compiler_cmd.find("{files}") == std::string::npos)
    throw ConfigError("compiler command must contain the {files} placeholder");
  try {
    std::regex re(c.crash_pattern);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid crash pattern: " + std::string(e.what()));
  }
}

inline std::string campaign_id_of(const CampaignConfig& c) {
  if (!c.campaign_id.empty()) return c.campaign_id;
  std::string key = std::to_string(c.seed) + "|" + c.dialect + "|";
  for (Mode m : c.modes) key += std::string(to_string(m)) + ",";
  key += "|" + std::to_string(c.caps.max_sequences) + "|" + std::to_string(c.caps.incompatible_per_slot) + "|" +
         std::to_string(c.substitution_depth) + "|" + std::to_string(c.inhabitants.program_depth) + "|" +
         std::to_string(c.inhabitants.path_limit) + "|" + std::to_string(c.substitutions);
  return "c" + hex64(fnv1a(key)).substr(0, 12);
}

struct VerdictRecord {
  std::string program;  // id; also the file stem
  DefId def;
  std::string def_name;
  Mode mode = Mode::well;
  bool expected_accept = true;
  Outcome outcome = Outcome::accept;
  Classification classification = Classification::pass;
  std::optional<Slot> faulted;
  std::string sequence;
  std::string substitution;
  std::string file;  // relative to the output directory
  std::string diagnostic;
  double synthesis_ms = 0;
  double compile_ms = 0;
};

/// First error-looking line of compiler output with paths and numbers
/// replaced, so the same failure fingerprints identically across runs.
inline std::string diagnostic_fingerprint(const std::string& diagnostic) {
  static const std::regex path(R"([^\s:'"()]*[/\\][^\s:'"()]*)");
  static const std::regex unit(R"(\bp[0-9a-f]{16}\b)");
  static const std::regex number(R"(\d+)");
  std::string s = std::regex_replace(diagnostic, path, "<path>");
  s = std::regex_replace(s, unit, "<unit>");
  s = std::regex_replace(s, number, "N");
  return s;
}

inline std::string first_diagnostic_line(const std::string& output) {
  static const std::regex error_word("error", std::regex::icase);
  std::string first_nonempty;
  std::size_t start = 0;
  while (start <= output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string::npos) end = output.size();
    std::string line = output.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first_nonempty.empty() && line.find_first_not_of(" \t") != std::string::npos) first_nonempty = line;
    if (std::regex_search(line, error_word)) return line;
    start = end + 1;
  }
  return first_nonempty;
}

/// Collapses candidates sharing (definition, faulted slot, fingerprint).
inline std::vector<VerdictRecord> dedupe(const std::vector<VerdictRecord>& records) {
  std::set<std::tuple<std::uint32_t, std::string, std::string>> seen;
  std::vector<VerdictRecord> out;
  for (const VerdictRecord& r : records) {
    if (r.classification == Classification::pass) continue;
    auto key = std::make_tuple(r.def.value, r.faulted ? to_string(*r.faulted) : std::string(),
                               diagnostic_fingerprint(r.diagnostic));
    if (seen.insert(std::move(key)).second) out.push_back(r);
  }
  return out;
}

inline nlohmann::ordered_json to_json(const VerdictRecord& r, std::uint64_t seed, const std::string& campaign) {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["campaign"] = campaign;
  j["seed"] = seed;
  j["program"] = r.program;
  j["def"] = r.def.value;
  j["def_name"] = r.def_name;
  j["mode"] = to_string(r.mode);
  j["sequence"] = r.sequence;
  j["substitution"] = r.substitution;
  j["faulted_slot"] = r.faulted ? nlohmann::ordered_json(to_string(*r.faulted)) : nlohmann::ordered_json();
  j["expected"] = r.expected_accept ? "accept" : "reject";
  j["outcome"] = to_string(r.outcome);
  j["classification"] = to_string(r.classification);
  j["diagnostic"] = r.diagnostic;
  j["file"] = r.file;
  j["timings"] = {{"synthesis_ms", r.synthesis_ms}, {"compile_ms", r.compile_ms}};
  return j;
}

struct SynthesizedProgram {
  Program program;
  VerdictRecord record;
};

struct CampaignReport {
  std::string campaign_id;
  std::vector<VerdictRecord> records;
  std::vector<VerdictRecord> candidates;  // deduplicated
  std::vector<std::string> gate_violations;
  std::vector<DefId> skipped;
  std::size_t masked_ill_typed = 0;  // erased ill-typed programs that became well typed
  std::vector<std::string> warnings;
  double seconds = 0;

  std::map<std::string, std::size_t> counts() const {
    std::map<std::string, std::size_t> c;
    for (const VerdictRecord& r : records) ++c[to_string(r.classification)];
    return c;
  }

  int exit_code() const {
    if (!gate_violations.empty()) return 3;
    return candidates.empty() ? 0 : 1;
  }
};

/// Runs work(i, worker) for i in [0, n) on `workers` threads and done(i) on
/// the calling thread in index order as results become available.
template <typename Work, typename Done>
void ordered_parallel(std::size_t n, std::size_t workers, Work&& work, Done&& done) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      work(i, std::size_t{0});
      done(i);
    }
    return;
  }
  std::vector<char> ready(n, 0);
  std::mutex m;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::vector<std::thread> threads;
  const std::size_t count = std::min(workers, n);
  for (std::size_t w = 0; w < count; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          work(i, w);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
        }
        std::lock_guard lock(m);
        ready[i] = 1;
        cv.notify_all();
      }
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    {
      std::unique_lock lock(m);
      cv.wait(lock, [&] { return ready[i] != 0; });
      if (error) break;
    }
    done(i);
  }
  next.store(n);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

class Campaign {
 public:
  Campaign(const ApiSpec& spec, CampaignConfig cfg) : config_(std::move(cfg)) {
    validate(config_);
    SkipReport sk = skip_unusable(spec, config_.substitution_depth);
    spec_ = std::move(sk.spec);
    skipped_ = std::move(sk.skipped);
    graph_.emplace(spec_);
    campaign_id_ = campaign_id_of(config_);
  }

  const ApiSpec& spec() const { return spec_; }
  const ApiGraph& graph() const { return *graph_; }
  const std::string& campaign_id() const { return campaign_id_; }
  const std::vector<DefId>& skipped() const { return skipped_; }

  struct DefResult {
    std::vector<SynthesizedProgram> programs;
    std::vector<std::string> gate_violations;
    std::size_t masked = 0;
  };

  /// Every program for one definition; depends only on (spec, config, def).
  DefResult synthesize(const ApiDef& d) const {
    DefResult out;
    Rng rng = derive_rng(config_.seed, d.id.value);
    InhabitantSearch search(*graph_, rng, config_.inhabitants);
    const std::vector<TypeParam> vars = spec_.all_type_params(d);
    auto wants = [&](Mode m) { return std::find(config_.modes.begin(), config_.modes.end(), m) != config_.modes.end(); };
    const std::string name = (d.owner ? *d.owner + "." : std::string()) + d.name;

    for (int round = 0; round < config_.substitutions; ++round) {
      std::optional<Substitution> sub =
          vars.empty() ? Substitution{} : draw_substitution(spec_, vars, config_.substitution_depth, rng);
      if (!sub) continue;
      std::size_t index = 0;
      auto add = [&](Program p, const TypingSequence& seq, Mode mode, double ms) {
        VerdictRecord r;
        r.def = d.id;
        r.def_name = name;
        r.mode = mode;
        r.expected_accept = expects_accept(mode);
        r.faulted = seq.faulted;
        r.sequence = to_string(seq);
        r.substitution = to_string(seq.sub);
        r.synthesis_ms = ms;
        const std::string key = std::to_string(d.id.value) + "|" + std::to_string(round) + "|" +
                                std::to_string(index++) + "|" + to_string(mode) + "|" +
                                std::to_string(config_.seed) + "|" + r.sequence;
        r.program = hex64(fnv1a(key));
        p.metadata["id"] = r.program;
        p.metadata["def"] = name;
        p.metadata["mode"] = to_string(mode);
        p.metadata["sequence"] = r.sequence;
        p.metadata["seed"] = std::to_string(config_.seed);
        if (!seq.sub.empty()) p.metadata["substitution"] = r.substitution;
        if (seq.faulted) p.metadata["faulted"] = to_string(*seq.faulted);
        out.programs.push_back(SynthesizedProgram{std::move(p), std::move(r)});
      };
      auto gate = [&](const std::string& msg, const TypingSequence& seq) {
        out.gate_violations.push_back(name + " " + to_string(seq) + ": " + msg);
      };
      using clock = std::chrono::steady_clock;
      auto ms_since = [](clock::time_point t) {
        return std::chrono::duration<double, std::milli>(clock::now() - t).count();
      };

      if (wants(Mode::well) || wants(Mode::well_erased)) {
        for (const TypingSequence& seq : enumerate_well_typed(spec_, *graph_, d.id, *sub, config_.caps, rng)) {
          const auto t0 = clock::now();
          Program p = search.realize(seq);
          const Verdict v = check(spec_, p);
          if (!v) {
            gate("well-typed sequence realized to an ill-typed program (" + to_string(v.slot) + ": " + v.reason + ")",
                 seq);
            continue;
          }
          const double base_ms = ms_since(t0);
          if (wants(Mode::well)) add(p, seq, Mode::well, base_ms);
          if (wants(Mode::well_erased)) {
            const auto t1 = clock::now();
            Program e = erase(spec_, p);
            const Verdict ve = check(spec_, e);
            auto back = ve ? elaborate(spec_, e) : std::nullopt;
            if (!ve) gate("erasure broke a well-typed program (" + ve.reason + ")", seq);
            else if (!back || back->statements != p.statements) gate("inference does not recover erased type arguments", seq);
            else add(std::move(e), seq, Mode::well_erased, base_ms + ms_since(t1));
          }
        }
      }
      if (wants(Mode::ill) || wants(Mode::ill_erased)) {
        for (const TypingSequence& seq : enumerate_ill_typed(spec_, *graph_, d.id, *sub, config_.caps, rng)) {
          const auto t0 = clock::now();
          Program p = search.realize(seq);
          const Verdict v = check(spec_, p);
          if (v) {
            gate("ill-typed sequence realized to a well-typed program", seq);
            continue;
          }
          if (seq.faulted && v.slot != *seq.faulted) {
            gate("checker blames " + to_string(v.slot) + " instead of " + to_string(*seq.faulted), seq);
            continue;
          }
          const double base_ms = ms_since(t0);
          if (wants(Mode::ill)) add(p, seq, Mode::ill, base_ms);
          if (wants(Mode::ill_erased)) {
            const auto t1 = clock::now();
            Program e = erase(spec_, p);
            if (check(spec_, e)) {
              ++out.masked;  // erasure repaired the fault; no oracle
              continue;
            }
            add(std::move(e), seq, Mode::ill_erased, base_ms + ms_since(t1));
          }
        }
      }
    }
    return out;
  }

  /// Full campaign. Report lines go to `report` (when given) as soon as
  /// their program is classified, in synthesis order.
  CampaignReport run(std::ostream* report = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    CampaignReport rep;
    rep.campaign_id = campaign_id_;
    rep.skipped = skipped_;
    rep.warnings = spec_.warnings();
    const DialectProfile& profile = dialect_profile(config_.dialect);
    namespace fs = std::filesystem;
    const fs::path rel_dir = fs::path(config_.dialect) / campaign_id_;
    const fs::path dir = fs::path(config_.out_dir) / rel_dir;
    if (config_.write_programs || !config_.no_compile) fs::create_directories(dir);

    std::vector<const ApiDef*> defs;
    for (const ApiDef& d : spec_.defs()) defs.push_back(&d);
    std::vector<DefResult> results(defs.size());
    std::vector<SynthesizedProgram> programs;
    ordered_parallel(
        defs.size(), config_.workers, [&](std::size_t i, std::size_t) { results[i] = synthesize(*defs[i]); },
        [&](std::size_t i) {
          DefResult& r = results[i];
          for (auto& g : r.gate_violations) rep.gate_violations.push_back(std::move(g));
          rep.masked_ill_typed += r.masked;
          for (SynthesizedProgram& p : r.programs) programs.push_back(std::move(p));
          r = DefResult{};
        });

    std::vector<fs::path> files(programs.size());
    for (std::size_t i = 0; i < programs.size(); ++i) {
      SourceFile src = emit(spec_, programs[i].program, profile);
      for (const std::string& w : src.warnings)
        if (std::find(rep.warnings.begin(), rep.warnings.end(), w) == rep.warnings.end()) rep.warnings.push_back(w);
      programs[i].record.file = (rel_dir / src.filename).generic_string();
      files[i] = dir / src.filename;
      if (config_.write_programs || !config_.no_compile) {
        std::ofstream out(files[i], std::ios::binary);
        out << src.text;
        if (!out) throw Error("cannot write " + files[i].string());
      }
    }

    // Batches: consecutive expected-accept programs, single expected-reject ones.
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < programs.size(); ++i) {
      const bool accept = programs[i].record.expected_accept;
      if (accept && !batches.empty() && batches.back().size() < config_.batch_size &&
          programs[batches.back().front()].record.expected_accept) {
        batches.back().push_back(i);
      } else {
        batches.push_back({i});
      }
    }

    const std::regex crash(config_.crash_pattern);
    std::vector<fs::path> temp_dirs;
    if (!config_.no_compile) {
      for (std::size_t w = 0; w < std::max<std::size_t>(1, config_.workers); ++w) {
        temp_dirs.push_back(fs::path(config_.out_dir) / "work" / (campaign_id_ + "-" + std::to_string(w)));
        fs::create_directories(temp_dirs.back());
      }
    }

    ordered_parallel(
        batches.size(), config_.workers,
        [&](std::size_t b, std::size_t worker) {
          if (config_.no_compile) {
            for (std::size_t i : batches[b]) {
              VerdictRecord& r = programs[i].record;
              r.outcome = r.expected_accept ? Outcome::accept : Outcome::reject;
            }
            return;
          }
          compile_batch(programs, files, batches[b], temp_dirs[worker], crash);
        },
        [&](std::size_t b) {
          for (std::size_t i : batches[b]) {
            VerdictRecord& r = programs[i].record;
            r.classification = classify(r.expected_accept, r.outcome);
            if (report) *report << to_json(r, config_.seed, campaign_id_).dump() << "\n";
            rep.records.push_back(r);
          }
          if (report) report->flush();
        });
    rep.candidates = dedupe(rep.records);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  }

 private:
  std::string command_for(const std::vector<std::filesystem::path>& files) const {
    std::string list;
    for (const auto& f : files) list += (list.empty() ? "" : " ") + shell_quote(std::filesystem::absolute(f).string());
    return detail::fill(config_.compiler_cmd, {{"files", list}, {"classpath", config_.classpath}});
  }

  void compile_one(SynthesizedProgram& p, const std::filesystem::path& file, const std::filesystem::path& cwd,
                   const std::regex& crash) const {
    const CommandResult r = run_command(command_for({file}), cwd.string(), config_.timeout_seconds);
    VerdictRecord& rec = p.record;
    rec.compile_ms = r.seconds * 1000.0;
    if (r.timed_out) {
      rec.outcome = Outcome::timeout;
      rec.diagnostic = "timeout after " + std::to_string(config_.timeout_seconds) + " s";
      return;
    }
    if (r.exit_code == 0) {
      rec.outcome = Outcome::accept;
      return;
    }
    rec.outcome = std::regex_search(r.output, crash) ? Outcome::crash : Outcome::reject;
    rec.diagnostic = first_diagnostic_line(r.output);
    if (r.exit_code == 127 && r.output.find("not found") != std::string::npos)
      throw ConfigError("compiler command not found: " + r.output);
  }

  void compile_batch(std::vector<SynthesizedProgram>& programs, const std::vector<std::filesystem::path>& files,
                     const std::vector<std::size_t>& batch, const std::filesystem::path& cwd,
                     const std::regex& crash) const {
    if (batch.size() == 1) {
      compile_one(programs[batch[0]], files[batch[0]], cwd, crash);
      return;
    }
    std::vector<std::filesystem::path> paths;
    for (std::size_t i : batch) paths.push_back(files[i]);
    const CommandResult r = run_command(command_for(paths), cwd.string(), config_.timeout_seconds);
    if (!r.timed_out && r.exit_code == 0) {
      for (std::size_t i : batch) {
        programs[i].record.outcome = Outcome::accept;
        programs[i].record.compile_ms = r.seconds * 1000.0 / static_cast<double>(batch.size());
      }
      return;
    }
    if (r.exit_code == 127 && r.output.find("not found") != std::string::npos)
      throw ConfigError("compiler command not found: " + r.output);
    for (std::size_t i : batch) compile_one(programs[i], files[i], cwd, crash);
  }

  CampaignConfig config_;
  ApiSpec spec_;
  std::optional<ApiGraph> graph_;
  std::vector<DefId> skipped_;
  std::string campaign_id_;
};

}  // namespace apifuzz
