#pragma once

// `actsem` command-line front end: simulate, learn, inspect.
//
// Exit codes: 0 success, 1 usage or not found, 2 data error.

#include <actsem/clause.hpp>
#include <actsem/error.hpp>
#include <actsem/induction.hpp>
#include <actsem/manifest.hpp>
#include <actsem/simulator.hpp>
#include <actsem/theory_io.hpp>
#include <actsem/trace.hpp>
#include <actsem/version.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace actsem::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

struct RunConfig {
  std::string subcommand;
  std::string scenario;
  std::string input;
  std::string output;
  std::string relations;
  std::string action;
  std::string format = "text";
  std::string dialect = "line";
  std::vector<std::string> actions;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t steps = 100;
  double tolerance = kDefaultTolerance;
  bool learn_preservation = false;
  bool assume_success = true;
  bool include_internal = false;
  bool verbose = false;
  std::string heading_var = "r_dir";
  std::string position_var = "r_pos";
};

/// Parses either dialect; clause files start with `state_spec(`, `state(` or
/// `action(`.
inline Sample read_any_trace(const std::string& src) {
  std::istringstream in(src);
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '%') continue;
    if (t.starts_with("state_spec(") || t.starts_with("state(") || t.starts_with("action("))
      return clause::import_trace(src);
    break;
  }
  return ingest_trace(std::string_view(src));
}

/// Value of `key=` in the `# actsem-trace` header line, if present.
inline std::optional<std::string> trace_header_field(const std::string& src, const std::string& key) {
  std::istringstream in(src);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.starts_with("# actsem-trace")) continue;
    std::istringstream fields(line);
    std::string f;
    while (fields >> f)
      if (f.starts_with(key + "=")) return f.substr(key.size() + 1);
  }
  return std::nullopt;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  f << content;
  if (!f) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

inline sim::Scenario resolve_scenario(const std::string& name) {
  if (auto sc = sim::builtin_scenario(name)) return *sc;
  if (!name.empty() && std::filesystem::is_regular_file(name)) return sim::scenario_from_json(read_file(name));
  throw Error(ErrorCode::NotFound, "unknown scenario '" + name + "' (built-ins: two-obstacles, two-obstacles-3d, "
                                   "open-desk, or a scenario file path)");
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  sim::Scenario sc = detail::resolve_scenario(cfg.scenario);
  auto script = cfg.actions.empty() ? sim::random_policy(sc, cfg.steps, cfg.seed)
                                    : sim::random_policy(sc, cfg.steps, cfg.seed, cfg.actions);
  Sample sample = sim::run_script(sc, script, cfg.seed);

  std::string body;
  if (cfg.dialect == "clause") {
    body = "% actsem-trace tool_version=" + std::string(kVersion) + " scenario=" + sc.name +
           " seed=" + std::to_string(cfg.seed) + " tolerance=" + text::format_number(cfg.tolerance) + "\n" +
           clause::export_trace(sample);
  } else {
    body = "# actsem-trace tool_version=" + std::string(kVersion) + " scenario=" + sc.name +
           " seed=" + std::to_string(cfg.seed) + " tolerance=" + text::format_number(cfg.tolerance) +
           " steps=" + std::to_string(cfg.steps) + "\n" + serialize_trace(sample);
  }
  detail::write_output(cfg.output, body, out);

  std::ostream& summary = (cfg.output.empty() || cfg.output == "-") ? err : out;
  std::map<std::string, std::size_t> counts;
  for (const auto& a : sample.actions()) ++counts[a.name];
  summary << "snapshots: " << sample.snapshots().size() << "\n";
  summary << "actions: " << sample.actions().size() << "\n";
  for (const auto& [name, n] : counts) summary << "  " << name << ": " << n << "\n";
  return kOk;
}

inline int cmd_learn(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string src = detail::read_file(cfg.input);
  Sample sample = read_any_trace(src);

  RelationLibrary lib = builtin_library();
  if (!cfg.relations.empty()) load_relation_manifest(lib, detail::read_file(cfg.relations));

  LearnOptions opts;
  opts.tol.abs = cfg.tolerance;
  opts.learn_preservation = cfg.learn_preservation;
  opts.assume_success = cfg.assume_success;
  opts.include_internal = cfg.include_internal;
  opts.heading_var = cfg.heading_var;
  opts.position_var = cfg.position_var;

  StepObserver observer;
  if (cfg.verbose) {
    observer = [&err](const ActionRecord& a, const ActionTheory& th) {
      err << "t=" << a.t << " " << a.name << ": " << th.candidate_count() << " candidates";
      for (const auto& [var, set] : th.candidates) err << " " << var << "=" << set.size();
      err << "\n";
    };
  }
  TheoryStore store = learn_from_trace(sample, lib, opts, observer);

  TheoryDocument doc;
  doc.seed = cfg.seed;
  if (!cfg.seed_given)
    if (auto s = trace_header_field(src, "seed")) doc.seed = std::stoull(*s);
  doc.tolerance = cfg.tolerance;
  doc.pos_dimension = sample.pos_dimension();
  doc.source = std::filesystem::path(cfg.input).filename().string();
  doc.theories = store.current;
  detail::write_output(cfg.output, write_theory_document(doc), out);

  std::ostream& summary = (cfg.output.empty() || cfg.output == "-") ? err : out;
  summary << "actions learned: " << store.current.size() << " (skipped " << store.occurrences_skipped
          << " no-effect occurrences)\n";
  for (const auto& [name, th] : store.current)
    summary << "  " << name << ": " << th.candidate_count() << " candidates\n";
  return kOk;
}

inline int cmd_inspect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  TheoryDocument doc = read_theory_document(detail::read_file(cfg.input));
  std::vector<const ActionTheory*> selected;
  if (!cfg.action.empty()) {
    auto it = doc.theories.find(cfg.action);
    if (it == doc.theories.end()) {
      err << "no such action: " << cfg.action << "\n";
      return kUsage;
    }
    selected.push_back(&it->second);
  } else {
    for (const auto& [name, th] : doc.theories) selected.push_back(&th);
  }
  if (cfg.format == "clause") {
    for (const auto* th : selected) out << clause::export_theory(*th, doc.pos_dimension);
  } else {
    out << "# tool_version=" << doc.tool_version << " seed=" << doc.seed
        << " tolerance=" << text::format_number(doc.tolerance) << "\n";
    if (selected.empty()) out << "no theories\n";
    for (const auto* th : selected) out << explain_theory(*th, doc.pos_dimension);
  }
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Learn action semantics from observation traces", "actsem"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_tolerance = [&](CLI::App* sub) {
    sub->add_option("--tolerance", cfg.tolerance, "absolute numeric tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "generate a trace from a simulated robot");
  simulate->add_option("--scenario", cfg.scenario, "built-in scenario name or scenario file")->required();
  simulate->add_option("--steps", cfg.steps, "number of commands")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  simulate->add_option("--out", cfg.output, "trace file (default: stdout)");
  simulate->add_option("--actions", cfg.actions, "restrict the policy to these actions")->delimiter(',');
  simulate->add_option("--dialect", cfg.dialect, "trace dialect")
      ->check(CLI::IsMember({"line", "clause"}))
      ->capture_default_str();
  add_tolerance(simulate);

  auto* learn = app.add_subcommand("learn", "induce action theories from a trace");
  learn->add_option("--trace", cfg.input, "trace file")->required();
  learn->add_option("--out", cfg.output, "theory file (default: stdout)");
  learn->add_option("--relations", cfg.relations, "relation manifest with extra background knowledge");
  auto* seed_opt = learn->add_option("--seed", cfg.seed, "seed recorded in the output header");
  learn->add_flag("--learn-preservation", cfg.learn_preservation, "also explain unchanged variables");
  learn->add_flag("--assume-success", cfg.assume_success, "skip occurrences without any effect")
      ->capture_default_str();
  learn->add_flag("--include-internal-vars", cfg.include_internal, "include internal variables");
  learn->add_option("--heading-var", cfg.heading_var, "heading observable")->capture_default_str();
  learn->add_option("--position-var", cfg.position_var, "position observable")->capture_default_str();
  learn->add_flag("--verbose", cfg.verbose, "print candidate counts after every refinement");
  add_tolerance(learn);

  auto* inspect = app.add_subcommand("inspect", "render a theory file");
  inspect->add_option("--theory", cfg.input, "theory file")->required();
  inspect->add_option("--action", cfg.action, "only this action");
  inspect->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "clause"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  cfg.seed_given = seed_opt->count() > 0;

  try {
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (learn->parsed()) return cmd_learn(cfg, out, err);
    if (inspect->parsed()) return cmd_inspect(cfg, out, err);
  } catch (const Error& e) {
    err << "actsem: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::NotFound:
      case ErrorCode::Io: return kUsage;
      default: return kDataError;
    }
  }
  return kUsage;
}

}  // namespace actsem::cli
