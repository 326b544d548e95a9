// ipa-check: command-line front end.
//
//   analyze  <spec.ipa> [--manifest m]   variable analysis (+ constraints)
//   check    <spec.ipa> --manifest m     compositional refinement check
//   direct   <spec.ipa> --manifest m     whole-system refinement check
//   compare  <spec.ipa> --manifest m     both, plus a cost comparison
//   replay   <counterexample.json>       re-validate a recorded trace
//   gen      <outdir> --seed n           emit a generated spec family
//
// Exit codes: 0 pass/holds, 1 property or refinement failure, 2 usage or
// parse error, 3 inconclusive (a bound was exceeded).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ipa/analysis.hpp"
#include "ipa/composer.hpp"
#include "ipa/explorer.hpp"
#include "ipa/generator.hpp"
#include "ipa/json_io.hpp"
#include "ipa/parser.hpp"
#include "ipa/printer.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

void print_diags(const ipa::Diagnostics& ds) {
  for (const auto& d : ds) std::cerr << d.str() << "\n";
}

ipa::Diagnostic io_error(const std::string& msg) {
  return ipa::error("E-io", msg, ipa::SourceSpan{"ipa-check", 0, 0, 0});
}

// All durations in reports are printed rounded to whole milliseconds.
long long ms(double v) { return std::llround(v); }

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string joined(const std::vector<std::string>& xs) {
  std::string out = "{";
  for (size_t i = 0; i < xs.size(); i++) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out + "}";
}

std::string joined(const std::set<std::string>& xs) {
  return joined(std::vector<std::string>(xs.begin(), xs.end()));
}

// Common options for the checking commands.
struct CheckOpts {
  std::string spec_path;
  std::string manifest_path;
  std::string format = "table";
  std::string out_path;
  size_t max_states = 0;  // 0 = engine default
  size_t max_depth = 0;   // 0 = engine default
  unsigned workers = 0;   // 0 = from environment, else 1
  bool deadlock_error = false;
};

void add_common(CLI::App* cmd, CheckOpts& o, bool manifest_required) {
  cmd->add_option("spec", o.spec_path, "root specification file (.ipa)")
      ->required();
  auto* m = cmd->add_option("--manifest", o.manifest_path,
                            "abstraction manifest file (.ipam)");
  if (manifest_required) m->required();
  cmd->add_option("--max-states", o.max_states,
                  "abort after this many distinct states (default: 10000000)");
  cmd->add_option("--max-depth", o.max_depth,
                  "abort beyond this exploration depth (default: unbounded)");
  cmd->add_option("--workers", o.workers,
                  "worker threads for state exploration (default: "
                  "IPA_CHECK_WORKERS or 1)");
  cmd->add_option("--format", o.format, "report format (default: table)")
      ->check(CLI::IsMember({"table", "json"}));
  cmd->add_option("--out", o.out_path,
                  "write the report here instead of standard output");
  cmd->add_flag("--deadlock-error", o.deadlock_error,
                "treat reachable deadlocks as failures");
}

ipa::ExploreBounds bounds_of(const CheckOpts& o) {
  ipa::ExploreBounds b;
  if (o.max_states) b.max_states = o.max_states;
  if (o.max_depth) b.max_depth = o.max_depth;
  b.deadlock_is_error = o.deadlock_error;
  b.workers = o.workers;
  if (b.workers == 0) {
    if (const char* env = std::getenv("IPA_CHECK_WORKERS"))
      b.workers = static_cast<unsigned>(std::max(1, std::atoi(env)));
    else
      b.workers = 1;
  }
  return b;
}

// Writes the report to --out or standard output. False => exit 2.
bool emit(const CheckOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) {
    print_diags({io_error("cannot write '" + o.out_path + "'")});
    return false;
  }
  f << text;
  if (!f.good()) {
    print_diags({io_error("cannot write '" + o.out_path + "'")});
    return false;
  }
  return true;
}

std::optional<ipa::Manifest> load_manifest(const CheckOpts& o,
                                           ipa::Diagnostics& extra) {
  auto parsed = ipa::parse_manifest_file(o.manifest_path, o.spec_path);
  print_diags(parsed.diags);
  if (!parsed.ok()) return std::nullopt;
  (void)extra;
  return std::move(parsed.manifest);
}

// Failure evidence: a replayable wrapper around the trace, naming the
// system it runs over ("S", "A", or "C_<module>") and the inputs needed to
// rebuild that system.
void write_counterexample(const CheckOpts& o, const std::string& system,
                          const std::vector<std::string>& vars,
                          const ipa::Trace& trace, std::string& note) {
  nlohmann::json j;
  j["manifest"] = std::filesystem::absolute(o.manifest_path).string();
  j["root"] = std::filesystem::absolute(o.spec_path).string();
  j["system"] = system;
  j["trace"] = ipa::trace_to_json(vars, trace);
  const std::string name = "counterexample.json";
  std::ofstream f(name, std::ios::binary);
  if (!f) {
    note = "could not write " + name;
    return;
  }
  f << ipa::json_str(j);
  note = "counterexample written to " + name;
}

std::vector<std::string> var_names(const ipa::Spec& s) {
  std::vector<std::string> out;
  for (const auto& v : s.vars) out.push_back(v.name);
  return out;
}

// ---------------------------------------------------------------- analyze

int run_analyze(const CheckOpts& o) {
  ipa::VarAnalysis va;
  ipa::ConstraintReport cr;
  bool have_constraints = false;
  std::string spec_name;
  size_t module_count = 0;

  if (!o.manifest_path.empty()) {
    ipa::Diagnostics extra;
    auto m = load_manifest(o, extra);
    if (!m) return kExitUsage;
    va = ipa::analyze(m->root);
    cr = ipa::check_abstraction_constraints(*m, va);
    have_constraints = true;
    spec_name = m->root.name;
    module_count = m->root.modules.size();
  } else {
    std::ifstream f(o.spec_path, std::ios::binary);
    if (!f) {
      print_diags({ipa::error("E-io", "no such file: '" + o.spec_path + "'",
                              ipa::SourceSpan{o.spec_path, 0, 0, 0})});
      return kExitUsage;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    auto parsed = ipa::parse_spec(ss.str(), o.spec_path);
    print_diags(parsed.diags);
    if (!parsed.ok()) return kExitUsage;
    va = ipa::analyze(*parsed.spec);
    spec_name = parsed.spec->name;
    module_count = parsed.spec->modules.size();
  }
  print_diags(va.warnings);

  std::string text;
  if (o.format == "json") {
    nlohmann::json j;
    j["analysis"] = ipa::analysis_to_json(va);
    if (have_constraints) j["constraints"] = ipa::constraints_to_json(cr);
    text = ipa::json_str(j);
  } else {
    std::ostringstream t;
    t << "spec " << spec_name << ": " << module_count << " module(s)\n";
    for (const auto& [mod, deps] : va.module_deps) {
      t << "module " << mod << ":\n";
      t << "  deps     = " << joined(deps) << "\n";
      auto it = va.internal.find(mod);
      t << "  internal = "
        << joined(it == va.internal.end() ? std::set<std::string>{}
                                          : it->second)
        << "\n";
    }
    t << "interaction = " << joined(va.interaction) << "\n";
    if (have_constraints) {
      t << "constraints:\n";
      for (const auto& e : cr.entries) {
        t << "  " << e.module << " constraint " << e.constraint << ": "
          << e.verdict_str() << "\n";
        for (const auto& issue : e.issues)
          t << "    - " << issue.detail << "\n";
      }
      t << (cr.all_pass() ? "all constraints pass\n"
                          : "constraint check failed\n");
    }
    text = t.str();
  }
  if (!emit(o, text)) return kExitUsage;
  if (have_constraints && !cr.all_pass()) return kExitFail;
  return kExitPass;
}

// ------------------------------------------------------------------ check

std::string exploration_line(const ipa::ExplorationReport& r) {
  std::ostringstream t;
  t << ipa::explore_status_str(r.verdict) << " (states=" << r.distinct_states
    << ", transitions=" << r.transitions << ", depth=" << r.depth
    << ", time=" << ms(r.elapsed_ms) << " ms)";
  if (!r.violated_invariant.empty())
    t << " [invariant " << r.violated_invariant << "]";
  return t.str();
}

std::string refinement_line(const ipa::RefinementVerdict& v) {
  std::ostringstream t;
  t << ipa::refinement_status_str(v.status);
  if (!v.reason.empty()) t << " (" << v.reason << ")";
  t << " (states=" << v.states_explored
    << ", transitions=" << v.transitions_checked << ", time="
    << ms(v.elapsed_ms) << " ms)";
  return t.str();
}

int comp_exit(const ipa::CompositionalReport& r) {
  if (!r.ok()) return kExitUsage;
  if (r.holds) return kExitPass;
  bool failed = !r.constraints.all_pass() ||
                r.abstract_report.verdict ==
                    ipa::ExploreStatus::InvariantViolated ||
                r.abstract_report.verdict == ipa::ExploreStatus::DeadlockFound;
  bool inconclusive =
      r.abstract_report.verdict == ipa::ExploreStatus::BoundExceeded;
  for (const auto& mc : r.module_checks) {
    if (mc.verdict.status == ipa::RefinementStatus::Fails) failed = true;
    if (mc.verdict.status == ipa::RefinementStatus::Inconclusive)
      inconclusive = true;
  }
  if (failed) return kExitFail;
  if (inconclusive) return kExitInconclusive;
  return kExitFail;  // blocked for a structural reason
}

// Writes evidence for the first failure in the report, if any.
void comp_evidence(const CheckOpts& o, ipa::Manifest& m,
                   const ipa::CompositionalReport& r, std::string& note) {
  if (r.abstract_report.violation) {
    write_counterexample(o, "A", r.abstract_scope,
                         *r.abstract_report.violation, note);
    return;
  }
  for (const auto& mc : r.module_checks)
    if (mc.verdict.status == ipa::RefinementStatus::Fails) {
      write_counterexample(o, "C_" + mc.module, mc.scope, mc.verdict.trace,
                           note);
      return;
    }
  (void)m;
}

std::string comp_table(const ipa::Manifest& m,
                       const ipa::CompositionalReport& r,
                       const std::string& evidence_note) {
  std::ostringstream t;
  t << "compositional check: " << m.name << "\n";
  t << "constraints: "
    << (r.constraints.all_pass() ? "all pass" : "FAILED") << "\n";
  for (const auto& e : r.constraints.entries) {
    if (e.pass && e.issues.empty()) continue;
    t << "  " << e.module << " constraint " << e.constraint << ": "
      << e.verdict_str() << "\n";
    for (const auto& issue : e.issues) t << "    - " << issue.detail << "\n";
  }
  if (!r.abstract_scope.empty() || r.abstract_report.distinct_states) {
    t << "abstract system A: " << exploration_line(r.abstract_report) << "\n";
    t << "  scope: " << joined(r.abstract_scope) << "\n";
  }
  for (const auto& mc : r.module_checks)
    t << "C_" << mc.module << " => A: " << refinement_line(mc.verdict) << "\n";
  if (m.invariants.empty())
    t << "(no invariants declared)\n";
  else {
    t << "invariants on A: "
      << (r.transferable.empty() ? "(none)" : joined(r.transferable)) << "\n";
    if (!r.not_transferable.empty())
      t << "root-only invariants (not transferable): "
        << joined(r.not_transferable) << "\n";
  }
  if (!evidence_note.empty()) t << evidence_note << "\n";
  t << "T_comp = " << ms(r.t_comp_ms) << " ms\n";
  t << "conclusion: " << r.conclusion << "\n";
  return t.str();
}

int run_check(const CheckOpts& o) {
  ipa::Diagnostics extra;
  auto m = load_manifest(o, extra);
  if (!m) return kExitUsage;
  auto r = ipa::compositional_check(*m, bounds_of(o));
  print_diags(r.diags);
  if (!r.ok()) return kExitUsage;

  std::string note;
  comp_evidence(o, *m, r, note);

  std::string text;
  if (o.format == "json") {
    nlohmann::json j = ipa::compositional_to_json(r);
    if (!note.empty()) j["evidence"] = note;
    text = ipa::json_str(j);
  } else {
    text = comp_table(*m, r, note);
  }
  if (!emit(o, text)) return kExitUsage;
  return comp_exit(r);
}

// ----------------------------------------------------------------- direct

int direct_exit(const ipa::DirectReport& r) {
  if (!r.ok()) return kExitUsage;
  bool failed =
      r.verdict.status == ipa::RefinementStatus::Fails ||
      r.exploration.verdict == ipa::ExploreStatus::InvariantViolated ||
      r.exploration.verdict == ipa::ExploreStatus::DeadlockFound;
  bool inconclusive =
      r.verdict.status == ipa::RefinementStatus::Inconclusive ||
      r.exploration.verdict == ipa::ExploreStatus::BoundExceeded;
  if (failed) return kExitFail;
  if (inconclusive) return kExitInconclusive;
  return kExitPass;
}

void direct_evidence(const CheckOpts& o, const ipa::Manifest& m,
                     const ipa::DirectReport& r, std::string& note) {
  if (r.verdict.status == ipa::RefinementStatus::Fails) {
    write_counterexample(o, "S", var_names(m.root), r.verdict.trace, note);
    return;
  }
  if (r.exploration.violation)
    write_counterexample(o, "S", var_names(m.root), *r.exploration.violation,
                         note);
}

std::string direct_table(const ipa::Manifest& m, const ipa::DirectReport& r,
                         const std::string& evidence_note) {
  std::ostringstream t;
  t << "direct check: " << m.name << "\n";
  t << "S => A: " << refinement_line(r.verdict) << "\n";
  t << "invariant exploration: " << exploration_line(r.exploration) << "\n";
  if (m.invariants.empty()) t << "(no invariants declared)\n";
  if (!r.unchecked_invariants.empty())
    t << "invariants only expressible over A: "
      << joined(r.unchecked_invariants) << "\n";
  if (!evidence_note.empty()) t << evidence_note << "\n";
  t << "T_direct = " << ms(r.t_direct_ms) << " ms\n";
  return t.str();
}

int run_direct(const CheckOpts& o) {
  ipa::Diagnostics extra;
  auto m = load_manifest(o, extra);
  if (!m) return kExitUsage;
  auto r = ipa::direct_check(*m, bounds_of(o));
  print_diags(r.diags);
  if (!r.ok()) return kExitUsage;

  std::string note;
  direct_evidence(o, *m, r, note);

  std::string text;
  if (o.format == "json") {
    nlohmann::json j = ipa::direct_to_json(var_names(m->root), r);
    if (!note.empty()) j["evidence"] = note;
    text = ipa::json_str(j);
  } else {
    text = direct_table(*m, r, note);
  }
  if (!emit(o, text)) return kExitUsage;
  return direct_exit(r);
}

// ---------------------------------------------------------------- compare

int run_compare(const CheckOpts& o) {
  ipa::Diagnostics extra;
  auto m = load_manifest(o, extra);
  if (!m) return kExitUsage;
  const ipa::ExploreBounds b = bounds_of(o);
  auto comp = ipa::compositional_check(*m, b);
  print_diags(comp.diags);
  auto dir = ipa::direct_check(*m, b);
  print_diags(dir.diags);
  if (!comp.ok() || !dir.ok()) return kExitUsage;
  auto cost = ipa::compare_costs(comp, dir);

  std::string note;
  comp_evidence(o, *m, comp, note);
  if (note.empty()) direct_evidence(o, *m, dir, note);

  std::string text;
  if (o.format == "json") {
    nlohmann::json j;
    j["compositional"] = ipa::compositional_to_json(comp);
    j["direct"] = ipa::direct_to_json(var_names(m->root), dir);
    j["comparison"] = ipa::comparison_to_json(cost);
    if (!note.empty()) j["evidence"] = note;
    text = ipa::json_str(j);
  } else {
    std::ostringstream t;
    t << "cost comparison: " << m->name << "\n";
    size_t name_w = 6;  // "direct"
    for (const auto& row : cost.per_check)
      name_w = std::max(name_w, row.name.size());
    char line[160];
    for (const auto& row : cost.per_check) {
      std::snprintf(line, sizeof line, "%-*s  %10zu states  %6lld ms\n",
                    static_cast<int>(name_w), row.name.c_str(), row.states,
                    ms(row.ms));
      t << line;
    }
    std::snprintf(line, sizeof line, "%-*s  %10zu states  %6lld ms\n",
                  static_cast<int>(name_w), "direct", cost.direct_states,
                  ms(cost.t_direct_ms));
    t << line;
    t << "compositional conclusion: " << comp.conclusion << "\n";
    t << "direct verdict: " << ipa::refinement_status_str(dir.verdict.status);
    if (dir.exploration.verdict != ipa::ExploreStatus::Pass)
      t << " / " << ipa::explore_status_str(dir.exploration.verdict);
    t << "\n";
    if (m->invariants.empty()) t << "(no invariants declared)\n";
    if (!note.empty()) t << note << "\n";
    t << "T_comp   = " << ms(cost.t_comp_ms) << " ms\n";
    t << "T_direct = " << ms(cost.t_direct_ms) << " ms\n";
    if (cost.complete) {
      t << "time ratio  = " << fixed2(cost.time_ratio) << "\n";
      t << "state ratio = " << fixed2(cost.state_ratio) << "\n";
    } else {
      t << "time ratio  = n/a (some check was inconclusive)\n";
      t << "state ratio = n/a (some check was inconclusive)\n";
    }
    text = t.str();
  }
  if (!emit(o, text)) return kExitUsage;

  const int ce = comp_exit(comp);
  const int de = direct_exit(dir);
  if (ce == kExitUsage || de == kExitUsage) return kExitUsage;
  if (ce == kExitFail || de == kExitFail) return kExitFail;
  if (ce == kExitInconclusive || de == kExitInconclusive)
    return kExitInconclusive;
  return kExitPass;
}

// ----------------------------------------------------------------- replay

int run_replay(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    print_diags({ipa::error("E-io", "no such file: '" + path + "'",
                            ipa::SourceSpan{path, 0, 0, 0})});
    return kExitUsage;
  }
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    print_diags({ipa::error("E-parse", std::string("invalid JSON: ") +
                                e.what(),
                            ipa::SourceSpan{path, 0, 0, 0})});
    return kExitUsage;
  }
  if (!j.is_object() || !j.contains("manifest") || !j.contains("system") ||
      !j.contains("trace")) {
    print_diags({ipa::error(
        "E-parse",
        "expected an object with \"manifest\", \"system\" and \"trace\"",
        ipa::SourceSpan{path, 0, 0, 0})});
    return kExitUsage;
  }

  const std::string system = j["system"].get<std::string>();
  const std::string manifest_path = j["manifest"].get<std::string>();
  const std::string root_path =
      j.contains("root") ? j["root"].get<std::string>() : std::string{};
  auto parsed = root_path.empty()
                    ? ipa::parse_manifest_file(manifest_path)
                    : ipa::parse_manifest_file(manifest_path, root_path);
  print_diags(parsed.diags);
  if (!parsed.ok()) return kExitUsage;
  ipa::Manifest& m = *parsed.manifest;

  const ipa::Spec* target = nullptr;
  std::optional<ipa::ComposedSpec> composed;
  ipa::Diagnostics diags;
  if (system == "S") {
    target = &m.root;
  } else {
    auto va = ipa::analyze(m.root);
    if (system == "A")
      composed = ipa::build_abstract_spec(m, va, diags);
    else if (system.rfind("C_", 0) == 0)
      composed =
          ipa::build_compositional_spec(m, va, system.substr(2), diags);
    print_diags(diags);
    if (!composed) {
      if (diags.empty())
        print_diags({ipa::error("E-parse",
                                "unknown system '" + system +
                                    "' (expected S, A, or C_<module>)",
                                ipa::SourceSpan{path, 0, 0, 0})});
      return kExitUsage;
    }
    target = &composed->spec;
  }

  ipa::Trace trace;
  try {
    trace = ipa::trace_from_json(*target, j["trace"]);
  } catch (const std::exception& e) {
    print_diags({ipa::error("E-parse", std::string("invalid trace: ") +
                                e.what(),
                            ipa::SourceSpan{path, 0, 0, 0})});
    return kExitUsage;
  }

  auto result = ipa::trace_replay(*target, trace);
  if (result.valid) {
    std::cout << "replay: trace valid over " << system << " ("
              << trace.steps.size() << " step(s))\n";
    return kExitPass;
  }
  std::cout << "replay: trace invalid over " << system << " at step "
            << result.failed_step << ": " << result.detail << "\n";
  return kExitFail;
}

// -------------------------------------------------------------------- gen

int run_gen(const std::string& outdir, uint64_t seed, bool mutated) {
  auto c = ipa::generate_case(seed, mutated);
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) {
    print_diags({io_error("cannot create directory '" + outdir + "'")});
    return kExitUsage;
  }
  for (const auto& f : c.files) {
    const auto p = std::filesystem::path(outdir) / f.name;
    std::ofstream os(p, std::ios::binary);
    if (!os) {
      print_diags({io_error("cannot write '" + p.string() + "'")});
      return kExitUsage;
    }
    os << f.text;
  }
  std::cout << (std::filesystem::path(outdir) / c.manifest_file).string()
            << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model checker for guarded-action specifications with "
               "interaction-preserving abstractions"};
  app.require_subcommand(1);

  CheckOpts analyze_o, check_o, direct_o, compare_o;
  std::string replay_path, gen_dir;
  uint64_t gen_seed = 0;
  bool gen_mutated = false;

  add_common(app.add_subcommand(
                 "analyze", "variable analysis and abstraction constraints"),
             analyze_o, false);
  add_common(app.add_subcommand("check", "compositional refinement check"),
             check_o, true);
  add_common(app.add_subcommand("direct", "whole-system refinement check"),
             direct_o, true);
  add_common(app.add_subcommand("compare",
                                "compositional and direct checks side by "
                                "side, with costs"),
             compare_o, true);

  auto* replay =
      app.add_subcommand("replay", "re-validate a recorded counterexample");
  replay->add_option("trace", replay_path, "counterexample JSON file")
      ->required();

  auto* gen = app.add_subcommand(
      "gen", "emit a generated specification family with its manifest");
  gen->add_option("outdir", gen_dir, "output directory")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_flag("--mutated", gen_mutated,
                "plant an abstraction-breaking bug");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (app.got_subcommand("analyze")) return run_analyze(analyze_o);
    if (app.got_subcommand("check")) return run_check(check_o);
    if (app.got_subcommand("direct")) return run_direct(direct_o);
    if (app.got_subcommand("compare")) return run_compare(compare_o);
    if (app.got_subcommand("replay")) return run_replay(replay_path);
    if (app.got_subcommand("gen"))
      return run_gen(gen_dir, gen_seed, gen_mutated);
  } catch (const std::exception& e) {
    print_diags({ipa::error("E-io", std::string("internal error: ") + e.what(),
                            ipa::SourceSpan{"ipa-check", 0, 0, 0})});
    return kExitUsage;
  }
  return kExitUsage;
}
