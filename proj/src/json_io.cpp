#include "ipa/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace ipa {

using nlohmann::json;

namespace {
// Durations are emitted rounded to whole milliseconds so that emission is
// byte-deterministic for a given report.
long long ms_int(double v) { return std::llround(v); }
}  // namespace

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool:
      return v.as_bool();
    case Value::Kind::Int:
      return v.as_int();
    case Value::Kind::Sym:
      return v.sym_name();
    case Value::Kind::Set: {
      json a = json::array();
      for (const Value& el : v.items()) a.push_back(value_to_json(el));
      return json{{"set", a}};
    }
    case Value::Kind::Seq: {
      json a = json::array();
      for (const Value& el : v.items()) a.push_back(value_to_json(el));
      return json{{"seq", a}};
    }
    case Value::Kind::Rec: {
      json o = json::object();
      for (const auto& [n, f] : v.fields()) o[n] = value_to_json(f);
      return json{{"rec", o}};
    }
    case Value::Kind::Map: {
      json a = json::array();
      for (const auto& [k, val] : v.entries())
        a.push_back(json::array({value_to_json(k), value_to_json(val)}));
      return json{{"map", a}};
    }
  }
  throw std::logic_error("unreachable value kind");
}

Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<int64_t>());
  if (j.is_string()) return Value::symbol(j.get<std::string>());
  if (j.is_object() && j.size() == 1) {
    if (j.contains("set") && j["set"].is_array()) {
      std::vector<Value> items;
      for (const json& el : j["set"]) items.push_back(value_from_json(el));
      return Value::set(std::move(items));
    }
    if (j.contains("seq") && j["seq"].is_array()) {
      std::vector<Value> items;
      for (const json& el : j["seq"]) items.push_back(value_from_json(el));
      return Value::seq(std::move(items));
    }
    if (j.contains("rec") && j["rec"].is_object()) {
      std::vector<std::pair<std::string, Value>> fields;
      for (auto it = j["rec"].begin(); it != j["rec"].end(); ++it)
        fields.emplace_back(it.key(), value_from_json(it.value()));
      return Value::record(std::move(fields));
    }
    if (j.contains("map") && j["map"].is_array()) {
      std::vector<std::pair<Value, Value>> entries;
      for (const json& e : j["map"]) {
        if (!e.is_array() || e.size() != 2)
          throw std::runtime_error("map entry must be a [key, value] pair");
        entries.emplace_back(value_from_json(e[0]), value_from_json(e[1]));
      }
      return Value::map(std::move(entries));
    }
  }
  throw std::runtime_error("unrecognized value form: " + j.dump());
}

json state_to_json(const std::vector<std::string>& vars, const State& s) {
  if (vars.size() != s.vars.size())
    throw std::logic_error("state width does not match variable list");
  json o = json::object();
  for (size_t i = 0; i < vars.size(); i++)
    o[vars[i]] = value_to_json(s.vars[i]);
  return o;
}

State state_from_json(const Spec& spec, const json& j) {
  if (!j.is_object()) throw std::runtime_error("state must be an object");
  std::vector<Value> vals(spec.vars.size());
  std::vector<bool> seen(spec.vars.size(), false);
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto vi = spec.var_index.find(it.key());
    if (vi == spec.var_index.end())
      throw std::runtime_error("state names unknown variable '" + it.key() +
                               "'");
    vals[static_cast<size_t>(vi->second)] = value_from_json(it.value());
    seen[static_cast<size_t>(vi->second)] = true;
  }
  for (size_t i = 0; i < seen.size(); i++)
    if (!seen[i])
      throw std::runtime_error("state is missing variable '" +
                               spec.vars[i].name + "'");
  return State::make(std::move(vals));
}

json trace_to_json(const std::vector<std::string>& vars, const Trace& t) {
  json steps = json::array();
  for (const Trace::Step& st : t.steps) {
    json binding = json::array();
    for (const Value& v : st.inst.binding) binding.push_back(value_to_json(v));
    steps.push_back({{"action", st.inst.module + "." + st.inst.action},
                     {"binding", binding},
                     {"state", state_to_json(vars, st.state)}});
  }
  return json{{"initial", state_to_json(vars, t.initial)}, {"steps", steps}};
}

Trace trace_from_json(const Spec& spec, const json& j) {
  if (!j.is_object() || !j.contains("initial") || !j.contains("steps"))
    throw std::runtime_error("trace must have 'initial' and 'steps'");
  Trace t;
  t.initial = state_from_json(spec, j["initial"]);
  for (const json& st : j["steps"]) {
    if (!st.contains("action") || !st.contains("binding") ||
        !st.contains("state"))
      throw std::runtime_error(
          "trace step must have 'action', 'binding' and 'state'");
    Trace::Step step;
    std::string act = st["action"].get<std::string>();
    size_t dot = act.find('.');
    if (dot == std::string::npos)
      throw std::runtime_error("step action must be 'Module.Action', got '" +
                               act + "'");
    step.inst.module = act.substr(0, dot);
    step.inst.action = act.substr(dot + 1);
    for (const json& b : st["binding"])
      step.inst.binding.push_back(value_from_json(b));
    step.state = state_from_json(spec, st["state"]);
    t.steps.push_back(std::move(step));
  }
  return t;
}

json exploration_to_json(const std::vector<std::string>& vars,
                         const ExplorationReport& r) {
  json o{{"verdict", explore_status_str(r.verdict)},
         {"distinct_states", r.distinct_states},
         {"transitions", r.transitions},
         {"depth", r.depth},
         {"elapsed_ms", ms_int(r.elapsed_ms)}};
  if (!r.violated_invariant.empty())
    o["violated_invariant"] = r.violated_invariant;
  if (r.violation) o["violation"] = trace_to_json(vars, *r.violation);
  if (!r.warnings.empty()) {
    json w = json::array();
    for (const auto& d : r.warnings) w.push_back(d.str());
    o["warnings"] = w;
  }
  return o;
}

json refinement_to_json(const std::vector<std::string>& b_vars,
                        const std::vector<std::string>& a_vars,
                        const RefinementVerdict& v) {
  json o{{"status", refinement_status_str(v.status)},
         {"states_explored", v.states_explored},
         {"transitions_checked", v.transitions_checked},
         {"elapsed_ms", ms_int(v.elapsed_ms)}};
  if (!v.reason.empty()) o["reason"] = v.reason;
  if (v.status == RefinementStatus::Fails) {
    o["detail"] = v.detail;
    o["failing_step"] = v.failing_step;
    o["trace"] = trace_to_json(b_vars, v.trace);
    o["projected_pre"] = state_to_json(a_vars, v.abstract_pre);
    o["projected_post"] = state_to_json(a_vars, v.abstract_post);
  }
  return o;
}

json analysis_to_json(const VarAnalysis& va) {
  json mods = json::object();
  for (const auto& [m, deps] : va.module_deps) {
    json deps_a = json::array();
    for (const auto& v : deps) deps_a.push_back(v);
    json internal_a = json::array();
    auto it = va.internal.find(m);
    if (it != va.internal.end())
      for (const auto& v : it->second) internal_a.push_back(v);
    mods[m] = json{{"deps", deps_a}, {"internal", internal_a}};
  }
  json inter = json::array();
  for (const auto& v : va.interaction) inter.push_back(v);
  json o{{"modules", mods}, {"interaction", inter}};
  if (!va.warnings.empty()) {
    json w = json::array();
    for (const auto& d : va.warnings) w.push_back(d.str());
    o["warnings"] = w;
  }
  return o;
}

json constraints_to_json(const ConstraintReport& cr) {
  json a = json::array();
  for (const auto& e : cr.entries) {
    json issues = json::array();
    for (const auto& i : e.issues)
      issues.push_back(json{{"detail", i.detail}, {"at", i.span.str()}});
    json entry{{"module", e.module},
               {"constraint", e.constraint},
               {"verdict", e.verdict_str()}};
    if (!issues.empty()) entry["issues"] = issues;
    a.push_back(entry);
  }
  return json{{"all_pass", cr.all_pass()}, {"entries", a}};
}

json compositional_to_json(const CompositionalReport& r) {
  json checks = json::array();
  for (const ModuleCheck& mc : r.module_checks) {
    json c{{"module", mc.module},
           {"spec", mc.spec_name},
           {"scope_size", mc.scope.size()},
           {"check", refinement_to_json(mc.scope, r.abstract_scope,
                                        mc.verdict)}};
    checks.push_back(c);
  }
  json o{{"analysis", analysis_to_json(r.analysis)},
         {"constraints", constraints_to_json(r.constraints)},
         {"abstract",
          json{{"scope", r.abstract_scope},
               {"check", exploration_to_json(r.abstract_scope,
                                             r.abstract_report)}}},
         {"module_checks", checks},
         {"invariants", json{{"checked_on_abstract", r.transferable},
                             {"root_only", r.not_transferable}}},
         {"holds", r.holds},
         {"conclusion", r.conclusion},
         {"t_comp_ms", ms_int(r.t_comp_ms)}};
  if (!r.diags.empty()) {
    json d = json::array();
    for (const auto& diag : r.diags) d.push_back(diag.str());
    o["diagnostics"] = d;
  }
  return o;
}

json direct_to_json(const std::vector<std::string>& root_vars,
                    const DirectReport& r) {
  json o{{"refinement",
          refinement_to_json(root_vars, r.abstract_scope, r.verdict)},
         {"exploration", exploration_to_json(root_vars, r.exploration)},
         {"t_direct_ms", ms_int(r.t_direct_ms)}};
  if (!r.unchecked_invariants.empty())
    o["unchecked_invariants"] = r.unchecked_invariants;
  if (!r.diags.empty()) {
    json d = json::array();
    for (const auto& diag : r.diags) d.push_back(diag.str());
    o["diagnostics"] = d;
  }
  return o;
}

json comparison_to_json(const CostComparison& c) {
  json rows = json::array();
  for (const auto& row : c.per_check)
    rows.push_back(json{{"name", row.name},
                        {"states", row.states},
                        {"elapsed_ms", ms_int(row.ms)}});
  json o{{"per_check", rows},
         {"t_comp_ms", ms_int(c.t_comp_ms)},
         {"t_direct_ms", ms_int(c.t_direct_ms)},
         {"max_comp_states", c.max_comp_states},
         {"direct_states", c.direct_states},
         {"complete", c.complete}};
  if (c.complete) {
    o["time_ratio"] = c.time_ratio;
    o["state_ratio"] = c.state_ratio;
  }
  return o;
}

std::string json_str(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ipa
