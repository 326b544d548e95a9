#include "ipa/refinement.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ipa/eval.hpp"
#include "ipa/parser.hpp"

namespace ipa {

const char* refinement_status_str(RefinementStatus s) {
  switch (s) {
    case RefinementStatus::Holds:
      return "holds";
    case RefinementStatus::Fails:
      return "fails";
    case RefinementStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::optional<StateMapping> build_state_mapping(
    Spec& B, const Spec& A, const std::vector<Manifest::RefineEntry>& refine,
    Diagnostics& diags) {
  StateMapping sm;
  bool ok = true;
  for (const VarDecl& av : A.vars) {
    // A variable that exists in B maps identically; refine expressions only
    // stand in for variables B does not declare.
    ExprPtr e;
    SourceSpan where = av.span;
    if (B.var_index.count(av.name)) {
      e = std::make_shared<Expr>();
      e->k = Expr::K::VarRef;
      e->name = av.name;
      e->span = av.span;
    } else {
      for (const auto& re : refine)
        if (re.var == av.name) {
          e = clone_expr(re.expr);
          where = re.span;
          break;
        }
      if (!e) {
        diags.push_back(error(
            "E-mapping",
            "variable '" + av.name +
                "' of the abstract spec has no counterpart in '" + B.name +
                "' and no refine entry",
            av.span));
        ok = false;
        continue;
      }
    }
    if (!resolve_expr_in(B, e, {}, diags)) {
      ok = false;
      continue;
    }
    if (!compatible(e->type, domain_type(av.domain))) {
      diags.push_back(error(
          "E-mapping",
          "mapping for '" + av.name + "' has type " + e->type.str() +
              ", expected " + domain_type(av.domain).str(),
          where));
      ok = false;
      continue;
    }
    sm.exprs.push_back(std::move(e));
  }
  if (!ok) return std::nullopt;
  return sm;
}

State project_state(const Spec& B, const StateMapping& sm, const State& s) {
  std::vector<Value> vals;
  vals.reserve(sm.exprs.size());
  for (const ExprPtr& e : sm.exprs) vals.push_back(eval_closed(B, e, s));
  return State::make(std::move(vals));
}

namespace {

// Compact per-state record: the state itself lives in the dedup index,
// the projection is interned (projections collapse many-to-one, so the
// distinct ones roughly number the abstract system's states), and the
// discovering instance holds module/action positions instead of names.
struct CompactInst {
  uint32_t module_idx = 0;
  uint32_t action_idx = 0;
  Binding binding;
};

struct Stored {
  const State* state;   // owned by the dedup index; nodes are stable
  uint32_t proj_id;
  int64_t pred;
  CompactInst via;
};

ActionInstance materialize(const Spec& spec, const CompactInst& ci) {
  const Module& m = spec.modules[ci.module_idx];
  return {m.name, m.actions[ci.action_idx].name, ci.binding};
}

Trace trace_to(const Spec& spec, const std::deque<Stored>& stored,
               size_t idx) {
  std::vector<Trace::Step> steps;
  int64_t i = static_cast<int64_t>(idx);
  while (stored[static_cast<size_t>(i)].pred >= 0) {
    const Stored& s = stored[static_cast<size_t>(i)];
    steps.push_back({materialize(spec, s.via), *s.state});
    i = s.pred;
  }
  std::reverse(steps.begin(), steps.end());
  return Trace{*stored[static_cast<size_t>(i)].state, std::move(steps)};
}

// Translated binding for the mapped abstract instance; nullopt when an
// argument value falls outside the abstract parameter's domain.
std::optional<Binding> translate_binding(const Spec& B, const Spec& A,
                                         const ActionTranslation& tr,
                                         const Action& target,
                                         const Binding& concrete,
                                         const State& pre) {
  Binding out;
  if (tr.args.empty()) {
    out = concrete;
  } else {
    Env env(concrete.begin(), concrete.end());
    out.reserve(tr.args.size());
    for (const ExprPtr& arg : tr.args)
      out.push_back(eval_expr(B, arg, pre, env));
  }
  if (out.size() != target.params.size()) return std::nullopt;
  for (size_t i = 0; i < out.size(); i++) {
    std::vector<Value> dom = binder_values(A, target.params[i].dom);
    if (std::find(dom.begin(), dom.end(), out[i]) == dom.end())
      return std::nullopt;
  }
  return out;
}

// Pre-resolved translation for one concrete action: its map entry, the
// abstract target, and the target's parameter domains, so the per-transition
// work needs no name lookups and no domain re-enumeration.
struct TransInfo {
  const ActionTranslation* tr = nullptr;
  const Action* target = nullptr;  // null for void entries
  std::vector<std::vector<Value>> doms;
};

std::optional<Binding> translate_with(const Spec& B, const TransInfo& ti,
                                      const Binding& concrete,
                                      const State& pre) {
  Binding out;
  if (ti.tr->args.empty()) {
    out = concrete;
  } else {
    Env env(concrete.begin(), concrete.end());
    out.reserve(ti.tr->args.size());
    for (const ExprPtr& arg : ti.tr->args)
      out.push_back(eval_expr(B, arg, pre, env));
  }
  if (out.size() != ti.target->params.size()) return std::nullopt;
  for (size_t i = 0; i < out.size(); i++)
    if (std::find(ti.doms[i].begin(), ti.doms[i].end(), out[i]) ==
        ti.doms[i].end())
      return std::nullopt;
  return out;
}

std::vector<std::vector<TransInfo>> build_translation_table(
    const Spec& B, const Spec& A, const ActionMapping& am) {
  std::vector<std::vector<TransInfo>> table(B.modules.size());
  for (size_t mi = 0; mi < B.modules.size(); mi++) {
    const Module& m = B.modules[mi];
    table[mi].resize(m.actions.size());
    for (size_t ai = 0; ai < m.actions.size(); ai++) {
      const Action& a = m.actions[ai];
      TransInfo& ti = table[mi][ai];
      ti.tr = am.find(m.name, a.name);
      if (!ti.tr)
        throw std::logic_error("action mapping is not total: missing " +
                               m.name + "." + a.name);
      if (ti.tr->is_void) continue;
      ti.target = A.find_action(ti.tr->abs_module, ti.tr->abs_action);
      if (!ti.target)
        throw std::logic_error("mapped action '" + ti.tr->abs_module + "." +
                               ti.tr->abs_action + "' does not exist");
      for (const Param& p : ti.target->params)
        ti.doms.push_back(binder_values(A, p.dom));
    }
  }
  return table;
}

std::string instance_str(const ActionInstance& inst) {
  return inst.module + "." + inst.action + binding_str(inst.binding);
}

}  // namespace

RefinementVerdict check_strong_refinement(const Spec& B, const Spec& A,
                                          const StateMapping& sm,
                                          const ActionMapping& am,
                                          const ExploreBounds& bounds) {
  const auto t0 = std::chrono::steady_clock::now();
  RefinementVerdict verdict;
  std::deque<Stored> stored;
  std::unordered_map<State, size_t, StateHash> index;

  // Interned projections: never hold a reference into `projs` across an
  // intern call; fetch by id instead.
  std::vector<State> projs;
  std::unordered_map<State, uint32_t, StateHash> proj_index;
  auto intern_proj = [&](State p) -> uint32_t {
    auto it = proj_index.find(p);
    if (it != proj_index.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(projs.size());
    projs.push_back(p);
    proj_index.emplace(std::move(p), id);
    return id;
  };

  const std::vector<std::vector<TransInfo>> table =
      build_translation_table(B, A, am);

  auto finish = [&](RefinementStatus s) -> RefinementVerdict& {
    verdict.status = s;
    verdict.states_explored = stored.size();
    verdict.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    return verdict;
  };
  auto fail = [&](size_t pre_idx, const ActionInstance* inst,
                  const State* post, const State* post_proj,
                  const std::string& reason,
                  const std::string& detail) -> RefinementVerdict& {
    verdict.reason = reason;
    verdict.detail = detail;
    verdict.trace = trace_to(B, stored, pre_idx);
    verdict.abstract_pre = projs[stored[pre_idx].proj_id];
    if (inst && post) {
      verdict.trace.steps.push_back({*inst, *post});
      verdict.abstract_post = *post_proj;
    }
    verdict.failing_step = verdict.trace.steps.size();
    return finish(RefinementStatus::Fails);
  };

  State b_init = initial_state(B);
  State a_init = initial_state(A);
  State b_init_proj = project_state(B, sm, b_init);
  auto [init_it, init_ok] = index.emplace(std::move(b_init), 0);
  (void)init_ok;
  stored.push_back({&init_it->first, intern_proj(b_init_proj), -1, {}});
  if (!(b_init_proj == a_init)) {
    verdict.abstract_post = a_init;
    return fail(0, nullptr, nullptr, nullptr, "initial-state mismatch",
                "projected initial state " + canonical_key(b_init_proj) +
                    " differs from the abstract initial state " +
                    canonical_key(a_init));
  }

  std::vector<size_t> frontier = {0};
  size_t level = 0;
  while (!frontier.empty()) {
    if (level >= bounds.max_depth) {
      for (size_t idx : frontier)
        if (!successors(B, *stored[idx].state).empty()) {
          verdict.reason = "bound-exceeded";
          return finish(RefinementStatus::Inconclusive);
        }
      break;
    }
    std::vector<size_t> next_frontier;
    for (size_t idx : frontier) {
      const State& pre = *stored[idx].state;
      const uint32_t pre_pid = stored[idx].proj_id;
      for (Successor& sc : successors(B, pre)) {
        verdict.transitions_checked++;
        const TransInfo& ti = table[sc.module_idx][sc.action_idx];
        auto post_it = index.find(sc.state);
        const bool seen = post_it != index.end();
        State post_proj;
        if (seen)
          post_proj = projs[stored[post_it->second].proj_id];
        else
          post_proj = project_state(B, sm, sc.state);
        if (ti.tr->is_void) {
          bool same = seen ? stored[post_it->second].proj_id == pre_pid
                           : post_proj == projs[pre_pid];
          if (!same)
            return fail(idx, &sc.inst, &sc.state, &post_proj,
                        "VOID step changed projection",
                        "VOID-mapped instance " + instance_str(sc.inst) +
                            " must leave the abstract projection unchanged");
        } else {
          std::optional<Binding> ab =
              translate_with(B, ti, sc.inst.binding, pre);
          if (!ab)
            return fail(idx, &sc.inst, &sc.state, &post_proj,
                        "mapped action disabled",
                        "translated arguments of " + instance_str(sc.inst) +
                            " fall outside the parameter domains of '" +
                            ti.tr->abs_action + "'");
          const State& pre_proj = projs[pre_pid];
          if (!action_enabled(A, *ti.target, *ab, pre_proj))
            return fail(idx, &sc.inst, &sc.state, &post_proj,
                        "mapped action disabled",
                        "instance '" + ti.tr->abs_module + "." +
                            ti.tr->abs_action + binding_str(*ab) +
                            "' is not enabled in the projected pre-state");
          State expect = apply_action(A, *ti.target, *ab, pre_proj);
          if (!(expect == post_proj))
            return fail(idx, &sc.inst, &sc.state, &post_proj,
                        "wrong post-state",
                        "instance '" + ti.tr->abs_module + "." +
                            ti.tr->abs_action + binding_str(*ab) +
                            "' produces " + canonical_key(expect) +
                            " but the projected post-state is " +
                            canonical_key(post_proj));
        }
        if (seen) continue;
        if (stored.size() >= bounds.max_states) {
          verdict.reason = "bound-exceeded";
          return finish(RefinementStatus::Inconclusive);
        }
        uint32_t pid = intern_proj(std::move(post_proj));
        size_t id = stored.size();
        auto [nit, fresh] = index.emplace(std::move(sc.state), id);
        (void)fresh;
        stored.push_back({&nit->first, pid, static_cast<int64_t>(idx),
                          {sc.module_idx, sc.action_idx,
                           std::move(sc.inst.binding)}});
        next_frontier.push_back(id);
      }
    }
    frontier = std::move(next_frontier);
    level++;
  }
  return finish(RefinementStatus::Holds);
}

OracleResult trace_inclusion_oracle(const Spec& B, const Spec& A,
                                    const StateMapping& sm,
                                    const ActionMapping& am, size_t depth,
                                    size_t max_states) {
  OracleResult result;

  // Guard: enumerate B's reachable states, refusing beyond max_states.
  std::unordered_map<State, size_t, StateHash> b_index;
  std::vector<State> b_states;
  std::vector<std::vector<Successor>> b_succs;
  {
    State init = initial_state(B);
    b_index.emplace(init, 0);
    b_states.push_back(init);
    for (size_t i = 0; i < b_states.size(); i++) {
      b_succs.push_back(successors(B, b_states[i]));
      for (const Successor& sc : b_succs[i]) {
        if (b_index.count(sc.state)) continue;
        if (b_states.size() >= max_states) {
          result.refused = true;
          result.note = "more than " + std::to_string(max_states) +
                        " reachable states";
          return result;
        }
        b_index.emplace(sc.state, b_states.size());
        b_states.push_back(sc.state);
      }
    }
  }

  std::vector<State> b_proj;
  b_proj.reserve(b_states.size());
  for (const State& s : b_states) b_proj.push_back(project_state(B, sm, s));

  if (!(b_proj[0] == initial_state(A))) {
    result.status = RefinementStatus::Fails;
    result.note = "initial-state mismatch";
    return result;
  }

  // Mapped-step validation via A's successor sets (the independent route):
  // a non-VOID step is valid iff A has a successor edge with the same
  // instance and the projected post-state.
  std::unordered_map<State, std::vector<Successor>, StateHash> a_succs;
  auto a_successors = [&](const State& s) -> const std::vector<Successor>& {
    auto it = a_succs.find(s);
    if (it == a_succs.end()) it = a_succs.emplace(s, successors(A, s)).first;
    return it->second;
  };

  auto step_ok = [&](size_t pre_id, const Successor& sc,
                     size_t post_id) -> bool {
    const ActionTranslation* tr = am.find(sc.inst.module, sc.inst.action);
    if (!tr)
      throw std::logic_error("action mapping is not total: missing " +
                             sc.inst.module + "." + sc.inst.action);
    if (tr->is_void) return b_proj[post_id] == b_proj[pre_id];
    const Action* target = A.find_action(tr->abs_module, tr->abs_action);
    if (!target)
      throw std::logic_error("mapped action '" + tr->abs_module + "." +
                             tr->abs_action + "' does not exist");
    std::optional<Binding> ab = translate_binding(
        B, A, *tr, *target, sc.inst.binding, b_states[pre_id]);
    if (!ab) return false;
    for (const Successor& asc : a_successors(b_proj[pre_id])) {
      if (asc.inst.module != tr->abs_module ||
          asc.inst.action != tr->abs_action)
        continue;
      if (asc.inst.binding.size() != ab->size()) continue;
      bool same = true;
      for (size_t i = 0; i < ab->size(); i++)
        if (!(asc.inst.binding[i] == (*ab)[i])) {
          same = false;
          break;
        }
      if (same && asc.state == b_proj[post_id]) return true;
    }
    return false;
  };

  // All traces of length <= depth from each state, memoized on
  // (state, remaining): a memo hit means every continuation of that length
  // from that state maps validly.
  std::unordered_set<uint64_t> memo;
  auto key = [](size_t id, size_t remaining) {
    return (static_cast<uint64_t>(id) << 16) | remaining;
  };
  std::function<bool(size_t, size_t)> walk = [&](size_t id,
                                                 size_t remaining) -> bool {
    if (remaining == 0) return true;
    if (memo.count(key(id, remaining))) return true;
    for (const Successor& sc : b_succs[id]) {
      size_t post_id = b_index.at(sc.state);
      if (!step_ok(id, sc, post_id)) return false;
      if (!walk(post_id, remaining - 1)) return false;
    }
    memo.insert(key(id, remaining));
    return true;
  };

  result.status =
      walk(0, depth) ? RefinementStatus::Holds : RefinementStatus::Fails;
  return result;
}

}  // namespace ipa
