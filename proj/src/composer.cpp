#include "ipa/composer.hpp"

#include <algorithm>
#include <stdexcept>

#include "ipa/eval.hpp"
#include "ipa/parser.hpp"

namespace ipa {

namespace {

ExprPtr make_node(Expr::K k) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  return e;
}

ExprPtr int_lit(int64_t v) {
  auto e = make_node(Expr::K::IntLit);
  e->ival = v;
  return e;
}

std::string fresh_binder(const std::set<std::string>& taken, int depth) {
  std::string n = "k" + std::to_string(depth);
  while (taken.count(n)) n += "x";
  return n;
}

ExprPtr value_expr(const Value& v, const VarDomain* dom,
                   const std::set<std::string>& taken, int depth) {
  switch (v.kind()) {
    case Value::Kind::Bool: {
      auto e = make_node(Expr::K::BoolLit);
      e->bval = v.as_bool();
      return e;
    }
    case Value::Kind::Int:
      return int_lit(v.as_int());
    case Value::Kind::Sym: {
      auto e = make_node(Expr::K::SymRef);
      e->name = v.sym_name();
      return e;
    }
    case Value::Kind::Set: {
      auto e = make_node(Expr::K::SetLit);
      for (const Value& el : v.items())
        e->kids.push_back(
            value_expr(el, dom ? dom->elem.get() : nullptr, taken, depth));
      return e;
    }
    case Value::Kind::Seq: {
      auto e = make_node(Expr::K::SeqLit);
      for (const Value& el : v.items())
        e->kids.push_back(
            value_expr(el, dom ? dom->elem.get() : nullptr, taken, depth));
      return e;
    }
    case Value::Kind::Rec: {
      auto e = make_node(Expr::K::RecLit);
      for (const auto& [fname, fval] : v.fields()) {
        const VarDomain* fd = nullptr;
        if (dom)
          for (const auto& [dn, dv] : dom->fields)
            if (dn == fname) {
              fd = &dv;
              break;
            }
        e->rec_fields.emplace_back(fname, value_expr(fval, fd, taken, depth));
      }
      return e;
    }
    case Value::Kind::Map: {
      if (!dom || !dom->key)
        throw std::logic_error("map value needs its declared domain");
      const auto& entries = v.entries();
      if (entries.empty())
        throw std::logic_error("map value over an empty key domain");
      const Value& base_val = entries.front().second;
      auto compr = make_node(Expr::K::MapCompr);
      compr->name = fresh_binder(taken, depth);
      compr->dom =
          std::make_shared<BinderDomain>(clone_binder_domain(*dom->key));
      compr->kids.push_back(
          value_expr(base_val, dom->elem.get(), taken, depth + 1));
      ExprPtr acc = compr;
      for (const auto& [k, val] : entries) {
        if (val == base_val) continue;
        auto exc = make_node(Expr::K::MapExcept);
        exc->kids.push_back(acc);
        exc->kids.push_back(value_expr(k, nullptr, taken, depth));
        exc->kids.push_back(value_expr(val, dom->elem.get(), taken, depth));
        acc = exc;
      }
      return acc;
    }
  }
  throw std::logic_error("unreachable value kind");
}

// Dependency set of an abstraction spec's single module.
std::set<std::string> abstraction_deps(const Spec& abs) {
  auto deps = module_deps(abs);
  if (deps.size() != 1)
    throw std::logic_error("abstraction spec must hold exactly one module");
  return deps.begin()->second;
}

// Names a spec declares in the value namespace.
std::set<std::string> declared_names(const Spec& s) {
  std::set<std::string> names;
  for (const auto& c : s.consts) names.insert(c.name);
  for (const auto& so : s.sorts) {
    names.insert(so.name);
    names.insert(so.members.begin(), so.members.end());
  }
  for (const auto& v : s.vars) names.insert(v.name);
  return names;
}

// Core assembly shared by the abstract and compositional builders:
// `concrete` names the module kept concrete (empty = none).
std::optional<ComposedSpec> assemble(const Manifest& m, const VarAnalysis& va,
                                     const std::string& concrete,
                                     const std::string& name,
                                     Diagnostics& diags) {
  const Spec& root = m.root;
  const size_t diags_before = diags.size();
  ComposedSpec out;
  out.spec.name = name;
  out.spec.span = m.span;
  out.concrete_module = concrete;

  // Variable scope: interaction variables, the concrete module's dependency
  // variables, and every included abstraction's dependency variables.
  std::set<std::string> scope = va.interaction;
  std::vector<const Spec*> included_abs;  // root-module order
  for (const Module& mod : root.modules) {
    if (mod.name == concrete) {
      auto it = va.module_deps.find(mod.name);
      if (it != va.module_deps.end())
        scope.insert(it->second.begin(), it->second.end());
      continue;
    }
    const auto* entry = m.abstraction_for(mod.name);
    if (!entry) {
      diags.push_back(error(
          "E-compose", "module '" + mod.name + "' has no abstraction",
          m.span));
      return std::nullopt;
    }
    included_abs.push_back(&entry->spec);
    std::set<std::string> ad = abstraction_deps(entry->spec);
    scope.insert(ad.begin(), ad.end());
    out.abstract_modules.push_back(entry->spec.modules.front().name);
  }

  // Declarations: the root's sorts and constants, then any new ones from the
  // included abstractions, in root-module order.
  out.spec.sorts = root.sorts;
  out.spec.consts = root.consts;
  for (auto& c : out.spec.consts) c.expr = clone_expr(c.expr);
  {
    std::set<std::string> have_sorts, have_consts;
    for (const auto& s : out.spec.sorts) have_sorts.insert(s.name);
    for (const auto& c : out.spec.consts) have_consts.insert(c.name);
    for (const Spec* as : included_abs) {
      for (const auto& s : as->sorts)
        if (have_sorts.insert(s.name).second) out.spec.sorts.push_back(s);
      for (const auto& c : as->consts)
        if (have_consts.insert(c.name).second) {
          out.spec.consts.push_back(c);
          out.spec.consts.back().expr = clone_expr(c.expr);
        }
    }
  }

  // Variables: exactly the scope, root declarations first (root order), then
  // abstraction-only declarations in root-module order. Track each
  // declaration's home spec for domain checks below.
  std::set<std::string> added;
  std::vector<const Spec*> home;
  for (const VarDecl& v : root.vars)
    if (scope.count(v.name)) {
      out.spec.vars.push_back(clone_var_decl(v));
      home.push_back(&root);
      added.insert(v.name);
    }
  for (const Spec* as : included_abs)
    for (const VarDecl& v : as->vars)
      if (scope.count(v.name) && !added.count(v.name)) {
        out.spec.vars.push_back(clone_var_decl(v));
        home.push_back(as);
        added.insert(v.name);
      }
  for (const std::string& v : scope)
    if (!added.count(v))
      diags.push_back(error(
          "E-compose",
          "variable '" + v + "' is in the scope of '" + name +
              "' but no included spec declares it",
          m.span));

  // Modules: the concrete one verbatim, abstractions for the rest.
  for (const Module& mod : root.modules) {
    if (mod.name == concrete) {
      out.spec.modules.push_back(clone_module(mod));
    } else {
      const auto* entry = m.abstraction_for(mod.name);
      out.spec.modules.push_back(clone_module(entry->spec.modules.front()));
    }
  }

  // Every included action must stay inside the variable scope.
  for (const Module& mod : out.spec.modules)
    for (const Action& a : mod.actions) {
      std::vector<std::string> reads;
      for (const ExprPtr& g : a.guards) collect_var_reads(g, reads);
      for (const Update& u : a.updates) collect_var_reads(u.rhs, reads);
      std::sort(reads.begin(), reads.end());
      reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
      for (const std::string& v : reads)
        if (!scope.count(v))
          diags.push_back(error(
              "E-compose",
              "action '" + mod.name + "." + a.name + "' of '" + name +
                  "' reads variable '" + v + "' outside its variable scope",
              a.span));
      for (const Update& u : a.updates)
        if (!scope.count(u.var))
          diags.push_back(error(
              "E-compose",
              "action '" + mod.name + "." + a.name + "' of '" + name +
                  "' writes variable '" + u.var +
                  "' outside its variable scope",
              u.span));
    }
  if (has_errors(diags) && diags.size() > diags_before) return std::nullopt;

  // Inits: root variables keep the root's init; abstraction-only variables
  // take their refine expression's value on the root initial state.
  const std::set<std::string> taken = declared_names(out.spec);
  try {
    State root_init = initial_state(root);
    for (size_t i = 0; i < out.spec.vars.size(); i++) {
      VarDecl& v = out.spec.vars[i];
      auto it = root.var_index.find(v.name);
      if (it != root.var_index.end()) {
        v.init = clone_expr(root.vars[static_cast<size_t>(it->second)].init);
        continue;
      }
      const auto* re = m.refine_for(v.name);
      if (!re) {
        diags.push_back(error(
            "E-compose",
            "abstraction-only variable '" + v.name + "' has no refine entry",
            v.span));
        continue;
      }
      Value val = eval_closed(root, re->expr, root_init);
      if (!value_in_domain(*home[i], val, v.domain)) {
        diags.push_back(error(
            "E-compose",
            "refine expression for '" + v.name + "' evaluates to " +
                val.str() + " on the initial state, outside the variable's " +
                "domain",
            re->span));
        continue;
      }
      v.init = value_expr(val, &v.domain, taken, 0);
    }
  } catch (const EvalException& ex) {
    diags.push_back(error("E-compose", ex.err.message, ex.err.span));
    return std::nullopt;
  }
  if (has_errors(diags) && diags.size() > diags_before) return std::nullopt;

  resolve_spec(out.spec, diags);
  if (has_errors(diags) && diags.size() > diags_before) return std::nullopt;

  for (const VarDecl& v : out.spec.vars) out.scope.push_back(v.name);
  return out;
}

ActionTranslation translation_of(const Manifest::ActionMapEntry& e) {
  ActionTranslation t;
  t.is_void = e.is_void;
  t.abs_module = e.abs_module;
  t.abs_action = e.abs_action;
  for (const ExprPtr& a : e.args) t.args.push_back(clone_expr(a));
  return t;
}

ActionTranslation identity_translation(const std::string& module,
                                       const std::string& action) {
  ActionTranslation t;
  t.abs_module = module;
  t.abs_action = action;
  return t;
}

const Manifest::ActionMapEntry* require_mapping(const Manifest& m,
                                                const std::string& module,
                                                const std::string& action) {
  const auto* e = m.mapping_for(module, action);
  if (!e)
    throw std::logic_error("action mapping is not total: missing " + module +
                           "." + action);
  return e;
}

}  // namespace

ExprPtr expr_from_value(const Value& v, const VarDomain& dom,
                        const std::set<std::string>& taken) {
  return value_expr(v, &dom, taken, 0);
}

std::optional<ComposedSpec> build_abstract_spec(const Manifest& m,
                                                const VarAnalysis& va,
                                                Diagnostics& diags) {
  return assemble(m, va, "", m.root.name + "_A", diags);
}

std::optional<ComposedSpec> build_compositional_spec(const Manifest& m,
                                                     const VarAnalysis& va,
                                                     const std::string& module,
                                                     Diagnostics& diags) {
  if (!m.root.find_module(module)) {
    diags.push_back(error(
        "E-compose", "unknown module '" + module + "'", m.span));
    return std::nullopt;
  }
  return assemble(m, va, module, m.root.name + "_C_" + module, diags);
}

ActionMapping root_action_mapping(const Manifest& m) {
  ActionMapping g;
  for (const Module& mod : m.root.modules)
    for (const Action& a : mod.actions)
      g.entries[{mod.name, a.name}] =
          translation_of(*require_mapping(m, mod.name, a.name));
  return g;
}

MappingTriple compose_mappings(const Manifest& m, const std::string& module) {
  MappingTriple t;
  t.g = root_action_mapping(m);
  for (const Module& mod : m.root.modules) {
    for (const Action& a : mod.actions) {
      if (mod.name == module)
        t.g_i.entries[{mod.name, a.name}] =
            identity_translation(mod.name, a.name);
      else
        t.g_i.entries[{mod.name, a.name}] =
            translation_of(*require_mapping(m, mod.name, a.name));
    }
    if (mod.name == module) {
      for (const Action& a : mod.actions)
        t.gbar_i.entries[{mod.name, a.name}] =
            translation_of(*require_mapping(m, mod.name, a.name));
    } else {
      const auto* entry = m.abstraction_for(mod.name);
      if (!entry) continue;  // reported by the build step
      const Module& abs = entry->spec.modules.front();
      for (const Action& a : abs.actions)
        t.gbar_i.entries[{abs.name, a.name}] =
            identity_translation(abs.name, a.name);
    }
  }
  return t;
}

std::string composite_mismatch(const Spec& root, const MappingTriple& t) {
  for (const Module& mod : root.modules)
    for (const Action& a : mod.actions) {
      const std::string who = mod.name + "." + a.name;
      const ActionTranslation* g1 = t.g_i.find(mod.name, a.name);
      const ActionTranslation* g = t.g.find(mod.name, a.name);
      if (!g1 || !g) return "no translation for " + who;
      ActionTranslation composite;
      if (g1->is_void) {
        composite.is_void = true;
      } else {
        const ActionTranslation* g2 =
            t.gbar_i.find(g1->abs_module, g1->abs_action);
        if (!g2)
          return "no second-stage translation for " + who + " via " +
                 g1->abs_module + "." + g1->abs_action;
        if (g2->is_void) {
          composite.is_void = true;
        } else {
          composite.abs_module = g2->abs_module;
          composite.abs_action = g2->abs_action;
          if (g2->args.empty())
            for (const ExprPtr& e : g1->args)
              composite.args.push_back(e);
          else if (g1->args.empty())
            for (const ExprPtr& e : g2->args)
              composite.args.push_back(e);
          else
            return "nested argument translation for " + who;
        }
      }
      if (composite.is_void != g->is_void)
        return "composite of " + who + (composite.is_void ? " is" : " is not") +
               " VOID but the direct mapping " + (g->is_void ? "is" : "is not");
      if (composite.is_void) continue;
      if (composite.abs_module != g->abs_module ||
          composite.abs_action != g->abs_action)
        return "composite of " + who + " targets " + composite.abs_module +
               "." + composite.abs_action + ", direct mapping targets " +
               g->abs_module + "." + g->abs_action;
      if (composite.args.size() != g->args.size())
        return "composite of " + who + " has a different argument count";
      for (size_t i = 0; i < composite.args.size(); i++)
        if (!expr_equal(composite.args[i], g->args[i]))
          return "composite of " + who + " differs in argument " +
                 std::to_string(i + 1);
    }
  return "";
}

namespace {

// Partition the manifest's invariants: resolvable over `abs` (checked
// there), resolvable only over the root (direct checking), or erroneous.
struct InvariantSplit {
  std::vector<NamedInvariant> on_abstract, on_root;
  std::vector<std::string> abstract_names, root_only_names;
};

InvariantSplit split_invariants(Manifest& m, Spec& abs, Diagnostics& diags) {
  InvariantSplit s;
  for (const auto& inv : m.invariants) {
    ExprPtr ea = clone_expr(inv.expr);
    Diagnostics da;
    if (resolve_expr_in(abs, ea, {}, da) &&
        compatible(ea->type, Type::boolean())) {
      s.on_abstract.push_back({inv.name, ea});
      s.abstract_names.push_back(inv.name);
      continue;
    }
    ExprPtr er = clone_expr(inv.expr);
    Diagnostics dr;
    bool resolved = resolve_expr_in(m.root, er, {}, dr);
    if (resolved && compatible(er->type, Type::boolean())) {
      s.on_root.push_back({inv.name, er});
      s.root_only_names.push_back(inv.name);
      continue;
    }
    if (!resolved)
      for (const auto& d : dr) diags.push_back(d);
    else
      diags.push_back(error(
          "E-type", "invariant '" + inv.name + "' is not boolean", inv.span));
  }
  return s;
}

}  // namespace

CompositionalReport compositional_check(Manifest& m,
                                        const ExploreBounds& bounds) {
  CompositionalReport r;
  r.analysis = analyze(m.root);
  r.constraints = check_abstraction_constraints(m, r.analysis);
  std::string block;
  if (!r.constraints.all_pass()) block = "abstraction constraints fail";

  auto A = build_abstract_spec(m, r.analysis, r.diags);
  if (!A) {
    r.conclusion =
        "blocked: " + (block.empty() ? std::string("the abstract system "
                                                   "cannot be built")
                                     : block);
    return r;
  }
  r.abstract_scope = A->scope;

  InvariantSplit inv = split_invariants(m, A->spec, r.diags);
  r.transferable = inv.abstract_names;
  r.not_transferable = inv.root_only_names;

  r.abstract_report = explore(A->spec, inv.on_abstract, bounds);
  if (r.abstract_report.verdict != ExploreStatus::Pass && block.empty())
    block = std::string("abstract system check: ") +
            explore_status_str(r.abstract_report.verdict);

  for (const Module& mod : m.root.modules) {
    auto C = build_compositional_spec(m, r.analysis, mod.name, r.diags);
    if (!C) {
      if (block.empty()) block = "C_" + mod.name + " cannot be built";
      continue;
    }
    MappingTriple t = compose_mappings(m, mod.name);
    std::string mismatch = composite_mismatch(m.root, t);
    if (!mismatch.empty()) {
      r.diags.push_back(error(
          "E-compose", "action-mapping composition is inconsistent: " +
                           mismatch,
          m.span));
      if (block.empty()) block = "action mappings around " + mod.name;
      continue;
    }
    // Translation arguments were written against the root spec; re-resolve
    // them against this compositional spec before evaluating over it.
    bool args_ok = true;
    for (auto& [key, tr] : t.gbar_i.entries) {
      if (tr.args.empty()) continue;
      const Action* ca = C->spec.find_action(key.first, key.second);
      if (!ca) continue;
      for (ExprPtr& arg : tr.args)
        args_ok = resolve_expr_in(C->spec, arg, ca->params, r.diags) && args_ok;
    }
    auto sm = build_state_mapping(C->spec, A->spec, m.refine, r.diags);
    if (!sm || !args_ok) {
      if (block.empty()) block = "state mapping for C_" + mod.name;
      continue;
    }
    ModuleCheck mc;
    mc.module = mod.name;
    mc.spec_name = C->spec.name;
    mc.scope = C->scope;
    mc.verdict = check_strong_refinement(C->spec, A->spec, *sm, t.gbar_i,
                                         bounds);
    r.t_comp_ms += mc.verdict.elapsed_ms;
    r.module_checks.push_back(std::move(mc));
  }

  if (block.empty())
    for (const ModuleCheck& mc : r.module_checks) {
      if (mc.verdict.status == RefinementStatus::Fails) {
        block = "C_" + mc.module + " => A fails: " + mc.verdict.reason;
        break;
      }
      if (mc.verdict.status == RefinementStatus::Inconclusive) {
        block = "inconclusive at C_" + mc.module;
        break;
      }
    }
  if (block.empty() && r.module_checks.size() != m.root.modules.size())
    block = "not every module was checked";
  if (block.empty() && has_errors(r.diags)) block = "invalid input";

  r.holds = block.empty();
  r.conclusion = r.holds ? "S => A" : "blocked: " + block;
  return r;
}

DirectReport direct_check(Manifest& m, const ExploreBounds& bounds) {
  DirectReport r;
  VarAnalysis va = analyze(m.root);
  auto A = build_abstract_spec(m, va, r.diags);
  if (!A) return r;
  r.abstract_scope = A->scope;

  auto sm = build_state_mapping(m.root, A->spec, m.refine, r.diags);
  if (!sm) return r;

  InvariantSplit inv = split_invariants(m, A->spec, r.diags);
  // Invariants expressible over the root system are checked on it directly;
  // the rest are only stated over abstraction-introduced variables and are
  // covered by the refinement verdict plus the abstract system's check.
  std::vector<NamedInvariant> on_root = inv.on_root;
  for (const auto& ni : inv.on_abstract) {
    ExprPtr er = clone_expr(ni.expr);
    Diagnostics dr;
    if (resolve_expr_in(m.root, er, {}, dr) &&
        compatible(er->type, Type::boolean()))
      on_root.push_back({ni.name, er});
    else
      r.unchecked_invariants.push_back(ni.name);
  }

  r.verdict = check_strong_refinement(m.root, A->spec, *sm,
                                      root_action_mapping(m), bounds);
  r.exploration = explore(m.root, on_root, bounds);
  r.t_direct_ms = r.verdict.elapsed_ms + r.exploration.elapsed_ms;
  return r;
}

CostComparison compare_costs(const CompositionalReport& comp,
                             const DirectReport& direct) {
  CostComparison c;
  c.per_check.push_back({"A", comp.abstract_report.distinct_states,
                         comp.abstract_report.elapsed_ms});
  for (const ModuleCheck& mc : comp.module_checks)
    c.per_check.push_back({"C_" + mc.module, mc.verdict.states_explored,
                           mc.verdict.elapsed_ms});
  c.t_comp_ms = comp.t_comp_ms;
  c.t_direct_ms = direct.t_direct_ms;
  for (const auto& row : c.per_check)
    c.max_comp_states = std::max(c.max_comp_states, row.states);
  c.direct_states = std::max(direct.verdict.states_explored,
                             direct.exploration.distinct_states);

  bool comp_done =
      comp.abstract_report.verdict != ExploreStatus::BoundExceeded;
  for (const ModuleCheck& mc : comp.module_checks)
    comp_done =
        comp_done && mc.verdict.status != RefinementStatus::Inconclusive;
  bool direct_done =
      direct.verdict.status != RefinementStatus::Inconclusive &&
      direct.exploration.verdict != ExploreStatus::BoundExceeded;
  c.complete = comp_done && direct_done;
  if (c.complete && c.t_comp_ms > 0.0)
    c.time_ratio = c.t_direct_ms / c.t_comp_ms;
  if (c.complete && c.max_comp_states > 0)
    c.state_ratio = static_cast<double>(c.direct_states) /
                    static_cast<double>(c.max_comp_states);
  return c;
}

}  // namespace ipa
