#include "ipa/analysis.hpp"

#include <stdexcept>

namespace ipa {

namespace {

std::set<std::string> reads_of(const ExprPtr& e) {
  std::vector<std::string> names;
  collect_var_reads(e, names);
  return {names.begin(), names.end()};
}

std::set<std::string> unite(const std::set<std::string>& a,
                            const std::set<std::string>& b) {
  std::set<std::string> r = a;
  r.insert(b.begin(), b.end());
  return r;
}

// Substitutes parameter references by name; used to compare abstract update
// clauses against concrete ones modulo the positional parameter renaming.
ExprPtr subst_param_names(const ExprPtr& e,
                          const std::map<std::string, ExprPtr>& by_name) {
  if (!e) return nullptr;
  if (e->k == Expr::K::ParamRef) {
    auto it = by_name.find(e->name);
    if (it != by_name.end()) return clone_expr(it->second);
  }
  ExprPtr c = clone_expr(e);
  for (auto& kid : c->kids) kid = subst_param_names(kid, by_name);
  for (auto& [n, f] : c->rec_fields) f = subst_param_names(f, by_name);
  return c;
}

}  // namespace

std::set<std::string> action_deps(const Action& a) {
  std::set<std::string> out;
  for (const ExprPtr& g : a.guards) {
    std::set<std::string> r = reads_of(g);
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::map<std::string, std::set<std::string>> module_deps(const Spec& spec) {
  std::map<std::string, std::set<std::string>> out;
  for (const Module& m : spec.modules) {
    std::set<std::string>& d = out[m.name];
    for (const Action& a : m.actions) {
      std::set<std::string> r = action_deps(a);
      d.insert(r.begin(), r.end());
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Action& a : m.actions)
        for (const Update& u : a.updates) {
          if (!d.count(u.var)) continue;
          for (const std::string& r : reads_of(u.rhs))
            changed |= d.insert(r).second;
        }
    }
  }
  return out;
}

std::set<std::string> interaction_vars(
    const Spec& spec,
    const std::map<std::string, std::set<std::string>>& deps) {
  std::set<std::string> inter;
  std::vector<const std::set<std::string>*> ds;
  for (const Module& m : spec.modules) ds.push_back(&deps.at(m.name));
  for (size_t i = 0; i < ds.size(); i++)
    for (size_t j = i + 1; j < ds.size(); j++)
      for (const std::string& v : *ds[i])
        if (ds[j]->count(v)) inter.insert(v);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Module& m : spec.modules) {
      const std::set<std::string>& d = deps.at(m.name);
      for (const Action& a : m.actions)
        for (const Update& u : a.updates) {
          bool to_interaction = inter.count(u.var) != 0;
          bool to_own_dep = !to_interaction && d.count(u.var) != 0;
          if (!to_interaction && !to_own_dep) continue;
          for (const std::string& r : reads_of(u.rhs))
            if (!d.count(r)) changed |= inter.insert(r).second;
        }
    }
  }
  return inter;
}

std::map<std::string, std::set<std::string>> internal_vars(
    const std::map<std::string, std::set<std::string>>& deps,
    const std::set<std::string>& interaction) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [m, d] : deps) {
    std::set<std::string>& l = out[m];
    for (const std::string& v : d)
      if (!interaction.count(v)) l.insert(v);
  }
  for (const auto& [mi, li] : out)
    for (const auto& [mj, dj] : deps) {
      if (mi == mj) continue;
      for (const std::string& v : li)
        if (dj.count(v))
          throw std::logic_error(
              "analysis bug: internal variable '" + v + "' of module '" + mi +
              "' also appears in the dependency set of '" + mj + "'");
    }
  return out;
}

VarAnalysis analyze(const Spec& spec) {
  VarAnalysis va;
  for (const Module& m : spec.modules)
    for (const Action& a : m.actions)
      va.action_deps[m.name + "." + a.name] = action_deps(a);
  va.module_deps = module_deps(spec);
  va.interaction = interaction_vars(spec, va.module_deps);
  va.internal = internal_vars(va.module_deps, va.interaction);
  for (const Module& m : spec.modules) {
    const std::set<std::string>& d = va.module_deps.at(m.name);
    for (const Action& a : m.actions)
      for (const Update& u : a.updates)
        if (!d.count(u.var) && !va.interaction.count(u.var))
          va.warnings.push_back(warning(
              "W-blind-write",
              "action '" + m.name + "." + a.name + "' writes '" + u.var +
                  "' outside its module's dependency and interaction "
                  "variables",
              u.span));
  }
  return va;
}

namespace {

void check_constraint_1(const Manifest& m, const VarAnalysis& va,
                        const Manifest::AbstractionEntry& abse,
                        const std::set<std::string>& abs_deps,
                        ConstraintVerdict& out) {
  std::set<std::string> allowed =
      unite(va.interaction, va.module_deps.at(abse.module));
  for (const std::string& v : abs_deps) {
    if (const auto* re = m.refine_for(v)) {
      for (const std::string& r : reads_of(re->expr))
        if (!allowed.count(r))
          out.issues.push_back(
              {"abstract dependency '" + v + "' refines through '" + r +
                   "', which is outside interaction ∪ deps(" + abse.module +
                   ")",
               re->span});
      continue;
    }
    if (!allowed.count(v))
      out.issues.push_back(
          {"abstraction depends on '" + v +
               "', which is outside interaction ∪ deps(" + abse.module + ")",
           abse.span});
  }
}

void check_updates_read_within(const std::set<std::string>& target_vars,
                               const std::set<std::string>& allowed,
                               const Module& abs_module,
                               const std::string& what,
                               ConstraintVerdict& out) {
  for (const Action& a : abs_module.actions)
    for (const Update& u : a.updates) {
      if (!target_vars.count(u.var)) continue;
      for (const std::string& r : reads_of(u.rhs))
        if (!allowed.count(r))
          out.issues.push_back(
              {"update of " + what + " '" + u.var + "' in action '" + a.name +
                   "' reads '" + r + "' outside the allowed variables",
               u.span});
    }
}

void check_constraint_4(const Manifest& m, const VarAnalysis& va,
                        const Module& concrete, ConstraintVerdict& out) {
  for (const Action& a : concrete.actions) {
    const auto* me = m.mapping_for(concrete.name, a.name);
    if (!me) continue;  // manifest validation already failed
    if (me->is_void) {
      const std::set<std::string>& own_internal = va.internal.at(concrete.name);
      for (const Update& u : a.updates)
        if (!own_internal.count(u.var))
          out.issues.push_back(
              {"action '" + a.name + "' is mapped to VOID but updates '" +
                   u.var + "', which is not internal to module '" +
                   concrete.name + "'",
               u.span});
      continue;
    }
    const auto* abse = m.abstraction_for(concrete.name);
    const Action* target =
        abse ? abse->spec.find_action(me->abs_module, me->abs_action)
             : nullptr;
    if (!target) continue;
    std::map<std::string, ExprPtr> subst;
    for (size_t j = 0; j < target->params.size(); j++) {
      if (!me->args.empty()) {
        subst[target->params[j].name] = me->args[j];
      } else {
        auto p = std::make_shared<Expr>();
        p->k = Expr::K::ParamRef;
        p->name = a.params[j].name;
        subst[target->params[j].name] = p;
      }
    }
    for (const Update& u : a.updates) {
      bool foreign_internal = false;
      for (const auto& [mod, internal] : va.internal)
        if (mod != concrete.name && internal.count(u.var))
          foreign_internal = true;
      if (!foreign_internal) continue;
      bool preserved = false;
      for (const Update& tu : target->updates)
        if (tu.var == u.var &&
            expr_equal(u.rhs, subst_param_names(tu.rhs, subst))) {
          preserved = true;
          break;
        }
      if (!preserved)
        out.issues.push_back(
            {"action '" + a.name + "' updates '" + u.var +
                 "', internal to another module, but '" + me->abs_module +
                 "." + me->abs_action +
                 "' has no structurally equal update clause for it",
             u.span});
    }
  }
}

}  // namespace

ConstraintReport check_abstraction_constraints(const Manifest& m,
                                               const VarAnalysis& va) {
  ConstraintReport report;
  for (const Module& concrete : m.root.modules) {
    const auto* abse = m.abstraction_for(concrete.name);
    if (!abse || abse->spec.modules.size() != 1) continue;
    const Module& abs_module = abse->spec.modules.front();
    std::set<std::string> abs_deps =
        module_deps(abse->spec).at(abs_module.name);
    std::set<std::string> abs_internal;
    for (const std::string& v : abs_deps)
      if (!va.interaction.count(v)) abs_internal.insert(v);
    std::set<std::string> allowed = unite(abs_deps, va.interaction);

    ConstraintVerdict c1{concrete.name, 1, false, {}};
    check_constraint_1(m, va, *abse, abs_deps, c1);
    ConstraintVerdict c2{concrete.name, 2, false, {}};
    check_updates_read_within(va.interaction, allowed, abs_module,
                              "interaction variable", c2);
    ConstraintVerdict c3{concrete.name, 3, false, {}};
    check_updates_read_within(abs_internal, allowed, abs_module,
                              "internal variable", c3);
    ConstraintVerdict c4{concrete.name, 4, false, {}};
    check_constraint_4(m, va, concrete, c4);

    for (ConstraintVerdict* v : {&c1, &c2, &c3, &c4}) {
      v->pass = v->issues.empty();
      report.entries.push_back(std::move(*v));
    }
  }
  return report;
}

}  // namespace ipa
