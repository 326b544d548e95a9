#include <map>
#include <set>

#include "ipa/parser.hpp"

namespace ipa {

namespace {

class Resolver {
 public:
  Resolver(Spec& spec, Diagnostics& diags) : spec_(spec), diags_(diags) {}

  void err(const char* code, const std::string& msg, const SourceSpan& span) {
    diags_.push_back(error(code, msg, span));
  }

  void require(const Type& got, const Type& want, const SourceSpan& span,
               const std::string& what) {
    if (!compatible(got, want))
      err("E-type", what + ": expected " + want.str() + ", got " + got.str(),
          span);
  }

  static Type binder_type(const BinderDomain& d) {
    return binder_domain_type(d);
  }

  // Resolves a constant integer bound: names may refer only to constants.
  bool resolve_bound(ExprPtr& e, int64_t& out, const char* what) {
    resolve_expr(e);
    std::vector<std::string> reads;
    collect_var_reads(e, reads);
    if (!reads.empty()) {
      err("E-const",
          std::string(what) + " must be a constant expression (references '" +
              reads.front() + "')",
          e->span);
      return false;
    }
    auto v = eval_const_expr(spec_, e, diags_);
    if (!v) return false;
    out = *v;
    return true;
  }

  void resolve_binder_domain(BinderDomain& d) {
    if (d.k == BinderDomain::K::Sort) {
      auto it = spec_.sort_index.find(d.sort);
      if (it == spec_.sort_index.end()) {
        err("E-name", "unknown sort '" + d.sort + "'", d.span);
        return;
      }
      d.sort_id = it->second;
      return;
    }
    int64_t lo = 0, hi = -1;
    resolve_bound(d.lo, lo, "range bound");
    resolve_bound(d.hi, hi, "range bound");
    d.lo_val = lo;
    d.hi_val = hi;
  }

  void resolve_var_domain(VarDomain& d) {
    switch (d.k) {
      case VarDomain::K::Bool:
        return;
      case VarDomain::K::IntRange: {
        int64_t lo = 0, hi = -1;
        bool ok = resolve_bound(d.lo, lo, "domain bound");
        ok &= resolve_bound(d.hi, hi, "domain bound");
        d.lo_val = lo;
        d.hi_val = hi;
        if (ok && lo > hi)
          err("E-type", "empty integer domain " + std::to_string(lo) + ".." +
                            std::to_string(hi),
              d.span);
        return;
      }
      case VarDomain::K::Sort: {
        auto it = spec_.sort_index.find(d.sort);
        if (it == spec_.sort_index.end())
          err("E-name", "unknown sort '" + d.sort + "'", d.span);
        else
          d.sort_id = it->second;
        return;
      }
      case VarDomain::K::Set:
      case VarDomain::K::Seq:
        resolve_var_domain(*d.elem);
        return;
      case VarDomain::K::Rec: {
        std::set<std::string> seen;
        for (auto& [n, fd] : d.fields) {
          if (!seen.insert(n).second)
            err("E-dup", "duplicate record field '" + n + "'", d.span);
          resolve_var_domain(fd);
        }
        return;
      }
      case VarDomain::K::Map:
        resolve_binder_domain(*d.key);
        resolve_var_domain(*d.elem);
        return;
    }
  }

  // Binder names may not shadow anything visible: enclosing binders or
  // parameters, variables, constants, sorts or sort members. This keeps
  // every name's meaning positional-order independent.
  void check_binder(const std::string& name, const SourceSpan& span) {
    for (const Binder& b : env_)
      if (b.name == name) {
        err("E-dup",
            "binder '" + name + "' shadows an enclosing binder or parameter",
            span);
        return;
      }
    if (spec_.const_index.count(name) || spec_.sort_index.count(name) ||
        spec_.symbol_sort.count(name) || spec_.var_index.count(name))
      err("E-dup", "binder '" + name + "' shadows a declared name", span);
  }

  void classify_name(Expr& e) {
    for (int i = static_cast<int>(env_.size()) - 1; i >= 0; i--) {
      if (env_[static_cast<size_t>(i)].name == e.name) {
        e.k = Expr::K::ParamRef;
        e.id = i;
        e.type = env_[static_cast<size_t>(i)].type;
        return;
      }
    }
    if (auto it = spec_.const_index.find(e.name);
        it != spec_.const_index.end()) {
      e.k = Expr::K::ConstRef;
      e.id = it->second;
      e.type = Type::integer();
      return;
    }
    if (auto it = spec_.symbol_sort.find(e.name);
        it != spec_.symbol_sort.end()) {
      e.k = Expr::K::SymRef;
      e.id = it->second;
      e.type = Type::sym(spec_.sorts[static_cast<size_t>(it->second)].name);
      return;
    }
    if (auto it = spec_.sort_index.find(e.name); it != spec_.sort_index.end()) {
      e.k = Expr::K::SortVal;
      e.id = it->second;
      e.type = Type::set_of(Type::sym(e.name));
      return;
    }
    if (auto it = spec_.var_index.find(e.name); it != spec_.var_index.end()) {
      e.k = Expr::K::VarRef;
      e.id = it->second;
      e.type = var_types_.count(it->second) ? var_types_.at(it->second)
                                            : Type::unknown();
      return;
    }
    err("E-name", "unresolved name '" + e.name + "'", e.span);
    e.type = Type::unknown();
  }

  void resolve_expr(ExprPtr& ep) {
    Expr& e = *ep;
    switch (e.k) {
      case Expr::K::BoolLit:
        e.type = Type::boolean();
        return;
      case Expr::K::IntLit:
        e.type = Type::integer();
        return;
      case Expr::K::VarRef:
      case Expr::K::ParamRef:
      case Expr::K::ConstRef:
      case Expr::K::SymRef:
      case Expr::K::SortVal:
        classify_name(e);
        return;
      case Expr::K::Arith:
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        require(e.kids[0]->type, Type::integer(), e.kids[0]->span,
                "arithmetic operand");
        require(e.kids[1]->type, Type::integer(), e.kids[1]->span,
                "arithmetic operand");
        e.type = Type::integer();
        return;
      case Expr::K::Cmp:
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        if (e.op == '=' || e.op == '!') {
          if (!compatible(e.kids[0]->type, e.kids[1]->type))
            err("E-type",
                "cannot compare " + e.kids[0]->type.str() + " with " +
                    e.kids[1]->type.str(),
                e.span);
        } else {
          require(e.kids[0]->type, Type::integer(), e.kids[0]->span,
                  "comparison operand");
          require(e.kids[1]->type, Type::integer(), e.kids[1]->span,
                  "comparison operand");
        }
        e.type = Type::boolean();
        return;
      case Expr::K::And:
      case Expr::K::Or:
      case Expr::K::Implies:
        for (auto& k : e.kids) {
          resolve_expr(k);
          require(k->type, Type::boolean(), k->span, "boolean operand");
        }
        e.type = Type::boolean();
        return;
      case Expr::K::Not:
        resolve_expr(e.kids[0]);
        require(e.kids[0]->type, Type::boolean(), e.kids[0]->span,
                "boolean operand");
        e.type = Type::boolean();
        return;
      case Expr::K::SetLit: {
        Type elem = Type::unknown();
        for (auto& k : e.kids) {
          resolve_expr(k);
          if (!compatible(elem, k->type))
            err("E-type",
                "set element " + k->type.str() + " does not match " +
                    elem.str(),
                k->span);
          else
            elem = join(elem, k->type);
        }
        e.type = Type::set_of(elem);
        return;
      }
      case Expr::K::SetFilter: {
        resolve_binder_domain(*e.dom);
        check_binder(e.name, e.span);
        e.slot = static_cast<int>(env_.size());
        env_.push_back({e.name, binder_type(*e.dom)});
        resolve_expr(e.kids[0]);
        require(e.kids[0]->type, Type::boolean(), e.kids[0]->span,
                "filter predicate");
        env_.pop_back();
        e.type = Type::set_of(binder_type(*e.dom));
        return;
      }
      case Expr::K::In: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        const Type& st = e.kids[1]->type;
        if (st.k == Type::K::Set) {
          if (!compatible(e.kids[0]->type, *st.elem))
            err("E-type",
                "membership test of " + e.kids[0]->type.str() + " in " +
                    st.str(),
                e.span);
        } else if (st.k != Type::K::Unknown) {
          err("E-type", "membership target is not a set: " + st.str(),
              e.kids[1]->span);
        }
        e.type = Type::boolean();
        return;
      }
      case Expr::K::Union: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        require(e.kids[0]->type, Type::set_of(Type::unknown()),
                e.kids[0]->span, "union operand");
        require(e.kids[1]->type, Type::set_of(Type::unknown()),
                e.kids[1]->span, "union operand");
        if (!compatible(e.kids[0]->type, e.kids[1]->type))
          err("E-type",
              "union of " + e.kids[0]->type.str() + " with " +
                  e.kids[1]->type.str(),
              e.span);
        e.type = join(e.kids[0]->type, e.kids[1]->type);
        if (e.type.k != Type::K::Set) e.type = Type::set_of(Type::unknown());
        return;
      }
      case Expr::K::Insert: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        require(e.kids[0]->type, Type::set_of(Type::unknown()),
                e.kids[0]->span, "Insert target");
        Type want = Type::set_of(e.kids[1]->type);
        if (!compatible(e.kids[0]->type, want))
          err("E-type",
              "cannot insert " + e.kids[1]->type.str() + " into " +
                  e.kids[0]->type.str(),
              e.span);
        e.type = join(e.kids[0]->type, want);
        if (e.type.k != Type::K::Set) e.type = Type::set_of(Type::unknown());
        return;
      }
      case Expr::K::Card:
        resolve_expr(e.kids[0]);
        require(e.kids[0]->type, Type::set_of(Type::unknown()),
                e.kids[0]->span, "Cardinality argument");
        e.type = Type::integer();
        return;
      case Expr::K::SeqLit: {
        Type elem = Type::unknown();
        for (auto& k : e.kids) {
          resolve_expr(k);
          if (!compatible(elem, k->type))
            err("E-type",
                "sequence element " + k->type.str() + " does not match " +
                    elem.str(),
                k->span);
          else
            elem = join(elem, k->type);
        }
        e.type = Type::seq_of(elem);
        return;
      }
      case Expr::K::Append: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        require(e.kids[0]->type, Type::seq_of(Type::unknown()),
                e.kids[0]->span, "Append target");
        Type want = Type::seq_of(e.kids[1]->type);
        if (!compatible(e.kids[0]->type, want))
          err("E-type",
              "cannot append " + e.kids[1]->type.str() + " to " +
                  e.kids[0]->type.str(),
              e.span);
        e.type = join(e.kids[0]->type, want);
        if (e.type.k != Type::K::Seq) e.type = Type::seq_of(Type::unknown());
        return;
      }
      case Expr::K::Len:
        resolve_expr(e.kids[0]);
        require(e.kids[0]->type, Type::seq_of(Type::unknown()),
                e.kids[0]->span, "Len argument");
        e.type = Type::integer();
        return;
      case Expr::K::Index: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        const Type& bt = e.kids[0]->type;
        if (bt.k == Type::K::Seq) {
          require(e.kids[1]->type, Type::integer(), e.kids[1]->span,
                  "sequence index");
          e.type = bt.elem ? *bt.elem : Type::unknown();
        } else if (bt.k == Type::K::Map) {
          if (bt.key && !compatible(e.kids[1]->type, *bt.key))
            err("E-type",
                "map key " + e.kids[1]->type.str() + " does not match " +
                    bt.key->str(),
                e.kids[1]->span);
          e.type = bt.elem ? *bt.elem : Type::unknown();
        } else if (bt.k == Type::K::Unknown) {
          e.type = Type::unknown();
        } else {
          err("E-type", "cannot index " + bt.str(), e.span);
          e.type = Type::unknown();
        }
        return;
      }
      case Expr::K::SubSeq:
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        resolve_expr(e.kids[2]);
        require(e.kids[0]->type, Type::seq_of(Type::unknown()),
                e.kids[0]->span, "SubSeq argument");
        require(e.kids[1]->type, Type::integer(), e.kids[1]->span,
                "SubSeq bound");
        require(e.kids[2]->type, Type::integer(), e.kids[2]->span,
                "SubSeq bound");
        e.type = e.kids[0]->type.k == Type::K::Seq ? e.kids[0]->type
                                                   : Type::seq_of(Type::unknown());
        return;
      case Expr::K::Field: {
        resolve_expr(e.kids[0]);
        const Type& bt = e.kids[0]->type;
        e.type = Type::unknown();
        if (bt.k == Type::K::Rec) {
          bool found = false;
          for (const auto& [n, t] : bt.fields)
            if (n == e.name) {
              e.type = t;
              found = true;
              break;
            }
          if (!found)
            err("E-name", "record has no field '" + e.name + "'", e.span);
        } else if (bt.k != Type::K::Unknown) {
          err("E-type", "field access on " + bt.str(), e.span);
        }
        return;
      }
      case Expr::K::RecLit: {
        std::set<std::string> seen;
        std::vector<std::pair<std::string, Type>> fs;
        for (auto& [n, v] : e.rec_fields) {
          if (!seen.insert(n).second)
            err("E-dup", "duplicate record field '" + n + "'", e.span);
          resolve_expr(v);
          fs.emplace_back(n, v->type);
        }
        e.type = Type::rec_of(std::move(fs));
        return;
      }
      case Expr::K::RecExcept: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        const Type& bt = e.kids[0]->type;
        e.type = bt;
        if (bt.k == Type::K::Rec) {
          bool found = false;
          for (const auto& [n, t] : bt.fields)
            if (n == e.name) {
              require(e.kids[1]->type, t, e.kids[1]->span,
                      "field '" + e.name + "'");
              found = true;
              break;
            }
          if (!found)
            err("E-name", "record has no field '" + e.name + "'", e.span);
        } else if (bt.k != Type::K::Unknown) {
          err("E-type", "record update on " + bt.str(), e.span);
        }
        return;
      }
      case Expr::K::MapCompr: {
        resolve_binder_domain(*e.dom);
        check_binder(e.name, e.span);
        e.slot = static_cast<int>(env_.size());
        env_.push_back({e.name, binder_type(*e.dom)});
        resolve_expr(e.kids[0]);
        env_.pop_back();
        e.type = Type::map_of(binder_type(*e.dom), e.kids[0]->type);
        return;
      }
      case Expr::K::MapExcept: {
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        resolve_expr(e.kids[2]);
        const Type& bt = e.kids[0]->type;
        e.type = bt;
        if (bt.k == Type::K::Map) {
          if (bt.key && !compatible(e.kids[1]->type, *bt.key))
            err("E-type",
                "map key " + e.kids[1]->type.str() + " does not match " +
                    bt.key->str(),
                e.kids[1]->span);
          if (bt.elem && !compatible(e.kids[2]->type, *bt.elem))
            err("E-type",
                "map value " + e.kids[2]->type.str() + " does not match " +
                    bt.elem->str(),
                e.kids[2]->span);
        } else if (bt.k != Type::K::Unknown) {
          err("E-type", "map update on " + bt.str(), e.span);
        }
        return;
      }
      case Expr::K::Forall:
      case Expr::K::Exists: {
        resolve_binder_domain(*e.dom);
        check_binder(e.name, e.span);
        e.slot = static_cast<int>(env_.size());
        env_.push_back({e.name, binder_type(*e.dom)});
        resolve_expr(e.kids[0]);
        require(e.kids[0]->type, Type::boolean(), e.kids[0]->span,
                "quantifier body");
        env_.pop_back();
        e.type = Type::boolean();
        return;
      }
      case Expr::K::If:
        resolve_expr(e.kids[0]);
        resolve_expr(e.kids[1]);
        resolve_expr(e.kids[2]);
        require(e.kids[0]->type, Type::boolean(), e.kids[0]->span,
                "condition");
        if (!compatible(e.kids[1]->type, e.kids[2]->type)) {
          err("E-type",
              "conditional branches disagree: " + e.kids[1]->type.str() +
                  " vs " + e.kids[2]->type.str(),
              e.span);
          e.type = e.kids[1]->type;
        } else {
          e.type = join(e.kids[1]->type, e.kids[2]->type);
        }
        return;
    }
  }

  void declare(const std::string& name, const char* what,
               const SourceSpan& span) {
    auto [it, fresh] = names_.emplace(name, what);
    if (!fresh)
      err("E-dup",
          "duplicate name '" + name + "' (already a " + it->second + ")",
          span);
  }

  void run() {
    spec_.const_index.clear();
    spec_.sort_index.clear();
    spec_.var_index.clear();
    spec_.symbol_sort.clear();
    names_.clear();
    var_types_.clear();
    env_.clear();

    // Sorts first so variable domains may reference them regardless of
    // declaration order; constants stay order-sensitive.
    for (size_t i = 0; i < spec_.sorts.size(); i++) {
      SortDecl& s = spec_.sorts[i];
      declare(s.name, "sort", s.span);
      spec_.sort_index[s.name] = static_cast<int>(i);
      for (const std::string& m : s.members) {
        declare(m, "sort member", s.span);
        spec_.symbol_sort[m] = static_cast<int>(i);
      }
    }
    for (size_t i = 0; i < spec_.consts.size(); i++) {
      ConstDecl& c = spec_.consts[i];
      declare(c.name, "constant", c.span);
      resolve_expr(c.expr);
      auto v = eval_const_expr(spec_, c.expr, diags_);
      c.value = v.value_or(0);
      spec_.const_index[c.name] = static_cast<int>(i);
    }
    for (size_t i = 0; i < spec_.vars.size(); i++) {
      VarDecl& v = spec_.vars[i];
      declare(v.name, "variable", v.span);
      spec_.var_index[v.name] = static_cast<int>(i);
    }
    for (size_t i = 0; i < spec_.vars.size(); i++) {
      VarDecl& v = spec_.vars[i];
      resolve_var_domain(v.domain);
      var_types_[static_cast<int>(i)] = domain_type(v.domain);
    }
    for (VarDecl& v : spec_.vars) {
      if (!v.init) {
        err("E-init", "variable '" + v.name + "' has no init", v.span);
        continue;
      }
      resolve_expr(v.init);
      std::vector<std::string> reads;
      collect_var_reads(v.init, reads);
      if (!reads.empty())
        err("E-init",
            "init of '" + v.name + "' references state variable '" +
                reads.front() + "'",
            v.init->span);
      require(v.init->type, var_types_.at(spec_.var_index.at(v.name)),
              v.init->span, "init of '" + v.name + "'");
    }

    std::set<std::string> module_names, action_names;
    for (Module& m : spec_.modules) {
      if (!module_names.insert(m.name).second)
        err("E-dup", "duplicate module '" + m.name + "'", m.span);
      for (Action& a : m.actions) {
        if (!action_names.insert(a.name).second)
          err("E-dup",
              "action '" + a.name + "' is declared in more than one module",
              a.span);
        resolve_action(a);
      }
    }
  }

  void resolve_action(Action& a) {
    env_.clear();
    std::set<std::string> seen;
    for (Param& p : a.params) {
      if (!seen.insert(p.name).second)
        err("E-dup", "duplicate parameter '" + p.name + "'", p.span);
      if (names_.count(p.name))
        err("E-dup",
            "parameter '" + p.name + "' shadows a " + names_.at(p.name),
            p.span);
      resolve_binder_domain(p.dom);
      env_.push_back({p.name, binder_type(p.dom)});
    }
    for (ExprPtr& g : a.guards) {
      resolve_expr(g);
      require(g->type, Type::boolean(), g->span, "guard");
    }
    std::set<std::string> updated;
    for (Update& u : a.updates) {
      auto it = spec_.var_index.find(u.var);
      if (it == spec_.var_index.end()) {
        err("E-name", "unresolved variable '" + u.var + "'", u.span);
        continue;
      }
      u.var_id = it->second;
      if (!updated.insert(u.var).second)
        err("E-dup",
            "action '" + a.name + "' updates '" + u.var + "' twice", u.span);
      resolve_expr(u.rhs);
      require(u.rhs->type, var_types_.at(u.var_id), u.rhs->span,
              "update of '" + u.var + "'");
    }
    env_.clear();
  }

  void resolve_with_params(ExprPtr& e, const std::vector<Param>& params) {
    // Rebuild the lookup environment for an expression resolved outside its
    // defining spec (manifest refine/invariant entries, mapping arguments).
    for (const auto& [name, idx] : spec_.var_index)
      var_types_[idx] = domain_type(spec_.vars[static_cast<size_t>(idx)].domain);
    env_.clear();
    for (const Param& p : params) {
      Param copy = p;
      resolve_binder_domain(copy.dom);
      env_.push_back({copy.name, binder_type(copy.dom)});
    }
    resolve_expr(e);
    env_.clear();
  }

 private:
  Spec& spec_;
  Diagnostics& diags_;
  struct Binder {
    std::string name;
    Type type;
  };
  std::vector<Binder> env_;
  std::map<std::string, const char*> names_;
  std::map<int, Type> var_types_;
};

}  // namespace

void resolve_spec(Spec& spec, Diagnostics& diags) {
  Resolver(spec, diags).run();
}

bool resolve_expr_in(Spec& spec, ExprPtr& e, const std::vector<Param>& params,
                     Diagnostics& diags) {
  size_t before = diags.size();
  Resolver(spec, diags).resolve_with_params(e, params);
  for (size_t i = before; i < diags.size(); i++)
    if (diags[i].severity == Severity::Error) return false;
  return true;
}

std::optional<int64_t> eval_const_expr(const Spec& spec, const ExprPtr& e,
                                       Diagnostics& diags) {
  switch (e->k) {
    case Expr::K::IntLit:
      return e->ival;
    case Expr::K::ConstRef:
      if (e->id >= 0 && e->id < static_cast<int>(spec.consts.size()))
        return spec.consts[static_cast<size_t>(e->id)].value;
      break;
    case Expr::K::Arith: {
      auto a = eval_const_expr(spec, e->kids[0], diags);
      auto b = eval_const_expr(spec, e->kids[1], diags);
      if (!a || !b) return std::nullopt;
      switch (e->op) {
        case '+':
          return *a + *b;
        case '-':
          return *a - *b;
        case '*':
          return *a * *b;
        default:
          break;
      }
      break;
    }
    default:
      break;
  }
  diags.push_back(error("E-const", "not a constant expression", e->span));
  return std::nullopt;
}

}  // namespace ipa
