#include "ipa/eval.hpp"

#include <algorithm>

namespace ipa {

namespace {

[[noreturn]] void fail(const std::string& msg, const SourceSpan& span,
                       std::string context = "") {
  throw EvalException(EvalError{msg, span, std::move(context)});
}

bool truthy(const Spec& spec, const ExprPtr& e, const State& st, Env& env) {
  return eval_expr(spec, e, st, env).as_bool();
}

}  // namespace

std::vector<Value> binder_values(const Spec& spec, const BinderDomain& d) {
  std::vector<Value> out;
  if (d.k == BinderDomain::K::Sort) {
    const SortDecl& s = spec.sorts[static_cast<size_t>(d.sort_id)];
    out.reserve(s.members.size());
    for (const std::string& m : s.members) out.push_back(Value::symbol(m));
  } else {
    for (int64_t i = d.lo_val; i <= d.hi_val; i++)
      out.push_back(Value::integer(i));
  }
  return out;
}

Value eval_expr(const Spec& spec, const ExprPtr& ep, const State& st,
                Env& env) {
  const Expr& e = *ep;
  switch (e.k) {
    case Expr::K::BoolLit:
      return Value::boolean(e.bval);
    case Expr::K::IntLit:
      return Value::integer(e.ival);
    case Expr::K::VarRef:
      return st.vars[static_cast<size_t>(e.id)];
    case Expr::K::ParamRef:
      return env[static_cast<size_t>(e.id)];
    case Expr::K::ConstRef:
      return Value::integer(spec.consts[static_cast<size_t>(e.id)].value);
    case Expr::K::SymRef:
      return Value::symbol(e.name);
    case Expr::K::SortVal: {
      std::vector<Value> ms;
      for (const std::string& m :
           spec.sorts[static_cast<size_t>(e.id)].members)
        ms.push_back(Value::symbol(m));
      return Value::set(std::move(ms));
    }
    case Expr::K::Arith: {
      int64_t a = eval_expr(spec, e.kids[0], st, env).as_int();
      int64_t b = eval_expr(spec, e.kids[1], st, env).as_int();
      switch (e.op) {
        case '+':
          return Value::integer(a + b);
        case '-':
          return Value::integer(a - b);
        default:
          return Value::integer(a * b);
      }
    }
    case Expr::K::Cmp: {
      Value a = eval_expr(spec, e.kids[0], st, env);
      Value b = eval_expr(spec, e.kids[1], st, env);
      switch (e.op) {
        case '=':
          return Value::boolean(a == b);
        case '!':
          return Value::boolean(a != b);
        case '<':
          return Value::boolean(a.as_int() < b.as_int());
        case 'l':
          return Value::boolean(a.as_int() <= b.as_int());
        case '>':
          return Value::boolean(a.as_int() > b.as_int());
        default:
          return Value::boolean(a.as_int() >= b.as_int());
      }
    }
    case Expr::K::And:
      return Value::boolean(truthy(spec, e.kids[0], st, env) &&
                            truthy(spec, e.kids[1], st, env));
    case Expr::K::Or:
      return Value::boolean(truthy(spec, e.kids[0], st, env) ||
                            truthy(spec, e.kids[1], st, env));
    case Expr::K::Implies:
      return Value::boolean(!truthy(spec, e.kids[0], st, env) ||
                            truthy(spec, e.kids[1], st, env));
    case Expr::K::Not:
      return Value::boolean(!truthy(spec, e.kids[0], st, env));
    case Expr::K::SetLit: {
      std::vector<Value> items;
      items.reserve(e.kids.size());
      for (const ExprPtr& k : e.kids)
        items.push_back(eval_expr(spec, k, st, env));
      return Value::set(std::move(items));
    }
    case Expr::K::SetFilter: {
      std::vector<Value> items;
      for (Value v : binder_values(spec, *e.dom)) {
        env.push_back(std::move(v));
        bool keep = truthy(spec, e.kids[0], st, env);
        if (keep) items.push_back(env.back());
        env.pop_back();
      }
      return Value::set(std::move(items));
    }
    case Expr::K::In: {
      Value v = eval_expr(spec, e.kids[0], st, env);
      Value s = eval_expr(spec, e.kids[1], st, env);
      return Value::boolean(s.contains(v));
    }
    case Expr::K::Union: {
      Value a = eval_expr(spec, e.kids[0], st, env);
      Value b = eval_expr(spec, e.kids[1], st, env);
      std::vector<Value> items = a.items();
      items.insert(items.end(), b.items().begin(), b.items().end());
      return Value::set(std::move(items));
    }
    case Expr::K::Insert: {
      Value s = eval_expr(spec, e.kids[0], st, env);
      std::vector<Value> items = s.items();
      items.push_back(eval_expr(spec, e.kids[1], st, env));
      return Value::set(std::move(items));
    }
    case Expr::K::Card:
      return Value::integer(static_cast<int64_t>(
          eval_expr(spec, e.kids[0], st, env).items().size()));
    case Expr::K::SeqLit: {
      std::vector<Value> items;
      items.reserve(e.kids.size());
      for (const ExprPtr& k : e.kids)
        items.push_back(eval_expr(spec, k, st, env));
      return Value::seq(std::move(items));
    }
    case Expr::K::Append: {
      Value s = eval_expr(spec, e.kids[0], st, env);
      std::vector<Value> items = s.items();
      items.push_back(eval_expr(spec, e.kids[1], st, env));
      return Value::seq(std::move(items));
    }
    case Expr::K::Len:
      return Value::integer(static_cast<int64_t>(
          eval_expr(spec, e.kids[0], st, env).items().size()));
    case Expr::K::Index: {
      Value base = eval_expr(spec, e.kids[0], st, env);
      Value key = eval_expr(spec, e.kids[1], st, env);
      if (base.is_seq()) {
        int64_t i = key.as_int();
        if (i < 1 || i > static_cast<int64_t>(base.items().size()))
          fail("sequence index " + std::to_string(i) +
                   " out of range 1.." + std::to_string(base.items().size()),
               e.span);
        return base.items()[static_cast<size_t>(i - 1)];
      }
      if (const Value* v = base.at_key(key)) return *v;
      fail("map has no key " + key.str(), e.span);
    }
    case Expr::K::SubSeq: {
      Value s = eval_expr(spec, e.kids[0], st, env);
      int64_t lo = eval_expr(spec, e.kids[1], st, env).as_int();
      int64_t hi = eval_expr(spec, e.kids[2], st, env).as_int();
      int64_t n = static_cast<int64_t>(s.items().size());
      if (lo > hi) return Value::seq({});
      if (lo < 1 || hi > n)
        fail("SubSeq(" + std::to_string(lo) + ", " + std::to_string(hi) +
                 ") out of range on length " + std::to_string(n),
             e.span);
      std::vector<Value> items(s.items().begin() + (lo - 1),
                               s.items().begin() + hi);
      return Value::seq(std::move(items));
    }
    case Expr::K::Field: {
      Value base = eval_expr(spec, e.kids[0], st, env);
      if (const Value* v = base.field(e.name)) return *v;
      fail("record has no field '" + e.name + "'", e.span);
    }
    case Expr::K::RecLit: {
      std::vector<std::pair<std::string, Value>> fs;
      fs.reserve(e.rec_fields.size());
      for (const auto& [n, v] : e.rec_fields)
        fs.emplace_back(n, eval_expr(spec, v, st, env));
      return Value::record(std::move(fs));
    }
    case Expr::K::RecExcept: {
      Value base = eval_expr(spec, e.kids[0], st, env);
      Value val = eval_expr(spec, e.kids[1], st, env);
      std::vector<std::pair<std::string, Value>> fs = base.fields();
      for (auto& [n, v] : fs)
        if (n == e.name) {
          v = std::move(val);
          return Value::record(std::move(fs));
        }
      fail("record has no field '" + e.name + "'", e.span);
    }
    case Expr::K::MapCompr: {
      std::vector<std::pair<Value, Value>> entries;
      for (Value k : binder_values(spec, *e.dom)) {
        env.push_back(k);
        entries.emplace_back(std::move(k), eval_expr(spec, e.kids[0], st, env));
        env.pop_back();
      }
      return Value::map(std::move(entries));
    }
    case Expr::K::MapExcept: {
      Value base = eval_expr(spec, e.kids[0], st, env);
      Value key = eval_expr(spec, e.kids[1], st, env);
      Value val = eval_expr(spec, e.kids[2], st, env);
      std::vector<std::pair<Value, Value>> entries = base.entries();
      for (auto& [k, v] : entries)
        if (k == key) {
          v = std::move(val);
          return Value::map(std::move(entries));
        }
      fail("map has no key " + key.str(), e.span);
    }
    case Expr::K::Forall:
    case Expr::K::Exists: {
      bool is_forall = e.k == Expr::K::Forall;
      for (Value v : binder_values(spec, *e.dom)) {
        env.push_back(std::move(v));
        bool b = truthy(spec, e.kids[0], st, env);
        env.pop_back();
        if (is_forall && !b) return Value::boolean(false);
        if (!is_forall && b) return Value::boolean(true);
      }
      return Value::boolean(is_forall);
    }
    case Expr::K::If:
      return truthy(spec, e.kids[0], st, env)
                 ? eval_expr(spec, e.kids[1], st, env)
                 : eval_expr(spec, e.kids[2], st, env);
  }
  fail("unreachable expression kind", e.span);
}

Value eval_closed(const Spec& spec, const ExprPtr& e, const State& st) {
  Env env;
  return eval_expr(spec, e, st, env);
}

bool value_in_domain(const Spec& spec, const Value& v, const VarDomain& d) {
  switch (d.k) {
    case VarDomain::K::Bool:
      return v.is_bool();
    case VarDomain::K::IntRange:
      return v.is_int() && v.as_int() >= d.lo_val && v.as_int() <= d.hi_val;
    case VarDomain::K::Sort: {
      if (!v.is_sym()) return false;
      const SortDecl& s = spec.sorts[static_cast<size_t>(d.sort_id)];
      return std::find(s.members.begin(), s.members.end(), v.sym_name()) !=
             s.members.end();
    }
    case VarDomain::K::Set:
      if (!v.is_set()) return false;
      for (const Value& x : v.items())
        if (!value_in_domain(spec, x, *d.elem)) return false;
      return true;
    case VarDomain::K::Seq:
      if (!v.is_seq()) return false;
      for (const Value& x : v.items())
        if (!value_in_domain(spec, x, *d.elem)) return false;
      return true;
    case VarDomain::K::Rec: {
      if (!v.is_rec() || v.fields().size() != d.fields.size()) return false;
      for (const auto& [n, fd] : d.fields) {
        const Value* fv = v.field(n);
        if (!fv || !value_in_domain(spec, *fv, fd)) return false;
      }
      return true;
    }
    case VarDomain::K::Map: {
      if (!v.is_map()) return false;
      std::vector<Value> keys = binder_values(spec, *d.key);
      if (v.entries().size() != keys.size()) return false;
      std::sort(keys.begin(), keys.end());
      for (size_t i = 0; i < keys.size(); i++) {
        if (v.entries()[i].first != keys[i]) return false;
        if (!value_in_domain(spec, v.entries()[i].second, *d.elem))
          return false;
      }
      return true;
    }
  }
  return false;
}

State initial_state(const Spec& spec) {
  std::vector<Value> vals;
  vals.reserve(spec.vars.size());
  for (const VarDecl& v : spec.vars) {
    Value val = eval_closed(spec, v.init, State{});
    if (!value_in_domain(spec, val, v.domain))
      fail("init of '" + v.name + "' is outside its domain: " + val.str(),
           v.init->span);
    vals.push_back(std::move(val));
  }
  return State::make(std::move(vals));
}

bool action_enabled(const Spec& spec, const Action& a, const Binding& b,
                    const State& st) {
  Env env(b.begin(), b.end());
  for (const ExprPtr& g : a.guards)
    if (!truthy(spec, g, st, env)) return false;
  return true;
}

namespace {

void enumerate_bindings(const Spec& spec, const Action& a, const State& st,
                        size_t param, Env& env, std::vector<Binding>& out) {
  if (param == a.params.size()) {
    for (const ExprPtr& g : a.guards)
      if (!truthy(spec, g, st, env)) return;
    out.emplace_back(env.begin(), env.end());
    return;
  }
  for (Value v : binder_values(spec, a.params[param].dom)) {
    env.push_back(std::move(v));
    enumerate_bindings(spec, a, st, param + 1, env, out);
    env.pop_back();
  }
}

}  // namespace

std::vector<Binding> enabled_bindings(const Spec& spec, const Action& a,
                                      const State& st) {
  std::vector<Binding> out;
  Env env;
  enumerate_bindings(spec, a, st, 0, env, out);
  return out;
}

State apply_action(const Spec& spec, const Action& a, const Binding& b,
                   const State& st) {
  Env env(b.begin(), b.end());
  std::vector<Value> vals = st.vars;
  for (const Update& u : a.updates) {
    Value val = eval_expr(spec, u.rhs, st, env);
    const VarDecl& decl = spec.vars[static_cast<size_t>(u.var_id)];
    if (!value_in_domain(spec, val, decl.domain))
      fail("action '" + a.name + "' stores " + val.str() + " into '" +
               u.var + "' outside its domain",
           u.span, a.name + binding_str(b));
    vals[static_cast<size_t>(u.var_id)] = std::move(val);
  }
  return State::make(std::move(vals));
}

std::vector<Successor> successors(const Spec& spec, const State& st) {
  std::vector<Successor> out;
  for (size_t mi = 0; mi < spec.modules.size(); mi++) {
    const Module& m = spec.modules[mi];
    for (size_t ai = 0; ai < m.actions.size(); ai++) {
      const Action& a = m.actions[ai];
      for (Binding& b : enabled_bindings(spec, a, st)) {
        State next = apply_action(spec, a, b, st);
        out.push_back({ActionInstance{m.name, a.name, std::move(b)},
                       std::move(next), static_cast<uint32_t>(mi),
                       static_cast<uint32_t>(ai)});
      }
    }
  }
  return out;
}

}  // namespace ipa
