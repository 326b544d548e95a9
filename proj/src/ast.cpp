#include "ipa/ast.hpp"

#include <algorithm>
#include <sstream>

namespace ipa {

Type Type::set_of(Type t) {
  Type r;
  r.k = K::Set;
  r.elem = std::make_shared<Type>(std::move(t));
  return r;
}

Type Type::seq_of(Type t) {
  Type r;
  r.k = K::Seq;
  r.elem = std::make_shared<Type>(std::move(t));
  return r;
}

Type Type::map_of(Type k, Type v) {
  Type r;
  r.k = K::Map;
  r.key = std::make_shared<Type>(std::move(k));
  r.elem = std::make_shared<Type>(std::move(v));
  return r;
}

Type Type::rec_of(std::vector<std::pair<std::string, Type>> fs) {
  std::sort(fs.begin(), fs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Type r;
  r.k = K::Rec;
  r.fields = std::move(fs);
  return r;
}

std::string Type::str() const {
  switch (k) {
    case K::Unknown:
      return "?";
    case K::Bool:
      return "bool";
    case K::Int:
      return "int";
    case K::Sym:
      return sort;
    case K::Set:
      return "set of " + elem->str();
    case K::Seq:
      return "seq of " + elem->str();
    case K::Map:
      return "map " + key->str() + " -> " + elem->str();
    case K::Rec: {
      std::string s = "[";
      bool first = true;
      for (const auto& [n, t] : fields) {
        if (!first) s += ", ";
        first = false;
        s += n + " : " + t.str();
      }
      return s + "]";
    }
  }
  return "?";
}

bool compatible(const Type& a, const Type& b) {
  if (a.k == Type::K::Unknown || b.k == Type::K::Unknown) return true;
  if (a.k != b.k) return false;
  switch (a.k) {
    case Type::K::Bool:
    case Type::K::Int:
      return true;
    case Type::K::Sym:
      return a.sort == b.sort;
    case Type::K::Set:
    case Type::K::Seq:
      return compatible(*a.elem, *b.elem);
    case Type::K::Map:
      return compatible(*a.key, *b.key) && compatible(*a.elem, *b.elem);
    case Type::K::Rec: {
      if (a.fields.size() != b.fields.size()) return false;
      for (size_t i = 0; i < a.fields.size(); i++) {
        if (a.fields[i].first != b.fields[i].first) return false;
        if (!compatible(a.fields[i].second, b.fields[i].second)) return false;
      }
      return true;
    }
    default:
      return true;
  }
}

Type join(const Type& a, const Type& b) {
  if (a.k == Type::K::Unknown) return b;
  if (b.k == Type::K::Unknown) return a;
  switch (a.k) {
    case Type::K::Set:
      return Type::set_of(join(*a.elem, *b.elem));
    case Type::K::Seq:
      return Type::seq_of(join(*a.elem, *b.elem));
    case Type::K::Map:
      return Type::map_of(join(*a.key, *b.key), join(*a.elem, *b.elem));
    case Type::K::Rec: {
      std::vector<std::pair<std::string, Type>> fs;
      for (size_t i = 0; i < a.fields.size(); i++)
        fs.emplace_back(a.fields[i].first,
                        join(a.fields[i].second, b.fields[i].second));
      return Type::rec_of(std::move(fs));
    }
    default:
      return a;
  }
}

std::string VarDomain::str() const {
  switch (k) {
    case K::Bool:
      return "bool";
    case K::IntRange:
      return "int range";
    case K::Sort:
      return sort;
    case K::Set:
      return "set of " + elem->str();
    case K::Seq:
      return "seq of " + elem->str();
    case K::Rec: {
      std::string s = "[";
      bool first = true;
      for (const auto& [n, d] : fields) {
        if (!first) s += ", ";
        first = false;
        s += n + " : " + d.str();
      }
      return s + "]";
    }
    case K::Map:
      return "map ... -> " + elem->str();
  }
  return "?";
}

Type binder_domain_type(const BinderDomain& d) {
  return d.k == BinderDomain::K::Sort ? Type::sym(d.sort) : Type::integer();
}

Type domain_type(const VarDomain& d) {
  switch (d.k) {
    case VarDomain::K::Bool:
      return Type::boolean();
    case VarDomain::K::IntRange:
      return Type::integer();
    case VarDomain::K::Sort:
      return Type::sym(d.sort);
    case VarDomain::K::Set:
      return Type::set_of(domain_type(*d.elem));
    case VarDomain::K::Seq:
      return Type::seq_of(domain_type(*d.elem));
    case VarDomain::K::Rec: {
      std::vector<std::pair<std::string, Type>> fs;
      for (const auto& [n, fd] : d.fields) fs.emplace_back(n, domain_type(fd));
      return Type::rec_of(std::move(fs));
    }
    case VarDomain::K::Map:
      return Type::map_of(binder_domain_type(*d.key), domain_type(*d.elem));
  }
  return Type::unknown();
}

bool binder_domain_equal(const BinderDomain& a, const BinderDomain& b) {
  if (a.k != b.k) return false;
  if (a.k == BinderDomain::K::Sort) return a.sort == b.sort;
  return a.lo_val == b.lo_val && a.hi_val == b.hi_val;
}

bool domain_equal(const VarDomain& a, const VarDomain& b) {
  if (a.k != b.k) return false;
  switch (a.k) {
    case VarDomain::K::Bool:
      return true;
    case VarDomain::K::IntRange:
      return a.lo_val == b.lo_val && a.hi_val == b.hi_val;
    case VarDomain::K::Sort:
      return a.sort == b.sort;
    case VarDomain::K::Set:
    case VarDomain::K::Seq:
      return domain_equal(*a.elem, *b.elem);
    case VarDomain::K::Rec: {
      if (a.fields.size() != b.fields.size()) return false;
      for (size_t i = 0; i < a.fields.size(); i++) {
        if (a.fields[i].first != b.fields[i].first) return false;
        if (!domain_equal(a.fields[i].second, b.fields[i].second))
          return false;
      }
      return true;
    }
    case VarDomain::K::Map:
      return binder_domain_equal(*a.key, *b.key) &&
             domain_equal(*a.elem, *b.elem);
  }
  return false;
}

namespace {

std::shared_ptr<BinderDomain> clone_dom(const std::shared_ptr<BinderDomain>& d);

}  // namespace

ExprPtr clone_expr(const ExprPtr& e) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  for (auto& kid : c->kids) kid = clone_expr(kid);
  for (auto& [n, f] : c->rec_fields) f = clone_expr(f);
  c->dom = clone_dom(e->dom);
  return c;
}

namespace {

std::shared_ptr<BinderDomain> clone_dom(const std::shared_ptr<BinderDomain>& d) {
  if (!d) return nullptr;
  auto c = std::make_shared<BinderDomain>(*d);
  c->lo = clone_expr(d->lo);
  c->hi = clone_expr(d->hi);
  return c;
}

bool dom_equal(const std::shared_ptr<BinderDomain>& a,
               const std::shared_ptr<BinderDomain>& b) {
  if (!a || !b) return !a && !b;
  if (a->k != b->k) return false;
  if (a->k == BinderDomain::K::Sort) return a->sort == b->sort;
  return expr_equal(a->lo, b->lo) && expr_equal(a->hi, b->hi);
}

}  // namespace

BinderDomain clone_binder_domain(const BinderDomain& d) {
  BinderDomain c = d;
  c.lo = clone_expr(d.lo);
  c.hi = clone_expr(d.hi);
  return c;
}

VarDomain clone_var_domain(const VarDomain& d) {
  VarDomain c = d;
  c.lo = clone_expr(d.lo);
  c.hi = clone_expr(d.hi);
  if (d.elem) c.elem = std::make_shared<VarDomain>(clone_var_domain(*d.elem));
  if (d.key) c.key = std::make_shared<BinderDomain>(clone_binder_domain(*d.key));
  for (auto& [n, f] : c.fields) f = clone_var_domain(f);
  return c;
}

VarDecl clone_var_decl(const VarDecl& v) {
  VarDecl c = v;
  c.domain = clone_var_domain(v.domain);
  c.init = clone_expr(v.init);
  return c;
}

Action clone_action(const Action& a) {
  Action c = a;
  for (auto& p : c.params) p.dom = clone_binder_domain(p.dom);
  for (auto& g : c.guards) g = clone_expr(g);
  for (auto& u : c.updates) u.rhs = clone_expr(u.rhs);
  return c;
}

Module clone_module(const Module& m) {
  Module c = m;
  for (auto& a : c.actions) a = clone_action(a);
  return c;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->k != b->k || a->name != b->name || a->op != b->op ||
      a->bval != b->bval || a->ival != b->ival)
    return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); i++)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  if (a->rec_fields.size() != b->rec_fields.size()) return false;
  for (size_t i = 0; i < a->rec_fields.size(); i++) {
    if (a->rec_fields[i].first != b->rec_fields[i].first) return false;
    if (!expr_equal(a->rec_fields[i].second, b->rec_fields[i].second))
      return false;
  }
  return dom_equal(a->dom, b->dom);
}

void collect_var_reads(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->k == Expr::K::VarRef) out.push_back(e->name);
  for (const auto& kid : e->kids) collect_var_reads(kid, out);
  for (const auto& [n, f] : e->rec_fields) collect_var_reads(f, out);
  if (e->dom) {
    collect_var_reads(e->dom->lo, out);
    collect_var_reads(e->dom->hi, out);
  }
}

const Module* Spec::find_module(const std::string& n) const {
  for (const Module& m : modules)
    if (m.name == n) return &m;
  return nullptr;
}

const Action* Spec::find_action(const std::string& module,
                                const std::string& action) const {
  const Module* m = find_module(module);
  if (!m) return nullptr;
  for (const Action& a : m->actions)
    if (a.name == action) return &a;
  return nullptr;
}

State State::make(std::vector<Value> vs) {
  State s;
  s.vars = std::move(vs);
  size_t h = 0x811c9dc5u;
  for (const Value& v : s.vars) {
    h ^= v.hash();
    h *= 0x100000001b3ULL;
  }
  s.hash = h;
  return s;
}

std::string canonical_key(const State& s) {
  std::string out;
  for (const Value& v : s.vars) {
    out += v.str();
    out += ';';
  }
  return out;
}

std::string binding_str(const Binding& b) {
  std::string out = "(";
  for (size_t i = 0; i < b.size(); i++) {
    if (i) out += ", ";
    out += b[i].str();
  }
  return out + ")";
}

}  // namespace ipa
