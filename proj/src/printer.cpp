#include "ipa/printer.hpp"

namespace ipa {

namespace {

// Precedence levels, higher binds tighter. A child is parenthesized when its
// own level is below the level its position requires.
//   implies 1 | or 2 | and 3 | not 4 | cmp/in 5 | + - union 6 | * 7 |
//   postfix 9 | atoms 10. Quantifiers and if-then-else extend maximally to
//   the right and print at level 1.
int level_of(const Expr& e) {
  switch (e.k) {
    case Expr::K::Implies:
    case Expr::K::Forall:
    case Expr::K::Exists:
    case Expr::K::If:
      return 1;
    case Expr::K::Or:
      return 2;
    case Expr::K::And:
      return 3;
    case Expr::K::Not:
      return 4;
    case Expr::K::Cmp:
    case Expr::K::In:
      return 5;
    case Expr::K::Union:
      return 6;
    case Expr::K::Arith:
      return e.op == '*' ? 7 : 6;
    case Expr::K::Index:
    case Expr::K::Field:
      return 9;
    default:
      return 10;
  }
}

void render(const ExprPtr& ep, int need, std::string& out);

void render_child(const ExprPtr& e, int need, std::string& out) {
  if (level_of(*e) < need) {
    out += '(';
    render(e, 0, out);
    out += ')';
  } else {
    render(e, 0, out);
  }
}

void render_binder(const std::string& name, const BinderDomain& d,
                   std::string& out) {
  out += name;
  out += " in ";
  out += render_binder_domain(d);
}

void render_call(const char* fn, const std::vector<ExprPtr>& args,
                 std::string& out) {
  out += fn;
  out += '(';
  for (size_t i = 0; i < args.size(); i++) {
    if (i) out += ", ";
    render(args[i], 0, out);
  }
  out += ')';
}

void render(const ExprPtr& ep, int, std::string& out) {
  const Expr& e = *ep;
  switch (e.k) {
    case Expr::K::BoolLit:
      out += e.bval ? "true" : "false";
      return;
    case Expr::K::IntLit:
      out += std::to_string(e.ival);
      return;
    case Expr::K::VarRef:
    case Expr::K::ParamRef:
    case Expr::K::ConstRef:
    case Expr::K::SymRef:
    case Expr::K::SortVal:
      out += e.name;
      return;
    case Expr::K::Arith: {
      bool mul = e.op == '*';
      render_child(e.kids[0], mul ? 7 : 6, out);
      out += ' ';
      out += e.op;
      out += ' ';
      render_child(e.kids[1], mul ? 8 : 7, out);
      return;
    }
    case Expr::K::Cmp: {
      render_child(e.kids[0], 6, out);
      switch (e.op) {
        case '=': out += " = "; break;
        case '!': out += " /= "; break;
        case '<': out += " < "; break;
        case 'l': out += " <= "; break;
        case '>': out += " > "; break;
        default:  out += " >= "; break;
      }
      render_child(e.kids[1], 6, out);
      return;
    }
    case Expr::K::And:
      render_child(e.kids[0], 3, out);
      out += " and ";
      render_child(e.kids[1], 4, out);
      return;
    case Expr::K::Or:
      render_child(e.kids[0], 2, out);
      out += " or ";
      render_child(e.kids[1], 3, out);
      return;
    case Expr::K::Implies:
      render_child(e.kids[0], 2, out);
      out += " implies ";
      render_child(e.kids[1], 1, out);
      return;
    case Expr::K::Not:
      out += "not ";
      render_child(e.kids[0], 4, out);
      return;
    case Expr::K::SetLit:
      out += '{';
      for (size_t i = 0; i < e.kids.size(); i++) {
        if (i) out += ", ";
        render(e.kids[i], 0, out);
      }
      out += '}';
      return;
    case Expr::K::SetFilter:
      out += '{';
      render_binder(e.name, *e.dom, out);
      out += " : ";
      render(e.kids[0], 0, out);
      out += '}';
      return;
    case Expr::K::In:
      render_child(e.kids[0], 6, out);
      out += " in ";
      render_child(e.kids[1], 6, out);
      return;
    case Expr::K::Union:
      render_child(e.kids[0], 6, out);
      out += " union ";
      render_child(e.kids[1], 7, out);
      return;
    case Expr::K::Insert:
      render_call("Insert", e.kids, out);
      return;
    case Expr::K::Card:
      render_call("Cardinality", e.kids, out);
      return;
    case Expr::K::SeqLit:
      out += "<<";
      for (size_t i = 0; i < e.kids.size(); i++) {
        if (i) out += ", ";
        render(e.kids[i], 0, out);
      }
      out += ">>";
      return;
    case Expr::K::Append:
      render_call("Append", e.kids, out);
      return;
    case Expr::K::Len:
      render_call("Len", e.kids, out);
      return;
    case Expr::K::Index:
      render_child(e.kids[0], 9, out);
      out += '[';
      render(e.kids[1], 0, out);
      out += ']';
      return;
    case Expr::K::SubSeq:
      render_call("SubSeq", e.kids, out);
      return;
    case Expr::K::Field:
      render_child(e.kids[0], 9, out);
      out += '.';
      out += e.name;
      return;
    case Expr::K::RecLit:
      out += '[';
      for (size_t i = 0; i < e.rec_fields.size(); i++) {
        if (i) out += ", ";
        out += e.rec_fields[i].first;
        out += " |-> ";
        render(e.rec_fields[i].second, 0, out);
      }
      out += ']';
      return;
    case Expr::K::RecExcept:
      out += '[';
      render(e.kids[0], 0, out);
      out += " except .";
      out += e.name;
      out += " = ";
      render(e.kids[1], 0, out);
      out += ']';
      return;
    case Expr::K::MapCompr:
      out += '[';
      render_binder(e.name, *e.dom, out);
      out += " |-> ";
      render(e.kids[0], 0, out);
      out += ']';
      return;
    case Expr::K::MapExcept:
      out += '[';
      render(e.kids[0], 0, out);
      out += " except [";
      render(e.kids[1], 0, out);
      out += "] = ";
      render(e.kids[2], 0, out);
      out += ']';
      return;
    case Expr::K::Forall:
    case Expr::K::Exists:
      out += e.k == Expr::K::Forall ? "forall " : "exists ";
      render_binder(e.name, *e.dom, out);
      out += " : ";
      render(e.kids[0], 0, out);
      return;
    case Expr::K::If:
      out += "if ";
      render(e.kids[0], 0, out);
      out += " then ";
      render(e.kids[1], 0, out);
      out += " else ";
      render(e.kids[2], 0, out);
      return;
  }
}

}  // namespace

std::string render_expr(const ExprPtr& e) {
  std::string out;
  render(e, 0, out);
  return out;
}

std::string render_binder_domain(const BinderDomain& d) {
  if (d.k == BinderDomain::K::Sort) return d.sort;
  return render_expr(d.lo) + ".." + render_expr(d.hi);
}

std::string render_var_domain(const VarDomain& d) {
  switch (d.k) {
    case VarDomain::K::Bool:
      return "bool";
    case VarDomain::K::IntRange:
      return render_expr(d.lo) + ".." + render_expr(d.hi);
    case VarDomain::K::Sort:
      return d.sort;
    case VarDomain::K::Set:
      return "set of " + render_var_domain(*d.elem);
    case VarDomain::K::Seq:
      return "seq of " + render_var_domain(*d.elem);
    case VarDomain::K::Rec: {
      std::string s = "[";
      for (size_t i = 0; i < d.fields.size(); i++) {
        if (i) s += ", ";
        s += d.fields[i].first + " : " + render_var_domain(d.fields[i].second);
      }
      return s + "]";
    }
    case VarDomain::K::Map:
      return "map " + render_binder_domain(*d.key) + " -> " +
             render_var_domain(*d.elem);
  }
  return "";
}

std::string render_spec(const Spec& spec) {
  std::string out = "spec " + spec.name + "\n\n";
  for (const ConstDecl& c : spec.consts)
    out += "const " + c.name + " = " + render_expr(c.expr) + "\n";
  if (!spec.consts.empty()) out += "\n";
  for (const SortDecl& s : spec.sorts) {
    out += "sort " + s.name + " = {";
    for (size_t i = 0; i < s.members.size(); i++) {
      if (i) out += ", ";
      out += s.members[i];
    }
    out += "}\n";
  }
  if (!spec.sorts.empty()) out += "\n";
  if (!spec.vars.empty()) {
    out += "vars\n";
    for (const VarDecl& v : spec.vars)
      out += "  " + v.name + " : " + render_var_domain(v.domain) + "\n";
    out += "\ninit\n";
    for (const VarDecl& v : spec.vars)
      if (v.init) out += "  " + v.name + " = " + render_expr(v.init) + "\n";
  }
  for (const Module& m : spec.modules) {
    out += "\nmodule " + m.name + "\n";
    for (const Action& a : m.actions) {
      out += "  action " + a.name;
      if (!a.params.empty()) {
        out += '(';
        for (size_t i = 0; i < a.params.size(); i++) {
          if (i) out += ", ";
          out += a.params[i].name + " in " +
                 render_binder_domain(a.params[i].dom);
        }
        out += ')';
      }
      out += "\n";
      for (const ExprPtr& g : a.guards)
        out += "    when " + render_expr(g) + "\n";
      for (const Update& u : a.updates)
        out += "    then " + u.var + "' = " + render_expr(u.rhs) + "\n";
    }
  }
  return out;
}

std::string render_manifest(const Manifest& m) {
  std::string out = "manifest " + m.name + "\n";
  out += "spec \"" + m.root_path.generic_string() + "\"\n\n";
  for (const auto& e : m.abstractions)
    out += "module " + e.module + " = \"" + e.path.generic_string() + "\"\n";
  out += "\n";
  for (const auto& e : m.action_map) {
    out += "map " + e.module + "." + e.action + " -> ";
    if (e.is_void) {
      out += "void";
    } else {
      out += e.abs_module + "." + e.abs_action;
      if (!e.args.empty()) {
        out += '(';
        for (size_t i = 0; i < e.args.size(); i++) {
          if (i) out += ", ";
          out += render_expr(e.args[i]);
        }
        out += ')';
      }
    }
    out += "\n";
  }
  if (!m.refine.empty()) out += "\n";
  for (const auto& e : m.refine)
    out += "refine " + e.var + " = " + render_expr(e.expr) + "\n";
  if (!m.invariants.empty()) out += "\n";
  for (const auto& e : m.invariants)
    out += "invariant " + e.name + " = " + render_expr(e.expr) + "\n";
  return out;
}

}  // namespace ipa
