#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipa/source.hpp"
#include "ipa/value.hpp"

namespace ipa {

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

// Coarse structural type used for static validation. Integer ranges are
// enforced dynamically when values are stored into variables.
struct Type {
  enum class K { Unknown, Bool, Int, Sym, Set, Seq, Rec, Map };
  K k = K::Unknown;
  std::string sort;                               // K::Sym
  std::shared_ptr<Type> elem;                     // Set/Seq element, Map value
  std::shared_ptr<Type> key;                      // Map key (Int or Sym)
  std::vector<std::pair<std::string, Type>> fields;  // Rec, sorted by name

  static Type unknown() { return {}; }
  static Type boolean() { return {K::Bool, {}, nullptr, nullptr, {}}; }
  static Type integer() { return {K::Int, {}, nullptr, nullptr, {}}; }
  static Type sym(std::string s) {
    return {K::Sym, std::move(s), nullptr, nullptr, {}};
  }
  static Type set_of(Type t);
  static Type seq_of(Type t);
  static Type map_of(Type k, Type v);
  static Type rec_of(std::vector<std::pair<std::string, Type>> fs);

  std::string str() const;
};

// True when the two types can denote the same values; Unknown (from empty
// set/sequence literals) unifies with anything of the right shape.
bool compatible(const Type& a, const Type& b);
// Least upper bound of two compatible types (fills Unknown holes).
Type join(const Type& a, const Type& b);

// Domain of a quantifier / comprehension / parameter binder: a sort name or
// a constant integer range.
struct BinderDomain {
  enum class K { Sort, Range };
  K k = K::Sort;
  std::string sort;
  ExprPtr lo, hi;  // K::Range; constant expressions
  SourceSpan span;

  // Filled during resolution.
  int sort_id = -1;
  int64_t lo_val = 0, hi_val = -1;
};

// Declared domain of a state variable.
struct VarDomain {
  enum class K { Bool, IntRange, Sort, Set, Seq, Rec, Map };
  K k = K::Bool;
  ExprPtr lo, hi;                                        // IntRange
  std::string sort;                                      // Sort
  std::shared_ptr<VarDomain> elem;                       // Set/Seq/Map value
  std::vector<std::pair<std::string, VarDomain>> fields; // Rec
  std::shared_ptr<BinderDomain> key;                     // Map key
  SourceSpan span;

  // Filled during resolution.
  int sort_id = -1;
  int64_t lo_val = 0, hi_val = -1;

  std::string str() const;
};

struct Expr {
  enum class K {
    BoolLit,   // bval
    IntLit,    // ival
    VarRef,    // name, id = variable index
    ParamRef,  // name, id = environment slot
    ConstRef,  // name, id = constant index
    SymRef,    // name (enum member)
    SortVal,   // name (sort used as a set value)
    Arith,     // op '+','-','*'; kids a, b
    Cmp,       // op '=' '!'(/=) '<' 'l'(<=) '>' 'g'(>=); kids a, b
    And,       // kids a, b (short-circuit)
    Or,        // kids a, b (short-circuit)
    Implies,   // kids a, b (short-circuit)
    Not,       // kids a
    SetLit,    // kids = elements
    SetFilter, // name/slot binder, dom, kids[0] = predicate
    In,        // kids a, b
    Union,     // kids a, b
    Insert,    // kids set, elem
    Card,      // kids set
    SeqLit,    // kids = elements
    Append,    // kids seq, elem
    Len,       // kids seq
    Index,     // kids seq-or-map, index-or-key
    SubSeq,    // kids seq, lo, hi
    Field,     // kids rec; name = field
    RecLit,    // rec_fields
    RecExcept, // kids base, value; name = field
    MapCompr,  // name/slot binder, dom, kids[0] = value body
    MapExcept, // kids base, key, value
    Forall,    // name/slot binder, dom, kids[0] = body
    Exists,    // name/slot binder, dom, kids[0] = body
    If,        // kids cond, then, else
  };

  K k;
  SourceSpan span;
  std::string name;
  int id = -1;    // resolved variable/constant index or binder slot
  int slot = -1;  // environment slot for binder nodes
  char op = 0;
  bool bval = false;
  int64_t ival = 0;
  std::vector<ExprPtr> kids;
  std::vector<std::pair<std::string, ExprPtr>> rec_fields;
  std::shared_ptr<BinderDomain> dom;
  Type type;  // filled during resolution
};

// Static type denoted by a binder / variable domain (context-free: sort
// names are carried inside the type).
Type binder_domain_type(const BinderDomain& d);
Type domain_type(const VarDomain& d);
// Structural equality of two resolved domains (same value space).
bool domain_equal(const VarDomain& a, const VarDomain& b);
bool binder_domain_equal(const BinderDomain& a, const BinderDomain& b);

ExprPtr clone_expr(const ExprPtr& e);
// Deep copies for assembling merged specifications: no expression or nested
// domain node is shared with the source, so re-resolution cannot corrupt it.
BinderDomain clone_binder_domain(const BinderDomain& d);
VarDomain clone_var_domain(const VarDomain& d);
struct VarDecl;
struct Action;
struct Module;
VarDecl clone_var_decl(const VarDecl& v);
Action clone_action(const Action& a);
Module clone_module(const Module& m);
// Structural equality; spans and resolved ids are ignored.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);
// Collects the names of state variables read by the expression (parameters
// and quantifier-bound names are not state variables and never appear).
void collect_var_reads(const ExprPtr& e, std::vector<std::string>& out);

struct Param {
  std::string name;
  BinderDomain dom;
  SourceSpan span;
};

struct Update {
  std::string var;
  int var_id = -1;
  ExprPtr rhs;
  SourceSpan span;
};

struct Action {
  std::string name;
  SourceSpan span;
  std::vector<Param> params;
  std::vector<ExprPtr> guards;
  std::vector<Update> updates;
};

struct Module {
  std::string name;
  SourceSpan span;
  std::vector<Action> actions;
};

struct ConstDecl {
  std::string name;
  ExprPtr expr;  // constant expression
  int64_t value = 0;
  SourceSpan span;
};

struct SortDecl {
  std::string name;
  std::vector<std::string> members;  // declaration order
  SourceSpan span;
};

struct VarDecl {
  std::string name;
  VarDomain domain;
  ExprPtr init;  // constant expression; set during validation
  SourceSpan span;
};

struct Spec {
  std::string name;
  SourceSpan span;
  std::vector<ConstDecl> consts;
  std::vector<SortDecl> sorts;
  std::vector<VarDecl> vars;
  std::vector<Module> modules;

  // Lookup tables, rebuilt by resolve_spec.
  std::map<std::string, int> const_index;
  std::map<std::string, int> sort_index;
  std::map<std::string, int> var_index;
  std::map<std::string, int> symbol_sort;  // enum member -> sort index

  int var_id(const std::string& n) const {
    auto it = var_index.find(n);
    return it == var_index.end() ? -1 : it->second;
  }
  const Module* find_module(const std::string& n) const;
  const Action* find_action(const std::string& module,
                            const std::string& action) const;
};

// A state assigns one value per declared variable, in declaration order.
struct State {
  std::vector<Value> vars;
  size_t hash = 0;

  static State make(std::vector<Value> vs);
  friend bool operator==(const State& a, const State& b) {
    return a.hash == b.hash && a.vars == b.vars;
  }
};

struct StateHash {
  size_t operator()(const State& s) const { return s.hash; }
};

using Binding = std::vector<Value>;  // one value per action parameter

struct ActionInstance {
  std::string module;
  std::string action;
  Binding binding;
};

// Deterministic serialization of a state; used for dedup keys in oracles
// and for tie-breaking between violating states at the same BFS level.
std::string canonical_key(const State& s);
std::string binding_str(const Binding& b);

}  // namespace ipa
