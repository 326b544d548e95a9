#pragma once

#include <stdexcept>
#include <vector>

#include "ipa/ast.hpp"
#include "ipa/source.hpp"

namespace ipa {

// Raised when evaluation leaves the modeled domain: sequence index out of
// range, missing map key, or a stored value outside a variable's declared
// domain. These are modeling errors and abort the enclosing operation.
class EvalException : public std::runtime_error {
 public:
  explicit EvalException(EvalError e)
      : std::runtime_error(e.message), err(std::move(e)) {}
  EvalError err;
};

// Environment for bound values: action parameters occupy slots 0..n-1,
// quantifier/comprehension binders push further slots.
using Env = std::vector<Value>;

Value eval_expr(const Spec& spec, const ExprPtr& e, const State& st, Env& env);

// Convenience for closed expressions (no parameters).
Value eval_closed(const Spec& spec, const ExprPtr& e, const State& st);

// Enumerates a binder domain in deterministic order: sort members in
// declaration order, integer ranges ascending.
std::vector<Value> binder_values(const Spec& spec, const BinderDomain& d);

// Membership of a value in a declared variable domain.
bool value_in_domain(const Spec& spec, const Value& v, const VarDomain& d);

// The unique initial state: every variable's init expression evaluated and
// validated against its domain.
State initial_state(const Spec& spec);

// All parameter bindings under which the action's guards hold, in
// enumeration order (parameters vary left to right, rightmost fastest).
std::vector<Binding> enabled_bindings(const Spec& spec, const Action& a,
                                      const State& st);

bool action_enabled(const Spec& spec, const Action& a, const Binding& b,
                    const State& st);

// Applies one enabled action instance. All update right-hand sides are
// evaluated against the pre-state (simultaneous assignment); stored values
// are checked against the target variable's declared domain.
State apply_action(const Spec& spec, const Action& a, const Binding& b,
                   const State& st);

struct Successor {
  ActionInstance inst;
  State state;
  // Positions of the instance's module and action within the spec, so
  // bulk consumers can avoid name lookups and store compact records.
  uint32_t module_idx = 0;
  uint32_t action_idx = 0;
};

// Every enabled action instance applied to `st`, in deterministic order:
// modules in declaration order, actions in declaration order, bindings in
// enumeration order.
std::vector<Successor> successors(const Spec& spec, const State& st);

}  // namespace ipa
