#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipa/analysis.hpp"
#include "ipa/ast.hpp"
#include "ipa/explorer.hpp"
#include "ipa/manifest.hpp"
#include "ipa/refinement.hpp"

namespace ipa {

// A specification assembled from concrete and/or abstract modules. The
// assembled spec declares exactly the variables in `scope`; the build fails
// if any included action reads or writes outside it.
struct ComposedSpec {
  Spec spec;
  std::vector<std::string> scope;  // == spec variable names, in order
  std::string concrete_module;     // non-empty for a compositional spec
  std::vector<std::string> abstract_modules;
};

// Literal expression denoting `v`; `dom` guides reconstruction (map values
// need their declared key domain, rebuilt as a comprehension plus updates).
// The result is unresolved source-level syntax, suitable as an init
// expression of a freshly assembled spec; comprehension binder names are
// chosen fresh against `taken` (pass the target spec's declared names).
ExprPtr expr_from_value(const Value& v, const VarDomain& dom,
                        const std::set<std::string>& taken);

// The abstract system: every module replaced by its abstraction, variables
// restricted to the interaction variables plus the abstractions' dependency
// variables, inits projected from the root initial state (abstract-only
// variables take their refine expression's value there).
std::optional<ComposedSpec> build_abstract_spec(const Manifest& m,
                                                const VarAnalysis& va,
                                                Diagnostics& diags);

// The compositional system for `module`: that module kept concrete, all
// others abstracted; variables restricted to the interaction variables, the
// concrete module's dependency variables, and the other abstractions'
// dependency variables.
std::optional<ComposedSpec> build_compositional_spec(const Manifest& m,
                                                     const VarAnalysis& va,
                                                     const std::string& module,
                                                     Diagnostics& diags);

// Action mappings around the compositional system for module i:
//   g_i    : root action    -> C_i action   (identity on module i, else the
//                                            manifest mapping)
//   gbar_i : C_i action     -> A action     (manifest mapping on module i,
//                                            identity on abstract actions)
//   g      : root action    -> A action     (the manifest mapping itself)
// Argument expressions are cloned; they carry the resolution of the spec
// they were written against (the root), so translations applied to another
// assembled spec must be re-resolved against it first.
struct MappingTriple {
  ActionMapping g_i, gbar_i, g;
};
MappingTriple compose_mappings(const Manifest& m, const std::string& module);
ActionMapping root_action_mapping(const Manifest& m);

// Pointwise check that gbar_i after g_i equals g over every root action.
// Returns an empty string on success, else a description of the first
// mismatch.
std::string composite_mismatch(const Spec& root, const MappingTriple& t);

struct ModuleCheck {
  std::string module;              // concrete module of this C_i
  std::string spec_name;           // assembled spec name
  std::vector<std::string> scope;  // its variables, declaration order
  RefinementVerdict verdict;
};

struct CompositionalReport {
  VarAnalysis analysis;
  ConstraintReport constraints;
  ExplorationReport abstract_report;  // A explored against the invariants
  std::vector<std::string> abstract_scope;
  std::vector<ModuleCheck> module_checks;
  // Invariant names checkable on A (their reads resolve there) vs. those
  // only expressible over the root system.
  std::vector<std::string> transferable, not_transferable;
  bool holds = false;
  std::string conclusion;  // "S => A" or "blocked: ..."
  double t_comp_ms = 0.0;  // sum of module-check durations
  Diagnostics diags;

  bool ok() const { return !has_errors(diags); }
};

// The staged compositional workflow: constraint check, abstract-system
// invariant check, then one strong-refinement check per module (C_i => A).
// The conclusion claims S => A only when every stage passes; a failed stage
// blocks the conclusion but later stages still run for diagnostics.
CompositionalReport compositional_check(Manifest& m,
                                        const ExploreBounds& bounds);

struct DirectReport {
  RefinementVerdict verdict;      // S => A checked directly
  ExplorationReport exploration;  // root system vs. its checkable invariants
  std::vector<std::string> unchecked_invariants;  // only expressible over A
  std::vector<std::string> abstract_scope;
  double t_direct_ms = 0.0;
  Diagnostics diags;

  bool ok() const { return !has_errors(diags); }
};

// Checks S => A in one pass over the full system and explores the root
// system against every invariant expressible over it.
DirectReport direct_check(Manifest& m, const ExploreBounds& bounds);

struct CostComparison {
  struct Row {
    std::string name;
    size_t states = 0;
    double ms = 0.0;
  };
  std::vector<Row> per_check;  // A first, then each C_i
  double t_comp_ms = 0.0, t_direct_ms = 0.0;
  size_t max_comp_states = 0, direct_states = 0;
  bool complete = false;  // both sides reached definite verdicts
  double time_ratio = 0.0, state_ratio = 0.0;
};

CostComparison compare_costs(const CompositionalReport& comp,
                             const DirectReport& direct);

}  // namespace ipa
