#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ipa/ast.hpp"
#include "ipa/manifest.hpp"
#include "ipa/source.hpp"

namespace ipa {

// Read-set analysis of a module partition: which variables a module's
// behavior depends on (deps), which variables carry inter-module interaction
// (interaction), and which are private to a module (internal).
struct VarAnalysis {
  // Keyed "Module.Action": state variables read by the action's guards.
  std::map<std::string, std::set<std::string>> action_deps;
  // Dependency closure per module.
  std::map<std::string, std::set<std::string>> module_deps;
  std::set<std::string> interaction;
  // internal[M] = module_deps[M] minus interaction.
  std::map<std::string, std::set<std::string>> internal;
  // W-blind-write and similar advisories.
  Diagnostics warnings;
};

// Guard read set of one action (rule 1: parameters/constants excluded).
std::set<std::string> action_deps(const Action& a);

// Per-module dependency fixpoint: starts from the guard read sets of the
// module's actions and, whenever an action updates a variable already in the
// set, pulls in the update's full right-hand-side read set, to stabilization.
std::map<std::string, std::set<std::string>> module_deps(const Spec& spec);

// Interaction fixpoint: seeded with every pairwise intersection of module
// dependency sets; closed under: an action of module M assigning to an
// interaction variable (or to one of M's non-interaction dependency
// variables) forces the assignment's reads outside deps[M] into the set.
std::set<std::string> interaction_vars(
    const Spec& spec,
    const std::map<std::string, std::set<std::string>>& deps);

// deps[M] minus interaction, with the cross-module disjointness property
// asserted: (deps[Mi] \ I) ∩ deps[Mj] must be empty for i ≠ j. A violation
// is an analyzer bug, reported by exception, never a user diagnostic.
std::map<std::string, std::set<std::string>> internal_vars(
    const std::map<std::string, std::set<std::string>>& deps,
    const std::set<std::string>& interaction);

// All of the above plus blind-write advisories (an action storing into a
// variable outside its own module's deps ∪ interaction).
VarAnalysis analyze(const Spec& spec);

struct ConstraintIssue {
  std::string detail;
  SourceSpan span;
};

// One verdict per (module, constraint 1..4). Constraint 4 is the syntactic
// half of the action-mapping check; its semantic half is the refinement
// check, so its passing verdict reads "syntactic-pass".
struct ConstraintVerdict {
  std::string module;
  int constraint = 0;
  bool pass = false;
  std::vector<ConstraintIssue> issues;

  std::string verdict_str() const {
    if (!pass) return "fail";
    return constraint == 4 ? "syntactic-pass" : "pass";
  }
};

struct ConstraintReport {
  std::vector<ConstraintVerdict> entries;  // root-spec module order, 4 each

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  const ConstraintVerdict* entry(const std::string& module,
                                 int constraint) const {
    for (const auto& e : entries)
      if (e.module == module && e.constraint == constraint) return &e;
    return nullptr;
  }
};

// Checks the four abstraction constraints for every module of the manifest's
// root spec against its abstraction.
ConstraintReport check_abstraction_constraints(const Manifest& m,
                                               const VarAnalysis& va);

}  // namespace ipa
