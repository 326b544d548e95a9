#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipa/ast.hpp"

namespace ipa {

// Abstraction manifest: pairs each module of a root spec with its abstract
// counterpart, maps concrete actions to abstract actions (or VOID), supplies
// refinement expressions for variables that exist only in abstractions, and
// declares the invariants to check on the abstract system.
struct Manifest {
  std::string name;
  SourceSpan span;
  std::filesystem::path origin;

  std::filesystem::path root_path;
  Spec root;

  struct AbstractionEntry {
    std::string module;  // concrete module name
    std::filesystem::path path;
    Spec spec;
    SourceSpan span;
  };
  std::vector<AbstractionEntry> abstractions;

  struct ActionMapEntry {
    std::string module, action;      // concrete side
    bool is_void = false;
    std::string abs_module, abs_action;
    std::vector<ExprPtr> args;       // over concrete params; empty = identity
    SourceSpan span;
  };
  std::vector<ActionMapEntry> action_map;

  struct RefineEntry {
    std::string var;  // abstract-only variable
    ExprPtr expr;     // over root-spec variables
    SourceSpan span;
  };
  std::vector<RefineEntry> refine;

  struct InvariantEntry {
    std::string name;
    ExprPtr expr;  // over abstract variables
    SourceSpan span;
  };
  std::vector<InvariantEntry> invariants;

  const AbstractionEntry* abstraction_for(const std::string& module) const;
  const ActionMapEntry* mapping_for(const std::string& module,
                                    const std::string& action) const;
  const RefineEntry* refine_for(const std::string& var) const;
};

}  // namespace ipa
