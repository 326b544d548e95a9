#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipa/ast.hpp"
#include "ipa/explorer.hpp"
#include "ipa/manifest.hpp"

namespace ipa {

// Functional state mapping B -> A: one expression per variable of A
// (index-aligned with A's declaration order), closed over B's variables.
struct StateMapping {
  std::vector<ExprPtr> exprs;
};

// Same-named variables map identically; any other variable of A must have a
// refine entry over B's variables. Appends diagnostics and returns nothing
// when the mapping cannot be built.
std::optional<StateMapping> build_state_mapping(
    Spec& B, const Spec& A, const std::vector<Manifest::RefineEntry>& refine,
    Diagnostics& diags);

struct ActionTranslation {
  bool is_void = false;
  std::string abs_module, abs_action;
  // Argument expressions over the B-action's parameters; empty = positional
  // identity.
  std::vector<ExprPtr> args;
};

// Total mapping from B's actions to A's actions (or VOID).
struct ActionMapping {
  std::map<std::pair<std::string, std::string>, ActionTranslation> entries;

  const ActionTranslation* find(const std::string& module,
                                const std::string& action) const {
    auto it = entries.find({module, action});
    return it == entries.end() ? nullptr : &it->second;
  }
};

State project_state(const Spec& B, const StateMapping& sm, const State& s);

enum class RefinementStatus { Holds, Fails, Inconclusive };

const char* refinement_status_str(RefinementStatus s);

struct RefinementVerdict {
  RefinementStatus status = RefinementStatus::Holds;
  // "initial-state mismatch" | "mapped action disabled" | "wrong post-state"
  // | "VOID step changed projection" | "bound-exceeded"
  std::string reason;
  std::string detail;
  // On failure: a B-trace ending with the failing step (or just the initial
  // state for an initial-state mismatch) and the abstract-side evidence.
  Trace trace;
  size_t failing_step = 0;  // 1-based into trace.steps; 0 = initial state
  State abstract_pre, abstract_post;
  size_t states_explored = 0;
  size_t transitions_checked = 0;
  double elapsed_ms = 0.0;
};

// Transition-level simulation: breadth-first over B's reachable states; every
// transition must map to an enabled A-instance reproducing the projected
// post-state, and VOID-mapped transitions must leave the projection
// unchanged. Initial states must project exactly. Worker setting is ignored
// (single pass); bound overflow yields Inconclusive.
RefinementVerdict check_strong_refinement(const Spec& B, const Spec& A,
                                          const StateMapping& sm,
                                          const ActionMapping& am,
                                          const ExploreBounds& bounds = {});

struct OracleResult {
  bool refused = false;  // B exceeded the oracle's state guard
  RefinementStatus status = RefinementStatus::Holds;
  std::string note;
};

// Independent brute-force check: enumerates every B-trace up to `depth`
// (memoized on (state, remaining depth)), maps it through (sm, am) with
// VOID steps compressed to stutters, and validates each mapped step against
// A's successor sets. Refuses when B has more than `max_states` reachable
// states (default 5,000).
OracleResult trace_inclusion_oracle(const Spec& B, const Spec& A,
                                    const StateMapping& sm,
                                    const ActionMapping& am, size_t depth,
                                    size_t max_states = 5000);

}  // namespace ipa
