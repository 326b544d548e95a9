#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ipa/ast.hpp"
#include "ipa/source.hpp"

namespace ipa {

struct Trace {
  struct Step {
    ActionInstance inst;
    State state;
  };
  State initial;
  std::vector<Step> steps;
};

struct NamedInvariant {
  std::string name;
  ExprPtr expr;  // boolean, resolved against the explored spec
};

struct ExploreBounds {
  size_t max_states = 10'000'000;
  size_t max_depth = static_cast<size_t>(-1);  // unbounded
  bool deadlock_is_error = false;
  unsigned workers = 1;
};

enum class ExploreStatus {
  Pass,
  InvariantViolated,
  DeadlockFound,
  BoundExceeded,
};

const char* explore_status_str(ExploreStatus s);

struct ExplorationReport {
  ExploreStatus verdict = ExploreStatus::Pass;
  size_t distinct_states = 0;
  size_t transitions = 0;
  size_t depth = 0;  // highest BFS level processed (initial state = 0)
  double elapsed_ms = 0.0;
  // Set iff verdict is InvariantViolated (violated_invariant + violation) or
  // DeadlockFound (violation = path to the deadlocked state).
  std::string violated_invariant;
  std::optional<Trace> violation;
  Diagnostics warnings;  // deadlock advisories when not treated as errors
};

// Level-synchronous breadth-first exploration with exact state
// deduplication. Verdict, counts, and any reported trace are independent of
// the worker count: the frontier is partitioned by state hash, each level is
// a lockstep barrier, and results merge in frontier order. Invariants are
// checked on dequeue; the first violating level reports the violating state
// with the least canonical serialization. Evaluation failures propagate as
// EvalException with the offending action in context.
ExplorationReport explore(const Spec& spec,
                          const std::vector<NamedInvariant>& invariants,
                          const ExploreBounds& bounds = {});

struct ReplayResult {
  bool valid = false;
  size_t failed_step = 0;  // 1-based; 0 = the initial state itself
  std::string detail;
};

// Validates that a trace starts at the spec's initial state and that every
// step is a legal transition reproducing the recorded post-state.
ReplayResult trace_replay(const Spec& spec, const Trace& trace);

}  // namespace ipa
