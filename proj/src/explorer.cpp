#include "ipa/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <thread>
#include <unordered_map>

#include "ipa/eval.hpp"

namespace ipa {

const char* explore_status_str(ExploreStatus s) {
  switch (s) {
    case ExploreStatus::Pass:
      return "pass";
    case ExploreStatus::InvariantViolated:
      return "invariant-violated";
    case ExploreStatus::DeadlockFound:
      return "deadlock-found";
    case ExploreStatus::BoundExceeded:
      return "bound-exceeded";
  }
  return "?";
}

namespace {

// Module/action positions instead of name strings: states outnumber the
// action inventory by many orders of magnitude, so per-state bookkeeping
// stays small and the names are rebuilt only for the one reported trace.
struct CompactInst {
  uint32_t module_idx = 0;
  uint32_t action_idx = 0;
  Binding binding;
};

struct Stored {
  const State* state;   // owned by the dedup index; nodes are stable
  int64_t pred;         // index of the first-discovered predecessor, -1 = init
  CompactInst via;      // instance that discovered this state
};

struct LevelResult {
  std::vector<Successor> succs;
  std::optional<EvalError> error;
};

ActionInstance materialize(const Spec& spec, const CompactInst& ci) {
  const Module& m = spec.modules[ci.module_idx];
  return {m.name, m.actions[ci.action_idx].name, ci.binding};
}

Trace trace_to(const Spec& spec, const std::deque<Stored>& stored,
               size_t idx) {
  std::vector<Trace::Step> steps;
  int64_t i = static_cast<int64_t>(idx);
  while (stored[static_cast<size_t>(i)].pred >= 0) {
    const Stored& s = stored[static_cast<size_t>(i)];
    steps.push_back({materialize(spec, s.via), *s.state});
    i = s.pred;
  }
  std::reverse(steps.begin(), steps.end());
  return Trace{*stored[static_cast<size_t>(i)].state, std::move(steps)};
}

// Frontier positions are expanded in fixed-size slices so the successor
// buffer stays bounded no matter how wide a level gets.
constexpr size_t kExpandChunk = 2048;

}  // namespace

ExplorationReport explore(const Spec& spec,
                          const std::vector<NamedInvariant>& invariants,
                          const ExploreBounds& bounds) {
  const auto t0 = std::chrono::steady_clock::now();
  ExplorationReport report;
  std::deque<Stored> stored;
  std::unordered_map<State, size_t, StateHash> index;

  auto finish = [&](ExploreStatus v) -> ExplorationReport& {
    report.verdict = v;
    report.distinct_states = stored.size();
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    return report;
  };

  State init = initial_state(spec);
  auto [init_it, init_ok] = index.emplace(std::move(init), 0);
  (void)init_ok;
  stored.push_back({&init_it->first, -1, {}});

  const unsigned workers = std::max(1u, bounds.workers);
  std::vector<size_t> frontier = {0};
  size_t level = 0;
  size_t deadlocked = 0;

  while (!frontier.empty()) {
    report.depth = level;

    // Invariants are checked when a state is dequeued. All violations in
    // this level are collected first so the report does not depend on
    // frontier order: the violating state with the least canonical
    // serialization wins.
    size_t best = static_cast<size_t>(-1);
    std::string best_key;
    const NamedInvariant* best_inv = nullptr;
    for (size_t idx : frontier) {
      for (const NamedInvariant& inv : invariants) {
        if (!eval_closed(spec, inv.expr, *stored[idx].state).as_bool()) {
          std::string key = canonical_key(*stored[idx].state);
          if (best == static_cast<size_t>(-1) || key < best_key) {
            best = idx;
            best_key = std::move(key);
            best_inv = &inv;
          }
          break;
        }
      }
    }
    if (best != static_cast<size_t>(-1)) {
      report.violated_invariant = best_inv->name;
      report.violation = trace_to(spec, stored, best);
      return finish(ExploreStatus::InvariantViolated);
    }

    std::vector<size_t> next_frontier;
    bool depth_cut = level >= bounds.max_depth;
    bool new_beyond_depth = false;
    for (size_t base = 0; base < frontier.size(); base += kExpandChunk) {
      const size_t chunk_end = std::min(frontier.size(), base + kExpandChunk);

      // Expand the slice: positions are partitioned across workers by state
      // hash; each position's result slot is owned by exactly one worker.
      std::vector<LevelResult> results(chunk_end - base);
      auto expand = [&](unsigned worker) {
        for (size_t pos = base; pos < chunk_end; pos++) {
          const State& st = *stored[frontier[pos]].state;
          if (st.hash % workers != worker) continue;
          try {
            results[pos - base].succs = successors(spec, st);
          } catch (const EvalException& ex) {
            results[pos - base].error = ex.err;
          }
        }
      };
      if (workers == 1) {
        expand(0);
      } else {
        std::vector<std::thread> threads;
        for (unsigned w = 1; w < workers; w++) threads.emplace_back(expand, w);
        expand(0);
        for (std::thread& t : threads) t.join();
      }

      // Merge sequentially in frontier order: discovery order, predecessor
      // links, counts and bound behavior are all worker-count independent.
      for (size_t pos = base; pos < chunk_end; pos++) {
        if (results[pos - base].error) {
          EvalError err = *results[pos - base].error;
          if (err.context.empty())
            err.context =
                "state " + canonical_key(*stored[frontier[pos]].state);
          throw EvalException(std::move(err));
        }
        std::vector<Successor>& succs = results[pos - base].succs;
        if (succs.empty()) {
          deadlocked++;
          if (bounds.deadlock_is_error) {
            report.violation = trace_to(spec, stored, frontier[pos]);
            return finish(ExploreStatus::DeadlockFound);
          }
          continue;
        }
        report.transitions += succs.size();
        for (Successor& sc : succs) {
          auto it = index.find(sc.state);
          if (it != index.end()) continue;
          if (depth_cut) {
            new_beyond_depth = true;
            continue;
          }
          if (stored.size() >= bounds.max_states)
            return finish(ExploreStatus::BoundExceeded);
          size_t id = stored.size();
          auto [nit, fresh] = index.emplace(std::move(sc.state), id);
          (void)fresh;
          stored.push_back({&nit->first, static_cast<int64_t>(frontier[pos]),
                            {sc.module_idx, sc.action_idx,
                             std::move(sc.inst.binding)}});
          next_frontier.push_back(id);
        }
        succs.clear();
        succs.shrink_to_fit();
      }
    }
    if (new_beyond_depth) return finish(ExploreStatus::BoundExceeded);
    frontier = std::move(next_frontier);
    level++;
  }

  if (deadlocked > 0 && !bounds.deadlock_is_error)
    report.warnings.push_back(
        warning("W-deadlock",
                std::to_string(deadlocked) + " reachable state(s) have no "
                                             "successor",
                SourceSpan{spec.name, 0, 0, 0}));
  return finish(ExploreStatus::Pass);
}

ReplayResult trace_replay(const Spec& spec, const Trace& trace) {
  State cur;
  try {
    cur = initial_state(spec);
  } catch (const EvalException& ex) {
    return {false, 0, "initial state evaluation failed: " + ex.err.message};
  }
  if (!(trace.initial == cur))
    return {false, 0, "trace does not start at the initial state"};
  for (size_t k = 0; k < trace.steps.size(); k++) {
    const Trace::Step& step = trace.steps[k];
    const Action* a = spec.find_action(step.inst.module, step.inst.action);
    if (!a)
      return {false, k + 1,
              "unknown action '" + step.inst.module + "." + step.inst.action +
                  "'"};
    if (a->params.size() != step.inst.binding.size())
      return {false, k + 1, "binding arity mismatch"};
    for (size_t i = 0; i < a->params.size(); i++) {
      std::vector<Value> dom = binder_values(spec, a->params[i].dom);
      if (std::find(dom.begin(), dom.end(), step.inst.binding[i]) ==
          dom.end())
        return {false, k + 1,
                "binding value " + step.inst.binding[i].str() +
                    " outside parameter domain"};
    }
    try {
      if (!action_enabled(spec, *a, step.inst.binding, cur))
        return {false, k + 1,
                "action '" + step.inst.action + "' not enabled"};
      State next = apply_action(spec, *a, step.inst.binding, cur);
      if (!(next == step.state))
        return {false, k + 1, "recorded post-state does not match"};
      cur = std::move(next);
    } catch (const EvalException& ex) {
      return {false, k + 1, "evaluation failed: " + ex.err.message};
    }
  }
  return {true, 0, ""};
}

}  // namespace ipa
