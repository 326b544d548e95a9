#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ipa/analysis.hpp"
#include "ipa/ast.hpp"
#include "ipa/composer.hpp"
#include "ipa/explorer.hpp"
#include "ipa/refinement.hpp"

namespace ipa {

// Stable JSON forms. Containers are tagged so every value round-trips
// unambiguously: sets as {"set": [...]}, sequences as {"seq": [...]},
// records as {"rec": {...}}, maps as {"map": [[k, v], ...]}; booleans,
// integers and symbols use the native JSON scalars.
nlohmann::json value_to_json(const Value& v);
// Throws std::runtime_error on malformed input.
Value value_from_json(const nlohmann::json& j);

// A state is an object keyed by variable name.
nlohmann::json state_to_json(const std::vector<std::string>& vars,
                             const State& s);
State state_from_json(const Spec& spec, const nlohmann::json& j);

// {"initial": state, "steps": [{"action": "Module.Action",
//  "binding": [...], "state": state}, ...]}
nlohmann::json trace_to_json(const std::vector<std::string>& vars,
                             const Trace& t);
Trace trace_from_json(const Spec& spec, const nlohmann::json& j);

nlohmann::json exploration_to_json(const std::vector<std::string>& vars,
                                   const ExplorationReport& r);

// Failure evidence keeps the trace in the concrete system's variables and
// the projected pre/post states in the abstract system's.
nlohmann::json refinement_to_json(const std::vector<std::string>& b_vars,
                                  const std::vector<std::string>& a_vars,
                                  const RefinementVerdict& v);

nlohmann::json analysis_to_json(const VarAnalysis& va);
nlohmann::json constraints_to_json(const ConstraintReport& cr);

nlohmann::json compositional_to_json(const CompositionalReport& r);
nlohmann::json direct_to_json(const std::vector<std::string>& root_vars,
                              const DirectReport& r);
nlohmann::json comparison_to_json(const CostComparison& c);

// Serialization used everywhere a JSON document leaves the process:
// 2-space indent, sorted object keys, trailing newline.
std::string json_str(const nlohmann::json& j);

}  // namespace ipa
