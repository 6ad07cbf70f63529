#ifndef STOCHMATCH_SCENARIO_HPP_
#define STOCHMATCH_SCENARIO_HPP_

#include <string>

#include "stochmatch/core_model.hpp"

namespace stochmatch {

/// Parses the JSON scenario format:
///
///   {
///     "vertices": [
///       {"id": 0, "arrival": 1, "deadline": 2,
///        "death_dist": [0.5, 0.5],
///        "death_dist_rational": ["1/2", "1/2"]},   // optional
///       ...
///     ],
///     "edges": [[0, 1], ...]
///   }
///
/// Unknown fields are rejected.  Ids must be dense 0..n-1.  Malformed JSON
/// raises ScenarioParseError (with line/column); semantic problems raise
/// ModelError carrying the validation report.
StochasticModel parse_scenario(const std::string& text);

/// Canonical serialization: vertices and edges sorted by id, two-space
/// indentation, doubles rendered so that parse(serialize(m)) == m.
std::string serialize_scenario(const StochasticModel& m);

StochasticModel load_scenario_file(const std::string& path);
void save_scenario_file(const StochasticModel& m, const std::string& path);

}  // namespace stochmatch

#endif  // STOCHMATCH_SCENARIO_HPP_
