#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "riskalloc/experiments.hpp"
#include "riskalloc/model.hpp"
#include "riskalloc/solver.hpp"

namespace riskalloc {

using Json = nlohmann::ordered_json;

// Problem file:
//   {"trait_names": [...]?,
//    "species": [{"name"?, "mu": [U], "var": [U], "count": n}, ...],
//    "tasks":   [{"name"?, "requirements": [U]}, ...]}
Json problem_to_json(const ProblemInstance& problem);

/// Throws ErrorKind::Parse naming the offending field, e.g.
/// "species[1].var: expected 2 numbers".
ProblemInstance problem_from_json(const Json& doc);

/// Parses problem-file text; JSON syntax errors report line and column.
ProblemInstance parse_problem(std::string_view text);

// Pretty-printed with a trailing newline.
std::string dump_json(const Json& doc);

Json allocation_to_json(const IntMatrix& x);
IntMatrix allocation_from_json(const Json& doc, std::string_view field);

Json config_to_json(const SolverConfig& cfg);

/// Result file. Probabilities carry 12 significant digits; "seconds" is
/// null unless `include_timing` is set.
Json solution_to_json(const Solution& solution, const SolverConfig& cfg,
                      bool include_timing);

// {"preset": name, "allocations": {"ours": [[..]], ...}}
Json references_to_json(const std::string& name, const Preset& preset);

}  // namespace riskalloc
