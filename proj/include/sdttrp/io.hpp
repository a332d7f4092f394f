#pragma once

#include "sdttrp/greedy.hpp"
#include "sdttrp/model.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace sdttrp::io {

// One JSON document per instance/solution/report, versioned by a top-level
// "format": "sdttrp-1" key. Times are integer seconds, money integer cents.
inline constexpr const char* kFormatTag = "sdttrp-1";

nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j); // throws std::runtime_error

struct LoadedSolution {
    Solution solution;
    bool complete = true;
    std::vector<UnservedDemand> unserved;
};

// Solution documents carry the stop list per route plus a schedule echo
// (recomputed on load, never trusted).
nlohmann::json solution_to_json(const ProblemInstance& inst, const Solution& sol, bool complete,
                                const std::vector<UnservedDemand>& unserved);
LoadedSolution solution_from_json(const nlohmann::json& j);

ProblemInstance load_instance(const std::string& path);
LoadedSolution load_solution(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

} // namespace sdttrp::io
