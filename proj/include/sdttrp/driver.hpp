#pragma once

#include "sdttrp/greedy.hpp"
#include "sdttrp/model.hpp"
#include "sdttrp/tabu.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace sdttrp {

struct SolveParams {
    std::uint64_t seed = 0;
    int mu = 3;
    bool reset_soft_budget_per_route = false;
    bool greedy_only = false;
    TabuParams tabu;
    // Practical anytime mode; without it runs are step-capped and exactly
    // reproducible (reports then carry wall_time 0).
    std::optional<double> time_limit_seconds;
    std::optional<int> soft_budget_override;
    std::optional<int> split_budget_override;
};

struct RunReport {
    std::string instance_id;
    std::uint64_t seed = 0;
    Money greedy_cost = 0;
    Money tabu_cost = 0;
    double improvement = 0.0; // (tabu - greedy) / greedy, <= 0 for completed runs
    double wall_time = 0.0;   // seconds; 0 in step-capped mode
    long long iterations = 0;
    bool feasible = false;
    bool complete = false;
};

struct SolveOutcome {
    Solution solution;
    bool complete = false;
    std::vector<UnservedDemand> unserved;
    RunReport report;
};

// Greedy construction followed by the tabu improvement (unless greedy_only),
// under the budget overrides if given. Deterministic in (inst, params) when
// no time limit is set.
SolveOutcome solve_instance(const ProblemInstance& inst, const SolveParams& params,
                            const std::string& instance_id);

nlohmann::json report_to_json(const RunReport& report);

} // namespace sdttrp
