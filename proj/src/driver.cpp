#include "sdttrp/driver.hpp"

#include "sdttrp/evaluate.hpp"

#include <chrono>

namespace sdttrp {

namespace {

// Stream index for the tabu rng, far above any greedy construction round.
constexpr std::uint64_t kTabuStream = 1000003;

} // namespace

SolveOutcome solve_instance(const ProblemInstance& inst, const SolveParams& params,
                            const std::string& instance_id) {
    ProblemInstance work = inst;
    if (params.soft_budget_override) work.soft_violation_budget = *params.soft_budget_override;
    if (params.split_budget_override) work.split_budget = *params.split_budget_override;

    const auto started = std::chrono::steady_clock::now();

    GreedyParams greedy_params;
    greedy_params.mu = params.mu;
    greedy_params.rng_seed = params.seed;
    greedy_params.reset_soft_budget_per_route = params.reset_soft_budget_per_route;
    GreedyResult constructed = build_initial_solution(work, greedy_params);

    SolveOutcome outcome;
    outcome.report.instance_id = instance_id;
    outcome.report.seed = params.seed;
    outcome.report.greedy_cost = solution_cost(work, constructed.solution);
    outcome.unserved = constructed.unserved;
    outcome.complete = constructed.complete();

    if (!outcome.complete) {
        outcome.solution = std::move(constructed.solution);
        outcome.report.tabu_cost = outcome.report.greedy_cost;
        outcome.report.feasible = false;
        outcome.report.complete = false;
        return outcome;
    }

    TabuRunStats stats;
    if (params.greedy_only) {
        outcome.solution = std::move(constructed.solution);
        outcome.report.tabu_cost = outcome.report.greedy_cost;
    } else {
        TabuParams tabu_params = params.tabu;
        tabu_params.rng_seed = derive_stream(params.seed, kTabuStream);
        if (params.time_limit_seconds)
            tabu_params.deadline = started + std::chrono::duration_cast<
                                                 std::chrono::steady_clock::duration>(
                                                 std::chrono::duration<double>(
                                                     *params.time_limit_seconds));
        outcome.solution =
            improve_solution(work, constructed.solution, tabu_params, &stats);
        outcome.report.tabu_cost = solution_cost(work, outcome.solution);
    }

    outcome.report.iterations = stats.iterations;
    outcome.report.complete = true;
    outcome.report.feasible = validate_solution(work, outcome.solution).empty();
    outcome.report.improvement =
        outcome.report.greedy_cost > 0
            ? static_cast<double>(outcome.report.tabu_cost - outcome.report.greedy_cost) /
                  static_cast<double>(outcome.report.greedy_cost)
            : 0.0;
    if (params.time_limit_seconds) {
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - started;
        outcome.report.wall_time = elapsed.count();
    }
    return outcome;
}

nlohmann::json report_to_json(const RunReport& report) {
    return {{"format", "sdttrp-1"},
            {"type", "report"},
            {"instance", report.instance_id},
            {"seed", report.seed},
            {"greedy_cost", report.greedy_cost},
            {"tabu_cost", report.tabu_cost},
            {"improvement", report.improvement},
            {"wall_time", report.wall_time},
            {"iterations", report.iterations},
            {"feasible", report.feasible},
            {"complete", report.complete}};
}

} // namespace sdttrp
