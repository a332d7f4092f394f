#pragma once

#include "sdttrp/model.hpp"
#include "sdttrp/rng.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace sdttrp {

// The infeasibility corridor the improvement search may traverse: extra
// soft violations beyond the instance budget, over-capacity route count,
// and the per-move cost-increase allowance.
struct CorridorState {
    int max_excess_delays = 1;
    int max_overcap_routes = 1;
    Money max_cost_increase = 2000; // cents

    friend bool operator==(const CorridorState&, const CorridorState&) = default;
};

struct SearchState {
    long long iteration = 0;
    int successes_in_row = 0;
    int failures_in_row = 0;
    long long iterations_since_best = 0;
    int feasibility_period = 25;
    Rng rng{0};
    int current_overcap_routes = 0;
    int current_soft_violations = 0;
    int applied_since_recovery = 0;
    // Anti-cycling memory: (customer, vehicle) may not be re-joined before
    // the stored iteration.
    std::map<std::pair<int, int>, long long> blocked_until;
};

// Per-iteration snapshot passed to the observer hook.
struct TabuStepInfo {
    long long iteration = 0;
    bool success = false;
    int soft_violations = 0;
    int overcap_routes = 0;
    CorridorState corridor;
};

struct TabuParams {
    double closeness = 900.0; // max travel seconds to an adjacent stop at an insertion place
    CorridorState initial_corridor;
    int feasibility_period = 25; // applied moves between recovery attempts
    long long stall_limit = 500;
    long long step_limit = 5000;
    double corridor_growth = 2.0;
    double corridor_shrink = 0.5;
    int widen_after_failures = 5;
    int narrow_after_successes = 3;
    // Corridor allowance caps; negative values resolve at improve() start to
    // the soft budget and half the route count respectively.
    int excess_delay_cap = -1;
    int overcap_routes_cap = -1;
    std::uint64_t rng_seed = 0;
    // Recovered solutions compete for the incumbent and, by default, also
    // replace the working solution.
    bool adopt_recovered = true;
    int reversal_tenure = 3;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::function<void(const TabuStepInfo&)> observer;
};

// Insertion slots of the route where a neighboring stop (or the depot at
// the ends) is within `closeness` travel seconds of the customer.
std::vector<int> find_places_for_insertion(const ProblemInstance& inst, const Route& route,
                                           int customer, double closeness);

// One relocate attempt: a uniformly random visit, the best corridor-feasible
// insertion into another route, applied when its total delta clears the
// corridor's cost cap. Returns whether a move was applied.
bool heuristic_step(const ProblemInstance& inst, Solution& sol, const CorridorState& corridor,
                    double closeness, SearchState& state, const TabuParams& params);

// Widens the corridor after a failure streak, narrows it after a success
// streak; streak counters reset on adjustment.
CorridorState change_corridor(const CorridorState& corridor, SearchState& state,
                              const TabuParams& params);

bool stopping_condition(const SearchState& state, const TabuParams& params);

struct TabuRunStats {
    long long iterations = 0;
    long long applied_moves = 0;
};

// Corridor-controlled improvement loop over an initial feasible solution.
// Returns the best feasible solution found; its cost never exceeds the
// initial one.
Solution improve_solution(const ProblemInstance& inst, const Solution& initial,
                          const TabuParams& params, TabuRunStats* stats = nullptr);

} // namespace sdttrp
