#pragma once

#include "sdttrp/evaluate.hpp"
#include "sdttrp/model.hpp"
#include "sdttrp/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sdttrp {

struct GreedyParams {
    int mu = 3;                 // seed pool: the mu farthest unserved customers
    std::uint64_t rng_seed = 0;
    // The source pseudo-code can be read as resetting the soft-violation
    // budget at every route; the default keeps one global budget, which is
    // the only reading consistent with the per-route decrement at closure.
    bool reset_soft_budget_per_route = false;
};

struct UnservedDemand {
    int customer = -1;
    Load remaining = 0;

    friend bool operator==(const UnservedDemand&, const UnservedDemand&) = default;
};

struct VehicleSlot {
    Load remaining = 0; // Q_k
    bool used = false;
};

struct GreedyState {
    std::vector<UnservedDemand> unserved; // U, farthest from depot first
    int remaining_soft_budget = 0;        // w
    int remaining_split_budget = 0;
    std::vector<VehicleSlot> vehicles;    // indexed by vehicle id
};

struct GreedyResult {
    Solution solution;
    std::vector<UnservedDemand> unserved; // remaining demand per unservable customer
    bool fleet_exhausted = false;

    bool complete() const { return !fleet_exhausted; }
};

GreedyState make_greedy_state(const ProblemInstance& inst);

// Cheapest-fixed-cost unused vehicle allowed for the customer, preferring
// ones that fit the full remaining demand; ties go to larger capacity then
// lower id. nullopt when every allowed vehicle is used.
std::optional<int> choose_vehicle(const ProblemInstance& inst, const GreedyState& state,
                                  int seed_customer);

// Per-route soft-violation allowance: repeated draws against the ratio of
// the remaining budget w to the estimated remaining need, capped at w.
int draw_violation_allowance(const ProblemInstance& inst, const GreedyState& state, Rng& rng);

// Whether this route may open one new split delivery, with probability
// remaining split budget over the estimated remaining need.
bool maybe_allow_split(const ProblemInstance& inst, const GreedyState& state, Rng& rng);

// Seed route for one customer: a single visit, wrapped in a parked segment
// at the nearest transshipment point when a truck-only customer meets a
// trailer vehicle. nullopt when no such segment can be anchored.
std::optional<Route> basic_route(const ProblemInstance& inst, int vehicle, int customer,
                                 Load amount);

// Best-of-two-candidates insertion loop: repeatedly inserts the cheapest
// feasible customer (with or without a new soft violation) until nothing
// fits, then closes the route and charges its violations to the budget.
Route insert_loop(const ProblemInstance& inst, GreedyState& state, Route route,
                  int viol_allowance, bool split_enabled, Rng& rng);

// Full construction: farthest-first seeding, vehicle choice, randomized
// per-route violation/split allowances, insertion loop; deterministic for a
// fixed seed. Customers no unused vehicle can serve are reported unserved.
GreedyResult build_initial_solution(const ProblemInstance& inst, const GreedyParams& params);

} // namespace sdttrp
