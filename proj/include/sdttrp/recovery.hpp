#pragma once

#include "sdttrp/model.hpp"

#include <string>
#include <vector>

namespace sdttrp {

struct RecoveryOptions {
    // Splitting an oversized customer across routes while restoring
    // capacity is off by default; it consumes the instance's split budget.
    bool allow_split_for_capacity = false;
};

enum class RecoveryStatus { Ok, FleetExhausted, RecoveryFailed };

struct RecoveryResult {
    RecoveryStatus status = RecoveryStatus::Ok;
    Solution solution;
    std::string detail;

    bool ok() const { return status == RecoveryStatus::Ok; }
};

// Route indices whose delivered total exceeds the vehicle capacity (CVset).
std::vector<std::size_t> capacity_violation_set(const ProblemInstance& inst, const Solution& sol);

// Intra-route best-improvement relocate and 2-opt passes per route until no
// improving move remains. Keeps customer-route assignment; never increases
// a route's cost, soft violations or capacity excess.
Solution routes_optimization(const ProblemInstance& inst, Solution sol);

// Empties the CVset: first relocates customers from over-capacity routes
// into routes that can take them feasibly, then opens new routes for what
// is left. FleetExhausted when a new route would be needed but no unused
// allowed vehicle fits.
RecoveryResult recover_capacity_violations(const ProblemInstance& inst, Solution sol,
                                           const RecoveryOptions& options = {});

// Shifts each route's depot departure to the latest whole second that keeps
// every visit in its current feasibility class, minimizing waiting. Visit
// order, amounts and the set of delayed visits are unchanged.
Solution finalize_routes_times(const ProblemInstance& inst, Solution sol);

// Brings the total soft-violation count back under the budget by moving the
// latest-served delayed visits: relocation without new violations, cheaper
// intra-route slots, or a fresh route. RecoveryFailed when stuck.
RecoveryResult recover_soft_window_violations(const ProblemInstance& inst, Solution sol);

// routes_optimization -> recover_capacity_violations -> finalize_routes_times
// -> recover_soft_window_violations; on success the result is fully valid.
RecoveryResult recovery_pipeline(const ProblemInstance& inst, Solution sol,
                                 const RecoveryOptions& options = {});

} // namespace sdttrp
