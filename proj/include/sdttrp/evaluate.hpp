#pragma once

#include "sdttrp/model.hpp"

#include <optional>
#include <vector>

namespace sdttrp {

struct StopTimes {
    double arrival = 0.0;
    double service_start = 0.0;
    double departure = 0.0;
};

struct Schedule {
    std::vector<StopTimes> stops;
    double return_time = 0.0;
};

struct RouteEval {
    Money cost = 0;
    bool hard_feasible = true;
    int soft_violations = 0;      // v_R
    Load capacity_excess = 0;     // max(0, delivered - total capacity)
    Schedule schedule;
};

struct InsertionEval {
    Money delta_cost = 0;
    int new_soft_violations = 0;
};

double travel_time(const Location& a, const Location& b, const Vehicle& vehicle);

// Per-arc travel cost in integer cents (rounded per arc so route cost is an
// exact integer sum, invariant under summation order).
Money arc_cost(const Location& a, const Location& b, const Vehicle& vehicle);

// Forward time pass. Departure from the depot at route.depot_departure
// (day_start when unset); waiting is inserted when arriving before
// hard_open; park stops add trailer_park_time plus load-transfer time for
// the segment's delivered sum, attach stops add trailer_park_time.
Schedule schedule_route(const ProblemInstance& inst, const Route& route);

// Cost, feasibility flags and schedule of one route. Requires the route to
// pass route_structure_ok. Capacity excess is reported, not rejected, so
// the tabu corridor can traverse over-capacity routes.
RouteEval evaluate_route(const ProblemInstance& inst, const Route& route);

Money solution_cost(const ProblemInstance& inst, const Solution& sol);

// Candidate route with a visit spliced in at stop index `position`.
Route with_visit_inserted(const Route& route, int customer, Load amount, int position);

// Cost delta and added soft violations for inserting a visit, or nullopt
// when the insertion is infeasible: structural break, hard window or
// day-end violation, capacity excess, route soft count above
// viol_allowance, or any new soft violation when may_violate is false.
std::optional<InsertionEval> insertion_cost(const ProblemInstance& inst, const Route& route,
                                            int customer, Load amount, int position,
                                            bool may_violate, int viol_allowance);

// Cost delta of removing the visit at `visit_position`; removing the last
// visit dissolves the route (fixed cost included in the delta). nullopt in
// the rare case the visit hosts a parked trailer that cannot be re-anchored.
std::optional<Money> deletion_cost(const ProblemInstance& inst, const Route& route,
                                   int visit_position);

} // namespace sdttrp
