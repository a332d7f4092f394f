#include "sdttrp/tabu.hpp"

#include "sdttrp/evaluate.hpp"
#include "sdttrp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdttrp {

namespace {

bool route_visits(const Route& route, int customer) {
    for (const Stop& s : route.stops)
        if (s.kind == StopKind::Visit && s.customer == customer) return true;
    return false;
}

bool windows_ok(const ProblemInstance& inst, const Route& route, const RouteEval& eval) {
    if (eval.schedule.return_time > static_cast<double>(inst.day_end)) return false;
    for (std::size_t i = 0; i < route.stops.size(); ++i) {
        const Stop& s = route.stops[i];
        if (s.kind != StopKind::Visit) continue;
        if (eval.schedule.stops[i].service_start >
            static_cast<double>(inst.customers[s.customer].hard_close))
            return false;
    }
    return true;
}

struct SolutionCounters {
    int soft_violations = 0;
    int overcap_routes = 0;
};

SolutionCounters count_violations(const ProblemInstance& inst, const Solution& sol) {
    SolutionCounters c;
    for (const Route& r : sol.routes) {
        const RouteEval eval = evaluate_route(inst, r);
        c.soft_violations += eval.soft_violations;
        if (eval.capacity_excess > 0) ++c.overcap_routes;
    }
    return c;
}

} // namespace

std::vector<int> find_places_for_insertion(const ProblemInstance& inst, const Route& route,
                                           int customer, double closeness) {
    std::vector<int> places;
    const Vehicle& vehicle = inst.vehicles[route.vehicle];
    const Location& target = inst.customers[customer].location;
    const std::vector<Location> sites = stop_sites(inst, route);

    const int len = static_cast<int>(route.stops.size());
    for (int pos = 0; pos <= len; ++pos) {
        const Location& before = pos == 0 ? inst.depot : sites[pos - 1];
        const Location& after = pos == len ? inst.depot : sites[pos];
        if (travel_time(before, target, vehicle) <= closeness ||
            travel_time(after, target, vehicle) <= closeness)
            places.push_back(pos);
    }
    return places;
}

bool heuristic_step(const ProblemInstance& inst, Solution& sol, const CorridorState& corridor,
                    double closeness, SearchState& state, const TabuParams& params) {
    if (sol.routes.size() < 2) return false;

    // Uniform pick over all visits (split customers proportionally likelier).
    int total_visits = 0;
    for (const Route& r : sol.routes) total_visits += r.visit_count();
    if (total_visits == 0) return false;

    int pick = static_cast<int>(state.rng.below(static_cast<std::uint64_t>(total_visits)));
    std::size_t source = 0;
    int visit_pos = -1;
    for (std::size_t ri = 0; ri < sol.routes.size() && visit_pos < 0; ++ri) {
        const Route& r = sol.routes[ri];
        for (std::size_t i = 0; i < r.stops.size(); ++i) {
            if (r.stops[i].kind != StopKind::Visit) continue;
            if (pick-- == 0) {
                source = ri;
                visit_pos = static_cast<int>(i);
                break;
            }
        }
    }

    const Stop visit = sol.routes[source].stops[visit_pos];
    const auto removed = remove_visit(inst, sol.routes[source], visit_pos);
    if (!removed) return false; // hosts a parked trailer nothing can replace

    const RouteEval source_before = evaluate_route(inst, sol.routes[source]);
    const RouteEval source_after_eval =
        removed->stops.empty() ? RouteEval{} : evaluate_route(inst, *removed);
    const Money deletion_delta =
        (removed->stops.empty() ? 0 : source_after_eval.cost) - source_before.cost;

    // Violation counters of everything that does not change.
    int soft_others = state.current_soft_violations - source_before.soft_violations;
    int overcap_others =
        state.current_overcap_routes - (source_before.capacity_excess > 0 ? 1 : 0);

    struct Move {
        Money cost = 0;
        std::size_t target = 0;
        int position = -1;
        int soft_total = 0;
        int overcap_total = 0;
        bool valid = false;
    } best;

    for (std::size_t t = 0; t < sol.routes.size(); ++t) {
        if (t == source) continue;
        const Route& target_route = sol.routes[t];
        if (route_visits(target_route, visit.customer)) continue;
        const auto blocked =
            state.blocked_until.find({visit.customer, target_route.vehicle});
        if (blocked != state.blocked_until.end() && blocked->second > state.iteration)
            continue;

        const RouteEval target_before = evaluate_route(inst, target_route);
        for (const int pos : find_places_for_insertion(inst, target_route, visit.customer,
                                                       closeness)) {
            Route candidate =
                with_visit_inserted(target_route, visit.customer, visit.delivered, pos);
            if (!route_structure_ok(inst, candidate)) continue;
            const RouteEval after = evaluate_route(inst, candidate);
            if (!windows_ok(inst, candidate, after)) continue; // hard windows never relax

            const int soft_total = soft_others + source_after_eval.soft_violations +
                                   after.soft_violations;
            const int overcap_total = overcap_others +
                                      (source_after_eval.capacity_excess > 0 ? 1 : 0) +
                                      (after.capacity_excess > 0 ? 1 : 0);
            if (soft_total > inst.soft_violation_budget + corridor.max_excess_delays) continue;
            if (overcap_total > corridor.max_overcap_routes) continue;

            const Money cost = deletion_delta + (after.cost - target_before.cost);
            if (!best.valid || cost < best.cost)
                best = {cost, t, pos, soft_total, overcap_total, true};
        }
    }

    // Improving moves always pass; worsening ones must clear the cost cap.
    if (!best.valid || !(best.cost < corridor.max_cost_increase || best.cost < 0)) return false;

    const int from_vehicle = sol.routes[source].vehicle;
    sol.routes[best.target] =
        with_visit_inserted(sol.routes[best.target], visit.customer, visit.delivered,
                            best.position);
    sol.routes[source] = *removed;
    if (sol.routes[source].stops.empty())
        sol.routes.erase(sol.routes.begin() + static_cast<std::ptrdiff_t>(source));

    state.blocked_until[{visit.customer, from_vehicle}] =
        state.iteration + params.reversal_tenure;
    state.current_soft_violations = best.soft_total;
    state.current_overcap_routes = best.overcap_total;
    return true;
}

CorridorState change_corridor(const CorridorState& corridor, SearchState& state,
                              const TabuParams& params) {
    CorridorState out = corridor;
    if (state.failures_in_row >= params.widen_after_failures) {
        out.max_cost_increase = std::max<Money>(
            1, std::llround(static_cast<double>(out.max_cost_increase) * params.corridor_growth));
        out.max_excess_delays = std::min(out.max_excess_delays + 1, params.excess_delay_cap);
        out.max_overcap_routes = std::min(out.max_overcap_routes + 1, params.overcap_routes_cap);
        state.failures_in_row = 0;
    } else if (state.successes_in_row >= params.narrow_after_successes) {
        out.max_cost_increase = std::max<Money>(
            0, std::llround(static_cast<double>(out.max_cost_increase) * params.corridor_shrink));
        out.max_excess_delays = std::max(0, out.max_excess_delays - 1);
        out.max_overcap_routes = std::max(0, out.max_overcap_routes - 1);
        state.successes_in_row = 0;
    }
    return out;
}

bool stopping_condition(const SearchState& state, const TabuParams& params) {
    return state.iteration >= params.step_limit ||
           state.iterations_since_best >= params.stall_limit;
}

Solution improve_solution(const ProblemInstance& inst, const Solution& initial,
                          const TabuParams& params, TabuRunStats* stats) {
    TabuParams resolved = params;
    if (resolved.excess_delay_cap < 0) resolved.excess_delay_cap = inst.soft_violation_budget;
    if (resolved.overcap_routes_cap < 0)
        resolved.overcap_routes_cap =
            std::max<int>(1, static_cast<int>(initial.routes.size()) / 2);

    CorridorState corridor = resolved.initial_corridor;
    corridor.max_excess_delays = std::min(corridor.max_excess_delays, resolved.excess_delay_cap);
    corridor.max_overcap_routes =
        std::min(corridor.max_overcap_routes, resolved.overcap_routes_cap);

    Solution working = initial;
    Solution best = initial;
    Money best_cost = solution_cost(inst, best);

    SearchState state;
    state.rng = Rng(resolved.rng_seed);
    state.feasibility_period = resolved.feasibility_period;
    const SolutionCounters counters = count_violations(inst, working);
    state.current_soft_violations = counters.soft_violations;
    state.current_overcap_routes = counters.overcap_routes;

    while (!stopping_condition(state, resolved)) {
        if (resolved.deadline && std::chrono::steady_clock::now() >= *resolved.deadline) break;

        const bool success =
            heuristic_step(inst, working, corridor, resolved.closeness, state, resolved);
        ++state.iteration;
        ++state.iterations_since_best;
        if (stats) {
            stats->iterations = state.iteration;
            if (success) ++stats->applied_moves;
        }
        if (success) {
            ++state.successes_in_row;
            state.failures_in_row = 0;
            ++state.applied_since_recovery;
        } else {
            ++state.failures_in_row;
            state.successes_in_row = 0;
        }

        const bool currently_feasible =
            state.current_overcap_routes == 0 &&
            state.current_soft_violations <= inst.soft_violation_budget;
        if (state.applied_since_recovery >= state.feasibility_period ||
            (success && currently_feasible)) {
            state.applied_since_recovery = 0;
            RecoveryResult recovered = recovery_pipeline(inst, working);
            if (recovered.ok()) {
                const Money cost = solution_cost(inst, recovered.solution);
                if (cost < best_cost) {
                    best = recovered.solution;
                    best_cost = cost;
                    state.iterations_since_best = 0;
                }
                if (resolved.adopt_recovered) {
                    working = std::move(recovered.solution);
                    const SolutionCounters fresh = count_violations(inst, working);
                    state.current_soft_violations = fresh.soft_violations;
                    state.current_overcap_routes = fresh.overcap_routes;
                }
            }
        }

        if (resolved.observer)
            resolved.observer({state.iteration, success, state.current_soft_violations,
                               state.current_overcap_routes, corridor});

        corridor = change_corridor(corridor, state, resolved);
    }

    return best;
}

} // namespace sdttrp
