#include "sdttrp/recovery.hpp"

#include "sdttrp/evaluate.hpp"
#include "sdttrp/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sdttrp {

namespace {

constexpr int kUnbounded = std::numeric_limits<int>::max();

bool route_visits(const Route& route, int customer) {
    for (const Stop& s : route.stops)
        if (s.kind == StopKind::Visit && s.customer == customer) return true;
    return false;
}

// Visit positions that do not host a parked trailer right behind them.
std::vector<int> visit_positions(const Route& route) {
    std::vector<int> pos;
    for (int i = 0; i < static_cast<int>(route.stops.size()); ++i)
        if (route.stops[i].kind == StopKind::Visit) pos.push_back(i);
    return pos;
}

bool time_feasible(const ProblemInstance& inst, const Route& route, const RouteEval& eval) {
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

// Cheapest feasible plain-slot insertion of (customer, amount) into the
// route. Soft violations in the target are capped by max_route_soft;
// require_no_new_soft additionally forbids adding any.
struct SlotInsertion {
    Money delta = 0;
    int position = -1;
};

std::optional<SlotInsertion> cheapest_insertion(const ProblemInstance& inst, const Route& route,
                                                int customer, Load amount, bool require_no_new_soft,
                                                int max_route_soft) {
    std::optional<SlotInsertion> best;
    for (int pos = 0; pos <= static_cast<int>(route.stops.size()); ++pos) {
        const auto eval = insertion_cost(inst, route, customer, amount, pos,
                                         !require_no_new_soft, max_route_soft);
        if (!eval) continue;
        if (!best || eval->delta_cost < best->delta) best = SlotInsertion{eval->delta_cost, pos};
    }
    return best;
}

} // namespace

std::vector<std::size_t> capacity_violation_set(const ProblemInstance& inst, const Solution& sol) {
    std::vector<std::size_t> cv;
    for (std::size_t i = 0; i < sol.routes.size(); ++i) {
        const Route& r = sol.routes[i];
        if (r.delivered_total() > inst.vehicles[r.vehicle].total_capacity()) cv.push_back(i);
    }
    return cv;
}

Solution routes_optimization(const ProblemInstance& inst, Solution sol) {
    for (Route& route : sol.routes) {
        if (route.visit_count() < 2) continue;
        for (;;) {
            const RouteEval before = evaluate_route(inst, route);
            const bool was_time_feasible = time_feasible(inst, route, before);

            Route best_route;
            Money best_cost = before.cost;
            bool found = false;
            auto try_candidate = [&](Route&& cand) {
                if (!route_structure_ok(inst, cand)) return;
                const RouteEval after = evaluate_route(inst, cand);
                if (after.cost >= best_cost) return;
                if (after.soft_violations > before.soft_violations) return;
                if (was_time_feasible && !time_feasible(inst, cand, after)) return;
                best_cost = after.cost;
                best_route = std::move(cand);
                found = true;
            };

            const int len = static_cast<int>(route.stops.size());

            // Relocate one visit to another slot.
            for (int from : visit_positions(route)) {
                const auto removed = remove_visit(inst, route, from);
                if (!removed) continue;
                const Stop visit = route.stops[from];
                for (int to = 0; to <= static_cast<int>(removed->stops.size()); ++to) {
                    Route cand = *removed;
                    cand.stops.insert(cand.stops.begin() + to, visit);
                    try_candidate(std::move(cand));
                }
            }

            // 2-opt: reverse a run of consecutive visits.
            for (int i = 0; i < len; ++i) {
                if (route.stops[i].kind != StopKind::Visit) continue;
                for (int j = i + 1; j < len && route.stops[j].kind == StopKind::Visit; ++j) {
                    Route cand = route;
                    cand.depot_departure.reset();
                    std::reverse(cand.stops.begin() + i, cand.stops.begin() + j + 1);
                    try_candidate(std::move(cand));
                }
            }

            if (!found) break;
            route = best_route;
        }
    }
    return sol;
}

RecoveryResult recover_capacity_violations(const ProblemInstance& inst, Solution sol,
                                           const RecoveryOptions& options) {
    // Phase 1: pull customers out of over-capacity routes into routes that
    // can take them without any hard violation.
    const std::vector<std::size_t> initial_cv = capacity_violation_set(inst, sol);
    std::set<std::size_t> still_over(initial_cv.begin(), initial_cv.end());

    for (const std::size_t source : initial_cv) {
        while (still_over.count(source)) {
            struct Move {
                Money cost = 0;
                std::size_t target = 0;
                int visit_pos = -1;
                int insert_pos = -1;
                bool valid = false;
            } best;

            const Route& from = sol.routes[source];
            for (const int pos : visit_positions(from)) {
                const Stop& visit = from.stops[pos];
                const auto del = deletion_cost(inst, from, pos);
                if (!del) continue; // unremovable parked-trailer host
                for (std::size_t t = 0; t < sol.routes.size(); ++t) {
                    if (t == source || still_over.count(t)) continue;
                    if (route_visits(sol.routes[t], visit.customer)) continue;
                    const auto ins = cheapest_insertion(inst, sol.routes[t], visit.customer,
                                                        visit.delivered, false, kUnbounded);
                    if (!ins) continue;
                    const Money cost = *del + ins->delta;
                    if (!best.valid || cost < best.cost) {
                        best = {cost, t, pos, ins->position, true};
                    }
                }
            }

            if (!best.valid) break;

            const Stop visit = sol.routes[source].stops[best.visit_pos];
            sol.routes[best.target] = with_visit_inserted(sol.routes[best.target], visit.customer,
                                                          visit.delivered, best.insert_pos);
            sol.routes[source] = *remove_visit(inst, sol.routes[source], best.visit_pos);
            if (sol.routes[source].delivered_total() <=
                inst.vehicles[sol.routes[source].vehicle].total_capacity())
                still_over.erase(source);
        }
    }
    std::erase_if(sol.routes, [](const Route& r) { return r.stops.empty(); });

    // Phase 2: open new routes for whatever is still over capacity.
    for (;;) {
        const auto cv = capacity_violation_set(inst, sol);
        if (cv.empty()) break;
        const std::size_t source = cv.front(); // deterministic stand-in for a random pick

        std::set<int> used_vehicles;
        for (const Route& r : sol.routes) used_vehicles.insert(r.vehicle);

        const Route& from = sol.routes[source];
        const Load excess =
            from.delivered_total() - inst.vehicles[from.vehicle].total_capacity();

        // Visit whose extraction reduces the excess most; ties by the
        // cheaper extraction (deletion delta plus the new route's cost).
        struct Extraction {
            int pos = -1;
            Load reduction = 0;
            Money cost = 0;
            int vehicle = -1;
            Route new_route;
            bool valid = false;
        } best;

        for (const int pos : visit_positions(from)) {
            const Stop& visit = from.stops[pos];
            const auto del = deletion_cost(inst, from, pos);
            if (!del) continue;
            const Load reduction = std::min(visit.delivered, excess);
            if (best.valid && reduction < best.reduction) continue;

            // Any unused allowed vehicle whose basic route works; the cost
            // comparison (which includes the new route's fixed cost) picks
            // the cheapest among them.
            for (const int k : inst.customers[visit.customer].allowed_vehicles) {
                if (used_vehicles.count(k)) continue;
                if (inst.vehicles[k].total_capacity() < visit.delivered) continue;
                auto opened = basic_route(inst, k, visit.customer, visit.delivered);
                if (!opened) continue;
                const RouteEval eval = evaluate_route(inst, *opened);
                if (!eval.hard_feasible) continue;
                const Money cost = *del + eval.cost;
                const bool better = !best.valid || reduction > best.reduction ||
                                    (reduction == best.reduction && cost < best.cost);
                if (better) best = {pos, reduction, cost, k, std::move(*opened), true};
            }
        }

        if (!best.valid && options.allow_split_for_capacity &&
            split_count(sol) < inst.split_budget) {
            // Opt-in path: no vehicle fits a whole visit, so carve off as
            // much as the roomiest unused vehicle carries. Spends one unit
            // of the split budget.
            for (const int pos : visit_positions(from)) {
                const Stop& visit = from.stops[pos];
                for (const int k : inst.customers[visit.customer].allowed_vehicles) {
                    if (used_vehicles.count(k)) continue;
                    const Load portion =
                        std::min(inst.vehicles[k].total_capacity(), visit.delivered - 1);
                    if (portion <= 0) continue;
                    auto opened = basic_route(inst, k, visit.customer, portion);
                    if (!opened || !evaluate_route(inst, *opened).hard_feasible) continue;
                    const RouteEval eval = evaluate_route(inst, *opened);
                    const bool better = !best.valid || portion > best.reduction;
                    if (better) best = {pos, portion, eval.cost, k, std::move(*opened), true};
                }
            }
            if (best.valid) {
                sol.routes[source].stops[best.pos].delivered -= best.reduction;
                sol.routes[source].depot_departure.reset();
                sol.routes.push_back(std::move(best.new_route));
                continue;
            }
        }

        if (!best.valid) {
            RecoveryResult failed;
            failed.status = RecoveryStatus::FleetExhausted;
            failed.solution = std::move(sol);
            failed.detail = "no unused allowed vehicle can host customers of route " +
                            std::to_string(source);
            return failed;
        }

        sol.routes[source] = *remove_visit(inst, sol.routes[source], best.pos);
        sol.routes.push_back(std::move(best.new_route));
        std::erase_if(sol.routes, [](const Route& r) { return r.stops.empty(); });
    }

    RecoveryResult done;
    done.solution = std::move(sol);
    return done;
}

Solution finalize_routes_times(const ProblemInstance& inst, Solution sol) {
    for (Route& route : sol.routes) {
        if (route.visit_count() == 0) continue;

        // Feasibility class of every visit under the current schedule.
        const Schedule current = schedule_route(inst, route);
        bool shiftable = true;
        std::vector<double> bound(route.stops.size(),
                                  std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < route.stops.size(); ++i) {
            const Stop& s = route.stops[i];
            if (s.kind != StopKind::Visit) continue;
            const Customer& cust = inst.customers[s.customer];
            const double start = current.stops[i].service_start;
            if (start > static_cast<double>(cust.hard_close)) {
                shiftable = false; // already past the hard window; leave untouched
                break;
            }
            bound[i] = start > static_cast<double>(cust.soft_close)
                           ? static_cast<double>(cust.hard_close)
                           : static_cast<double>(cust.soft_close);
        }
        if (!shiftable) continue;

        // Baseline schedule from day_start; cumulative waiting absorbs any
        // departure delay, so service_start_i(delta) = S0_i + max(0, delta - W_i).
        Route baseline = route;
        baseline.depot_departure.reset();
        const Schedule sched0 = schedule_route(inst, baseline);

        double cumulative_wait = 0.0;
        double max_delta = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < route.stops.size(); ++i) {
            if (route.stops[i].kind != StopKind::Visit) continue;
            cumulative_wait += sched0.stops[i].service_start - sched0.stops[i].arrival;
            max_delta = std::min(max_delta,
                                 bound[i] - sched0.stops[i].service_start + cumulative_wait);
        }
        max_delta = std::min(max_delta, static_cast<double>(inst.day_end) -
                                            sched0.return_time + cumulative_wait);

        const SecondsOfDay current_offset =
            route.depot_departure.value_or(inst.day_start) - inst.day_start;
        SecondsOfDay delta = static_cast<SecondsOfDay>(std::floor(max_delta));
        delta = std::max(delta, current_offset);
        route.depot_departure =
            delta > 0 ? std::optional<SecondsOfDay>(inst.day_start + delta) : std::nullopt;
    }
    return sol;
}

RecoveryResult recover_soft_window_violations(const ProblemInstance& inst, Solution sol) {
    const int budget = inst.soft_violation_budget;
    for (;;) {
        // Locate the delayed visit with the largest lateness.
        std::vector<RouteEval> evals;
        evals.reserve(sol.routes.size());
        int total_soft = 0;
        for (const Route& r : sol.routes) {
            evals.push_back(evaluate_route(inst, r));
            total_soft += evals.back().soft_violations;
        }
        if (total_soft <= budget) {
            RecoveryResult ok;
            ok.solution = std::move(sol);
            return ok;
        }

        std::size_t worst_route = 0;
        int worst_pos = -1;
        double worst_lateness = -1.0;
        for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
            const Route& r = sol.routes[ri];
            for (std::size_t i = 0; i < r.stops.size(); ++i) {
                const Stop& s = r.stops[i];
                if (s.kind != StopKind::Visit) continue;
                const Customer& cust = inst.customers[s.customer];
                const double start = evals[ri].schedule.stops[i].service_start;
                if (start <= static_cast<double>(cust.soft_close) ||
                    start > static_cast<double>(cust.hard_close))
                    continue;
                const double lateness = start - static_cast<double>(cust.soft_close);
                if (lateness > worst_lateness) {
                    worst_lateness = lateness;
                    worst_route = ri;
                    worst_pos = static_cast<int>(i);
                }
            }
        }
        if (worst_pos < 0) {
            RecoveryResult failed;
            failed.status = RecoveryStatus::RecoveryFailed;
            failed.solution = std::move(sol);
            failed.detail = "soft violations above budget but no delayed visit found";
            return failed;
        }

        const Stop visit = sol.routes[worst_route].stops[worst_pos];
        const auto removed = remove_visit(inst, sol.routes[worst_route], worst_pos);

        struct Fix {
            Money cost = 0;
            Solution solution;
            bool valid = false;
        } best;
        auto consider = [&](Money cost, Solution&& candidate) {
            if (best.valid && cost >= best.cost) return;
            best = {cost, std::move(candidate), true};
        };

        if (removed) {
            const Money removed_cost =
                removed->stops.empty() ? 0 : evaluate_route(inst, *removed).cost;
            const Money deletion_delta = removed_cost - evals[worst_route].cost;

            // (a) relocation into another route without any new violation
            for (std::size_t t = 0; t < sol.routes.size(); ++t) {
                if (t == worst_route) continue;
                if (route_visits(sol.routes[t], visit.customer)) continue;
                const auto ins = cheapest_insertion(inst, sol.routes[t], visit.customer,
                                                    visit.delivered, true, kUnbounded);
                if (!ins) continue;
                Solution cand = sol;
                cand.routes[t] = with_visit_inserted(cand.routes[t], visit.customer,
                                                     visit.delivered, ins->position);
                cand.routes[worst_route] = *removed;
                std::erase_if(cand.routes, [](const Route& r) { return r.stops.empty(); });
                consider(deletion_delta + ins->delta, std::move(cand));
            }

            // (c) fresh route with an unused allowed vehicle, delay-free
            std::set<int> used_vehicles;
            for (const Route& r : sol.routes) used_vehicles.insert(r.vehicle);
            for (const int k : inst.customers[visit.customer].allowed_vehicles) {
                if (used_vehicles.count(k)) continue;
                if (inst.vehicles[k].total_capacity() < visit.delivered) continue;
                auto opened = basic_route(inst, k, visit.customer, visit.delivered);
                if (!opened) continue;
                const RouteEval eval = evaluate_route(inst, *opened);
                if (!eval.hard_feasible || eval.soft_violations > 0) continue;
                Solution cand = sol;
                cand.routes[worst_route] = *removed;
                cand.routes.push_back(std::move(*opened));
                std::erase_if(cand.routes, [](const Route& r) { return r.stops.empty(); });
                consider(deletion_delta + eval.cost, std::move(cand));
                break;
            }
        }

        // (b) reposition inside its own route so the route loses a violation
        if (removed) {
            for (int to = 0; to <= static_cast<int>(removed->stops.size()); ++to) {
                Route cand = *removed;
                cand.stops.insert(cand.stops.begin() + to, visit);
                if (cand == sol.routes[worst_route]) continue;
                if (!route_structure_ok(inst, cand)) continue;
                const RouteEval after = evaluate_route(inst, cand);
                if (!time_feasible(inst, cand, after) || after.capacity_excess > 0) continue;
                if (after.soft_violations >= evals[worst_route].soft_violations) continue;
                Solution whole = sol;
                whole.routes[worst_route] = std::move(cand);
                consider(after.cost - evals[worst_route].cost, std::move(whole));
            }
        }

        if (!best.valid) {
            RecoveryResult failed;
            failed.status = RecoveryStatus::RecoveryFailed;
            failed.solution = std::move(sol);
            failed.detail = "no relocation, repositioning or new route resolves customer " +
                            std::to_string(visit.customer);
            return failed;
        }
        sol = std::move(best.solution);
    }
}

RecoveryResult recovery_pipeline(const ProblemInstance& inst, Solution sol,
                                 const RecoveryOptions& options) {
    Solution work = routes_optimization(inst, std::move(sol));

    RecoveryResult capacity = recover_capacity_violations(inst, std::move(work), options);
    if (!capacity.ok()) return capacity;

    work = finalize_routes_times(inst, std::move(capacity.solution));

    RecoveryResult soft = recover_soft_window_violations(inst, std::move(work));
    if (!soft.ok()) return soft;

    if (!validate_solution(inst, soft.solution).empty()) {
        soft.status = RecoveryStatus::RecoveryFailed;
        soft.detail = "recovered solution fails validation";
        return soft;
    }
    return soft;
}

} // namespace sdttrp
