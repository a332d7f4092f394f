#include "sdttrp/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdttrp {

namespace {

Load remaining_demand_of(const GreedyState& state, int customer) {
    for (const UnservedDemand& u : state.unserved)
        if (u.customer == customer) return u.remaining;
    return 0;
}

std::optional<int> choose_vehicle_excluding(const ProblemInstance& inst, const GreedyState& state,
                                            int seed_customer, const std::vector<char>& excluded) {
    const Load demand = remaining_demand_of(state, seed_customer);

    Load max_capacity = 0;
    bool any = false;
    for (int k : inst.customers[seed_customer].allowed_vehicles) {
        if (state.vehicles[k].used || (!excluded.empty() && excluded[k])) continue;
        any = true;
        max_capacity = std::max(max_capacity, inst.vehicles[k].total_capacity());
    }
    if (!any) return std::nullopt;

    const Load threshold = std::min(demand, max_capacity);
    std::optional<int> best;
    for (int k : inst.customers[seed_customer].allowed_vehicles) {
        if (state.vehicles[k].used || (!excluded.empty() && excluded[k])) continue;
        const Vehicle& veh = inst.vehicles[k];
        if (veh.total_capacity() < threshold) continue;
        if (!best) {
            best = k;
            continue;
        }
        const Vehicle& incumbent = inst.vehicles[*best];
        if (veh.fixed_cost != incumbent.fixed_cost) {
            if (veh.fixed_cost < incumbent.fixed_cost) best = k;
        } else if (veh.total_capacity() != incumbent.total_capacity()) {
            if (veh.total_capacity() > incumbent.total_capacity()) best = k;
        } // equal fixed cost and capacity: keep the lower id (iteration order)
    }
    return best;
}

// One insertion candidate; `route` is the whole route after the insertion
// so segment-creating candidates carry their markers along.
struct Candidate {
    Money delta = 0;
    int new_soft = 0;
    Route route;
    int customer = -1;
    Load amount = 0;
    bool valid = false;
};

void consider(Candidate& best, Money delta, int new_soft, Route&& route, int customer,
              Load amount) {
    if (best.valid && delta >= best.delta) return;
    best.valid = true;
    best.delta = delta;
    best.new_soft = new_soft;
    best.route = std::move(route);
    best.customer = customer;
    best.amount = amount;
}

// Evaluates one candidate route against the insertion rules (hard windows,
// capacity, allowance cap) and files it under the violating and/or clear
// best, mirroring the two-way insertion of the construction algorithm.
void classify_candidate(const ProblemInstance& inst, const RouteEval& before, Route&& candidate,
                        int customer, Load amount, int viol_allowance, Candidate& best_viol,
                        Candidate& best_clear) {
    if (!route_structure_ok(inst, candidate)) return;
    const RouteEval after = evaluate_route(inst, candidate);
    if (!after.hard_feasible) return;
    if (after.soft_violations > viol_allowance) return;
    const Money delta = after.cost - before.cost;
    const int new_soft = after.soft_violations - before.soft_violations;
    if (new_soft == 0) {
        Route copy = candidate;
        consider(best_clear, delta, new_soft, std::move(copy), customer, amount);
    }
    consider(best_viol, delta, new_soft, std::move(candidate), customer, amount);
}

// All ways to place `customer` into the route: every raw slot, plus
// segment-creating blocks for truck-only customers on trailer vehicles
// (parked at the nearest transshipment point or at the preceding customer,
// whichever position prices cheapest).
void enumerate_insertions(const ProblemInstance& inst, const Route& route,
                          const RouteEval& before, int customer, Load amount,
                          int viol_allowance, Candidate& best_viol, Candidate& best_clear) {
    const int len = static_cast<int>(route.stops.size());
    for (int pos = 0; pos <= len; ++pos)
        classify_candidate(inst, before, with_visit_inserted(route, customer, amount, pos),
                           customer, amount, viol_allowance, best_viol, best_clear);

    const Customer& cust = inst.customers[customer];
    const Vehicle& vehicle = inst.vehicles[route.vehicle];
    if (!cust.truck_only || !vehicle.has_trailer()) return;

    const auto transshipment = nearest_transshipment(inst, cust.location);
    for (int pos = 0; pos <= len; ++pos) {
        if (transshipment) {
            Route cand = route;
            cand.depot_departure.reset();
            cand.stops.insert(cand.stops.begin() + pos,
                              {Stop::park_at_transshipment(*transshipment),
                               Stop::visit(customer, amount), Stop::attach()});
            classify_candidate(inst, before, std::move(cand), customer, amount, viol_allowance,
                               best_viol, best_clear);
        }
        if (pos > 0 && route.stops[pos - 1].kind == StopKind::Visit &&
            !inst.customers[route.stops[pos - 1].customer].truck_only) {
            Route cand = route;
            cand.depot_departure.reset();
            cand.stops.insert(cand.stops.begin() + pos,
                              {Stop::park_at_customer(route.stops[pos - 1].customer),
                               Stop::visit(customer, amount), Stop::attach()});
            classify_candidate(inst, before, std::move(cand), customer, amount, viol_allowance,
                               best_viol, best_clear);
        }
    }
}

void erase_unserved(GreedyState& state, int customer) {
    std::erase_if(state.unserved, [&](const UnservedDemand& u) { return u.customer == customer; });
}

} // namespace

GreedyState make_greedy_state(const ProblemInstance& inst) {
    GreedyState state;
    state.unserved.reserve(inst.customers.size());
    for (const Customer& c : inst.customers)
        state.unserved.push_back({c.id, c.demand});
    std::sort(state.unserved.begin(), state.unserved.end(),
              [&](const UnservedDemand& a, const UnservedDemand& b) {
                  const double da = euclidean_distance(inst.depot, inst.customers[a.customer].location);
                  const double db = euclidean_distance(inst.depot, inst.customers[b.customer].location);
                  if (da != db) return da > db; // farthest first
                  return a.customer < b.customer;
              });
    state.remaining_soft_budget = inst.soft_violation_budget;
    state.remaining_split_budget = inst.split_budget;
    state.vehicles.resize(inst.vehicles.size());
    for (const Vehicle& v : inst.vehicles)
        state.vehicles[v.id] = {v.total_capacity(), false};
    return state;
}

std::optional<int> choose_vehicle(const ProblemInstance& inst, const GreedyState& state,
                                  int seed_customer) {
    return choose_vehicle_excluding(inst, state, seed_customer, {});
}

int draw_violation_allowance(const ProblemInstance& inst, const GreedyState& state, Rng& rng) {
    const int w = state.remaining_soft_budget;
    if (w <= 0) return 0;
    const std::size_t n = inst.customers.size();
    if (n == 0) return 0;
    const auto estimate = std::max<long long>(
        1, std::llround(static_cast<double>(inst.soft_violation_budget) *
                        static_cast<double>(state.unserved.size()) / static_cast<double>(n)));
    const double ratio = std::min(1.0, static_cast<double>(w) / static_cast<double>(estimate));
    int allowance = 0;
    while (allowance < w && rng.uniform01() < ratio) ++allowance;
    return allowance;
}

bool maybe_allow_split(const ProblemInstance& inst, const GreedyState& state, Rng& rng) {
    const std::size_t n = inst.customers.size();
    const auto estimate =
        n == 0 ? 1
               : std::max<long long>(
                     1, std::llround(static_cast<double>(inst.split_budget) *
                                     static_cast<double>(state.unserved.size()) /
                                     static_cast<double>(n)));
    const double p = std::min(
        1.0, static_cast<double>(state.remaining_split_budget) / static_cast<double>(estimate));
    return rng.uniform01() < p;
}

std::optional<Route> basic_route(const ProblemInstance& inst, int vehicle, int customer,
                                 Load amount) {
    Route route;
    route.vehicle = vehicle;
    const Customer& cust = inst.customers[customer];
    if (cust.truck_only && inst.vehicles[vehicle].has_trailer()) {
        const auto site = nearest_transshipment(inst, cust.location);
        if (!site) return std::nullopt;
        route.stops = {Stop::park_at_transshipment(*site), Stop::visit(customer, amount),
                       Stop::attach()};
    } else {
        route.stops = {Stop::visit(customer, amount)};
    }
    return route;
}

Route insert_loop(const ProblemInstance& inst, GreedyState& state, Route route,
                  int viol_allowance, bool split_enabled, Rng& rng) {
    (void)rng; // selection is deterministic; randomness was spent on the allowances
    const int vehicle = route.vehicle;
    bool split_used = false;

    for (;;) {
        const RouteEval before = evaluate_route(inst, route);
        Candidate best_viol;
        Candidate best_clear;

        if (state.vehicles[vehicle].remaining > 0) {
            for (const UnservedDemand& entry : state.unserved) {
                if (!inst.customer_allows(entry.customer, vehicle)) continue;
                const Load room = state.vehicles[vehicle].remaining;
                Load amount = 0;
                if (entry.remaining <= room) {
                    amount = entry.remaining;
                } else if (split_enabled && !split_used && state.remaining_split_budget > 0) {
                    amount = room; // one partial delivery per route
                } else {
                    continue;
                }
                enumerate_insertions(inst, route, before, entry.customer, amount, viol_allowance,
                                     best_viol, best_clear);
            }
        }

        if (!best_viol.valid && !best_clear.valid) {
            // Route closes: zero the vehicle and charge the route's soft
            // violations to the global budget.
            state.vehicles[vehicle].remaining = 0;
            state.remaining_soft_budget -= before.soft_violations;
            return route;
        }

        // Cheaper of the two candidates wins; ties keep the clear one.
        const Candidate& chosen =
            (best_viol.valid && (!best_clear.valid || best_viol.delta < best_clear.delta))
                ? best_viol
                : best_clear;

        const Load before_remaining = remaining_demand_of(state, chosen.customer);
        route = chosen.route;
        state.vehicles[vehicle].remaining -= chosen.amount;
        if (chosen.amount < before_remaining) {
            split_used = true;
            --state.remaining_split_budget;
            for (UnservedDemand& u : state.unserved)
                if (u.customer == chosen.customer) u.remaining -= chosen.amount;
        } else {
            erase_unserved(state, chosen.customer);
        }
    }
}

GreedyResult build_initial_solution(const ProblemInstance& inst, const GreedyParams& params) {
    GreedyState state = make_greedy_state(inst);
    GreedyResult result;

    std::uint64_t round = 0;
    while (!state.unserved.empty()) {
        Rng rng(derive_stream(params.rng_seed, round++)); // one stream per construction round
        if (params.reset_soft_budget_per_route)
            state.remaining_soft_budget = inst.soft_violation_budget;

        const std::size_t pool =
            std::min<std::size_t>(static_cast<std::size_t>(std::max(1, params.mu)),
                                  state.unserved.size());
        const UnservedDemand seed = state.unserved[rng.below(pool)];

        std::vector<char> excluded(inst.vehicles.size(), 0);
        bool opened = false;
        while (const auto vehicle =
                   choose_vehicle_excluding(inst, state, seed.customer, excluded)) {
            const Load room = inst.vehicles[*vehicle].total_capacity();
            const Load amount = std::min(seed.remaining, room);
            const bool forced_split = amount < seed.remaining;
            if (amount <= 0) break;
            if (forced_split && state.remaining_split_budget <= 0)
                break; // nothing in the fleet fits it whole and splits ran out

            auto opened_route = basic_route(inst, *vehicle, seed.customer, amount);
            if (!opened_route) {
                excluded[*vehicle] = 1;
                continue;
            }
            const RouteEval eval = evaluate_route(inst, *opened_route);
            if (!eval.hard_feasible || eval.soft_violations > state.remaining_soft_budget) {
                excluded[*vehicle] = 1;
                continue;
            }

            state.vehicles[*vehicle].used = true;
            state.vehicles[*vehicle].remaining = room - amount;
            if (forced_split) {
                --state.remaining_split_budget;
                for (UnservedDemand& u : state.unserved)
                    if (u.customer == seed.customer) u.remaining -= amount;
            } else {
                erase_unserved(state, seed.customer);
            }

            const int viol_allowance = draw_violation_allowance(inst, state, rng);
            const bool split_flag = maybe_allow_split(inst, state, rng);
            const bool split_enabled = split_flag && !forced_split;

            result.solution.routes.push_back(
                insert_loop(inst, state, std::move(*opened_route), viol_allowance, split_enabled,
                            rng));
            opened = true;
            break;
        }

        if (!opened) {
            result.unserved.push_back(seed);
            result.fleet_exhausted = true;
            erase_unserved(state, seed.customer);
        }
    }

    return result;
}

} // namespace sdttrp
