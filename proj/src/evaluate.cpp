#include "sdttrp/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace sdttrp {

double travel_time(const Location& a, const Location& b, const Vehicle& vehicle) {
    return euclidean_distance(a, b) / vehicle.speed;
}

Money arc_cost(const Location& a, const Location& b, const Vehicle& vehicle) {
    return std::llround(euclidean_distance(a, b) * vehicle.cost_per_meter);
}

namespace {

// Delivered sum of the parked segment opened at each park stop.
std::vector<Load> segment_sums(const Route& route) {
    std::vector<Load> sums(route.stops.size(), 0);
    std::size_t open_park = route.stops.size();
    for (std::size_t i = 0; i < route.stops.size(); ++i) {
        const Stop& s = route.stops[i];
        if (s.kind == StopKind::ParkTrailer) open_park = i;
        else if (s.kind == StopKind::AttachTrailer) open_park = route.stops.size();
        else if (open_park < route.stops.size()) sums[open_park] += s.delivered;
    }
    return sums;
}

} // namespace

Schedule schedule_route(const ProblemInstance& inst, const Route& route) {
    Schedule sched;
    const double start = static_cast<double>(
        std::max(inst.day_start, route.depot_departure.value_or(inst.day_start)));
    if (route.stops.empty()) {
        sched.return_time = static_cast<double>(inst.day_start);
        return sched;
    }

    const Vehicle& vehicle = inst.vehicles[route.vehicle];
    const std::vector<Location> sites = stop_sites(inst, route);
    const std::vector<Load> seg_sums = segment_sums(route);

    sched.stops.reserve(route.stops.size());
    double depart = start;
    Location prev = inst.depot;
    for (std::size_t i = 0; i < route.stops.size(); ++i) {
        const Stop& s = route.stops[i];
        StopTimes t;
        t.arrival = depart + travel_time(prev, sites[i], vehicle);
        switch (s.kind) {
        case StopKind::Visit: {
            const Customer& cust = inst.customers[s.customer];
            t.service_start = std::max(t.arrival, static_cast<double>(cust.hard_open));
            t.departure = t.service_start + static_cast<double>(cust.service_time_fixed) +
                          static_cast<double>(cust.service_time_per_unit) *
                              static_cast<double>(s.delivered);
            break;
        }
        case StopKind::ParkTrailer:
            t.service_start = t.arrival;
            t.departure = t.arrival + static_cast<double>(inst.trailer_park_time) +
                          static_cast<double>(inst.load_transfer_time_per_unit) *
                              static_cast<double>(seg_sums[i]);
            break;
        case StopKind::AttachTrailer:
            t.service_start = t.arrival;
            t.departure = t.arrival + static_cast<double>(inst.trailer_park_time);
            break;
        }
        sched.stops.push_back(t);
        depart = t.departure;
        prev = sites[i];
    }
    sched.return_time = depart + travel_time(prev, inst.depot, vehicle);
    return sched;
}

RouteEval evaluate_route(const ProblemInstance& inst, const Route& route) {
    RouteEval eval;
    const Vehicle& vehicle = inst.vehicles[route.vehicle];

    eval.cost = vehicle.fixed_cost;
    if (!route.stops.empty()) {
        const std::vector<Location> sites = stop_sites(inst, route);
        Location prev = inst.depot;
        for (const Location& site : sites) {
            eval.cost += arc_cost(prev, site, vehicle);
            prev = site;
        }
        eval.cost += arc_cost(prev, inst.depot, vehicle);
    }

    eval.capacity_excess = std::max<Load>(0, route.delivered_total() - vehicle.total_capacity());

    eval.schedule = schedule_route(inst, route);
    bool windows_ok = true;
    for (std::size_t i = 0; i < route.stops.size(); ++i) {
        const Stop& s = route.stops[i];
        if (s.kind != StopKind::Visit) continue;
        const Customer& cust = inst.customers[s.customer];
        const double service_start = eval.schedule.stops[i].service_start;
        if (service_start > static_cast<double>(cust.hard_close)) windows_ok = false;
        else if (service_start > static_cast<double>(cust.soft_close)) ++eval.soft_violations;
    }
    const bool returns_ok = eval.schedule.return_time <= static_cast<double>(inst.day_end);
    eval.hard_feasible = windows_ok && returns_ok && eval.capacity_excess == 0;
    return eval;
}

Money solution_cost(const ProblemInstance& inst, const Solution& sol) {
    Money total = 0;
    for (const Route& r : sol.routes) total += evaluate_route(inst, r).cost;
    return total;
}

Route with_visit_inserted(const Route& route, int customer, Load amount, int position) {
    Route out = route;
    out.depot_departure.reset();
    out.stops.insert(out.stops.begin() + position, Stop::visit(customer, amount));
    return out;
}

std::optional<InsertionEval> insertion_cost(const ProblemInstance& inst, const Route& route,
                                            int customer, Load amount, int position,
                                            bool may_violate, int viol_allowance) {
    if (amount <= 0) return std::nullopt;
    if (position < 0 || position > static_cast<int>(route.stops.size())) return std::nullopt;

    const Route candidate = with_visit_inserted(route, customer, amount, position);
    if (!route_structure_ok(inst, candidate)) return std::nullopt;

    const RouteEval before = evaluate_route(inst, route);
    const RouteEval after = evaluate_route(inst, candidate);
    if (!after.hard_feasible) return std::nullopt;

    InsertionEval result;
    result.delta_cost = after.cost - before.cost;
    result.new_soft_violations = after.soft_violations - before.soft_violations;
    if (after.soft_violations > viol_allowance) return std::nullopt;
    if (!may_violate && result.new_soft_violations > 0) return std::nullopt;
    return result;
}

std::optional<Money> deletion_cost(const ProblemInstance& inst, const Route& route,
                                   int visit_position) {
    const std::optional<Route> after = remove_visit(inst, route, visit_position);
    if (!after) return std::nullopt;
    const Money before_cost = evaluate_route(inst, route).cost;
    const Money after_cost = after->stops.empty() ? 0 : evaluate_route(inst, *after).cost;
    return after_cost - before_cost;
}

} // namespace sdttrp
