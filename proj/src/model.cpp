#include "sdttrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace sdttrp {

bool ProblemInstance::customer_allows(int customer, int vehicle) const {
    const auto& allowed = customers[customer].allowed_vehicles;
    return std::binary_search(allowed.begin(), allowed.end(), vehicle);
}

std::map<int, Load> Solution::delivered_totals() const {
    std::map<int, Load> totals;
    for (const Route& r : routes)
        for (const Stop& s : r.stops)
            if (s.kind == StopKind::Visit) totals[s.customer] += s.delivered;
    return totals;
}

int split_count(const Solution& sol) {
    std::map<int, std::set<std::size_t>> routes_of;
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri)
        for (const Stop& s : sol.routes[ri].stops)
            if (s.kind == StopKind::Visit) routes_of[s.customer].insert(ri);
    int splits = 0;
    for (const auto& [customer, routes] : routes_of)
        splits += static_cast<int>(routes.size()) - 1;
    return splits;
}

namespace {

bool finite_location(const Location& loc) {
    return std::isfinite(loc.x) && std::isfinite(loc.y);
}

std::string fmt(const char* what, int id, const std::string& detail) {
    std::ostringstream os;
    os << what << " " << id << ": " << detail;
    return os.str();
}

// Walks the structural rules of one route. Returns true when clean. With
// out == nullptr, stops at the first violation; otherwise appends one
// description per violation and keeps going.
bool scan_route_structure(const ProblemInstance& inst, const Route& route, int route_index,
                          std::vector<std::string>* out) {
    bool clean = true;
    auto report = [&](const std::string& msg) {
        clean = false;
        if (out) out->push_back(fmt("route", route_index, msg));
    };

    const int n_customers = static_cast<int>(inst.customers.size());
    const int n_vehicles = static_cast<int>(inst.vehicles.size());
    const int n_transshipments = static_cast<int>(inst.transshipments.size());

    if (route.vehicle < 0 || route.vehicle >= n_vehicles) {
        report("unknown vehicle id " + std::to_string(route.vehicle));
        return false; // nothing else is checkable
    }
    const Vehicle& vehicle = inst.vehicles[route.vehicle];

    bool in_segment = false;
    Load segment_sum = 0;
    Load route_sum = 0;

    for (std::size_t i = 0; i < route.stops.size(); ++i) {
        const Stop& stop = route.stops[i];
        switch (stop.kind) {
        case StopKind::Visit: {
            if (stop.customer < 0 || stop.customer >= n_customers) {
                report("visit references unknown customer id " + std::to_string(stop.customer));
                if (!out) return false;
                break;
            }
            const Customer& cust = inst.customers[stop.customer];
            if (stop.delivered <= 0) {
                report(fmt("customer", stop.customer, "delivered amount must be positive"));
                if (!out) return false;
            }
            if (stop.delivered > cust.demand) {
                report(fmt("customer", stop.customer, "delivered amount exceeds demand"));
                if (!out) return false;
            }
            if (!inst.customer_allows(stop.customer, route.vehicle)) {
                report(fmt("customer", stop.customer,
                           "not servable by vehicle " + std::to_string(route.vehicle) +
                               " (site dependency)"));
                if (!out) return false;
            }
            if (cust.truck_only && vehicle.has_trailer() && !in_segment) {
                report(fmt("customer", stop.customer,
                           "truck-only customer visited with trailer attached"));
                if (!out) return false;
            }
            route_sum += stop.delivered;
            if (in_segment) segment_sum += stop.delivered;
            break;
        }
        case StopKind::ParkTrailer: {
            if (!vehicle.has_trailer()) {
                report("park marker in route of trailer-less vehicle");
                if (!out) return false;
            }
            if (in_segment) {
                report("nested park marker (markers must alternate)");
                return clean; // structure is broken beyond repair
            }
            if (stop.park_site.kind == ParkSite::Kind::Customer) {
                const int c = stop.park_site.id;
                if (c < 0 || c >= n_customers) {
                    report("park site references unknown customer id " + std::to_string(c));
                    if (!out) return false;
                } else {
                    const bool follows_visit = i > 0 &&
                                               route.stops[i - 1].kind == StopKind::Visit &&
                                               route.stops[i - 1].customer == c;
                    if (!follows_visit) {
                        report(fmt("customer", c,
                                   "park at customer must immediately follow a visit to it"));
                        if (!out) return false;
                    }
                    if (inst.customers[c].truck_only) {
                        report(fmt("customer", c, "trailer parked at a truck-only customer"));
                        if (!out) return false;
                    }
                }
            } else {
                if (stop.park_site.id < 0 || stop.park_site.id >= n_transshipments) {
                    report("park site references unknown transshipment id " +
                           std::to_string(stop.park_site.id));
                    if (!out) return false;
                }
            }
            in_segment = true;
            segment_sum = 0;
            break;
        }
        case StopKind::AttachTrailer: {
            if (!in_segment) {
                report("attach marker without a preceding park marker");
                return clean;
            }
            if (segment_sum > vehicle.truck_capacity) {
                report("parked segment load " + std::to_string(segment_sum) +
                       " exceeds truck capacity " + std::to_string(vehicle.truck_capacity));
                if (!out) return false;
            }
            in_segment = false;
            break;
        }
        }
        if (!clean && !out) return false;
    }

    if (in_segment) {
        report("park marker without a matching attach marker");
        if (!out) return false;
    }
    (void)route_sum;
    return clean;
}

struct SitesResult {
    std::vector<Location> sites;
    bool ok = true;
};

SitesResult resolve_stop_sites(const ProblemInstance& inst, const Route& route) {
    SitesResult res;
    res.sites.reserve(route.stops.size());
    Location open_park = inst.depot;
    bool in_segment = false;
    for (const Stop& stop : route.stops) {
        switch (stop.kind) {
        case StopKind::Visit:
            if (stop.customer < 0 || stop.customer >= static_cast<int>(inst.customers.size())) {
                res.ok = false;
                res.sites.push_back(inst.depot);
            } else {
                res.sites.push_back(inst.customers[stop.customer].location);
            }
            break;
        case StopKind::ParkTrailer: {
            Location site = inst.depot;
            if (stop.park_site.kind == ParkSite::Kind::Customer) {
                if (stop.park_site.id >= 0 &&
                    stop.park_site.id < static_cast<int>(inst.customers.size()))
                    site = inst.customers[stop.park_site.id].location;
                else
                    res.ok = false;
            } else {
                if (stop.park_site.id >= 0 &&
                    stop.park_site.id < static_cast<int>(inst.transshipments.size()))
                    site = inst.transshipments[stop.park_site.id].location;
                else
                    res.ok = false;
            }
            open_park = site;
            in_segment = true;
            res.sites.push_back(site);
            break;
        }
        case StopKind::AttachTrailer:
            if (!in_segment) res.ok = false;
            in_segment = false;
            res.sites.push_back(open_park);
            break;
        }
    }
    return res;
}

} // namespace

bool route_structure_ok(const ProblemInstance& inst, const Route& route) {
    return scan_route_structure(inst, route, 0, nullptr);
}

void append_route_structure_violations(const ProblemInstance& inst, const Route& route,
                                       int route_index, std::vector<std::string>& out) {
    scan_route_structure(inst, route, route_index, &out);
}

std::vector<Location> stop_sites(const ProblemInstance& inst, const Route& route) {
    return resolve_stop_sites(inst, route).sites;
}

std::optional<int> nearest_transshipment(const ProblemInstance& inst, const Location& loc) {
    std::optional<int> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const TransshipmentPoint& t : inst.transshipments) {
        const double d = euclidean_distance(loc, t.location);
        if (d < best_dist) {
            best_dist = d;
            best = t.id;
        }
    }
    return best;
}

std::vector<std::string> validate_instance(const ProblemInstance& inst) {
    std::vector<std::string> v;

    if (!finite_location(inst.depot)) v.push_back("depot: coordinates must be finite");
    if (inst.day_start >= inst.day_end) v.push_back("day_start must be before day_end");
    if (inst.soft_violation_budget < 0) v.push_back("soft_violation_budget must be >= 0");
    if (inst.split_budget < 0) v.push_back("split_budget must be >= 0");
    if (inst.trailer_park_time < 0) v.push_back("trailer_park_time must be >= 0");
    if (inst.load_transfer_time_per_unit < 0)
        v.push_back("load_transfer_time_per_unit must be >= 0");

    const int n_vehicles = static_cast<int>(inst.vehicles.size());
    for (std::size_t i = 0; i < inst.vehicles.size(); ++i) {
        const Vehicle& veh = inst.vehicles[i];
        if (veh.id != static_cast<int>(i))
            v.push_back(fmt("vehicle", veh.id, "ids must be dense 0..m-1 in order"));
        if (veh.truck_capacity <= 0) v.push_back(fmt("vehicle", veh.id, "truck_capacity must be > 0"));
        if (veh.trailer_capacity < 0)
            v.push_back(fmt("vehicle", veh.id, "trailer_capacity must be >= 0"));
        if (veh.speed <= 0.0 || !std::isfinite(veh.speed))
            v.push_back(fmt("vehicle", veh.id, "speed must be finite and > 0"));
        if (!(veh.cost_per_meter >= 0.0) || !std::isfinite(veh.cost_per_meter))
            v.push_back(fmt("vehicle", veh.id, "cost_per_meter must be finite and >= 0"));
        if (veh.fixed_cost < 0) v.push_back(fmt("vehicle", veh.id, "fixed_cost must be >= 0"));
    }

    for (std::size_t i = 0; i < inst.customers.size(); ++i) {
        const Customer& c = inst.customers[i];
        if (c.id != static_cast<int>(i))
            v.push_back(fmt("customer", c.id, "ids must be dense 0..n-1 in order"));
        if (!finite_location(c.location))
            v.push_back(fmt("customer", c.id, "coordinates must be finite"));
        if (c.demand <= 0) v.push_back(fmt("customer", c.id, "demand must be > 0"));
        if (c.service_time_per_unit < 0 || c.service_time_fixed < 0)
            v.push_back(fmt("customer", c.id, "service times must be >= 0"));
        if (!(c.hard_open <= c.soft_close && c.soft_close <= c.hard_close))
            v.push_back(fmt("customer", c.id,
                            "window ordering requires hard_open <= soft_close <= hard_close"));
        if (c.hard_open > inst.day_end || c.hard_close < inst.day_start)
            v.push_back(fmt("customer", c.id, "hard window does not intersect the day"));
        if (c.allowed_vehicles.empty())
            v.push_back(fmt("customer", c.id, "allowed_vehicles (K_i) must be nonempty"));
        if (!std::is_sorted(c.allowed_vehicles.begin(), c.allowed_vehicles.end()))
            v.push_back(fmt("customer", c.id, "allowed_vehicles must be sorted ascending"));
        for (int k : c.allowed_vehicles)
            if (k < 0 || k >= n_vehicles)
                v.push_back(fmt("customer", c.id,
                                "allowed_vehicles references unknown vehicle " + std::to_string(k)));
    }

    for (std::size_t i = 0; i < inst.transshipments.size(); ++i) {
        const TransshipmentPoint& t = inst.transshipments[i];
        if (t.id != static_cast<int>(i))
            v.push_back(fmt("transshipment", t.id, "ids must be dense 0..t-1 in order"));
        if (!finite_location(t.location))
            v.push_back(fmt("transshipment", t.id, "coordinates must be finite"));
    }

    return v;
}

std::vector<std::string> validate_solution(const ProblemInstance& inst, const Solution& sol) {
    std::vector<std::string> v;

    std::set<int> used_vehicles;
    int total_soft = 0;

    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
        const Route& route = sol.routes[ri];
        const std::size_t before = v.size();
        append_route_structure_violations(inst, route, static_cast<int>(ri), v);

        if (route.vehicle >= 0 && route.vehicle < static_cast<int>(inst.vehicles.size())) {
            if (!used_vehicles.insert(route.vehicle).second)
                v.push_back(fmt("route", static_cast<int>(ri),
                                "vehicle " + std::to_string(route.vehicle) +
                                    " appears in more than one route"));
            const Vehicle& veh = inst.vehicles[route.vehicle];
            if (route.delivered_total() > veh.total_capacity())
                v.push_back(fmt("route", static_cast<int>(ri),
                                "delivered total " + std::to_string(route.delivered_total()) +
                                    " exceeds vehicle capacity " +
                                    std::to_string(veh.total_capacity())));
        }

        // Time propagation, independent of evaluate::schedule_route.
        if (v.size() != before) continue; // structure broken; times not meaningful
        const Vehicle& veh = inst.vehicles[route.vehicle];
        const SitesResult sites = resolve_stop_sites(inst, route);
        if (!sites.ok) continue;

        // Delivered sum per parked segment, keyed by park stop index.
        std::vector<Load> segment_sum(route.stops.size(), 0);
        {
            std::size_t open_park = route.stops.size();
            for (std::size_t i = 0; i < route.stops.size(); ++i) {
                const Stop& s = route.stops[i];
                if (s.kind == StopKind::ParkTrailer) open_park = i;
                else if (s.kind == StopKind::AttachTrailer) open_park = route.stops.size();
                else if (open_park < route.stops.size()) segment_sum[open_park] += s.delivered;
            }
        }

        double depart = static_cast<double>(
            std::max(inst.day_start, route.depot_departure.value_or(inst.day_start)));
        Location prev = inst.depot;
        if (route.stops.empty()) continue;
        for (std::size_t i = 0; i < route.stops.size(); ++i) {
            const Stop& s = route.stops[i];
            const Location site = sites.sites[i];
            const double arrival = depart + euclidean_distance(prev, site) / veh.speed;
            if (s.kind == StopKind::Visit) {
                const Customer& cust = inst.customers[s.customer];
                const double service_start = std::max(arrival, static_cast<double>(cust.hard_open));
                if (service_start > static_cast<double>(cust.hard_close))
                    v.push_back(fmt("route", static_cast<int>(ri),
                                    "customer " + std::to_string(s.customer) +
                                        " served after hard_close"));
                if (service_start > static_cast<double>(cust.soft_close) &&
                    service_start <= static_cast<double>(cust.hard_close))
                    ++total_soft;
                depart = service_start + static_cast<double>(cust.service_time_fixed) +
                         static_cast<double>(cust.service_time_per_unit) *
                             static_cast<double>(s.delivered);
            } else if (s.kind == StopKind::ParkTrailer) {
                depart = arrival + static_cast<double>(inst.trailer_park_time) +
                         static_cast<double>(inst.load_transfer_time_per_unit) *
                             static_cast<double>(segment_sum[i]);
            } else {
                depart = arrival + static_cast<double>(inst.trailer_park_time);
            }
            prev = site;
        }
        const double return_time = depart + euclidean_distance(prev, inst.depot) / veh.speed;
        if (return_time > static_cast<double>(inst.day_end))
            v.push_back(fmt("route", static_cast<int>(ri), "returns to depot after day_end"));
    }

    // Demand coverage.
    const auto totals = sol.delivered_totals();
    for (const Customer& c : inst.customers) {
        const auto it = totals.find(c.id);
        const Load got = it == totals.end() ? 0 : it->second;
        if (got != c.demand)
            v.push_back(fmt("customer", c.id,
                            "delivered total " + std::to_string(got) + " does not match demand " +
                                std::to_string(c.demand)));
    }
    for (const auto& [customer, amount] : totals)
        if (customer < 0 || customer >= static_cast<int>(inst.customers.size()))
            v.push_back(fmt("customer", customer, "delivery to unknown customer id"));

    if (total_soft > inst.soft_violation_budget)
        v.push_back("solution has " + std::to_string(total_soft) +
                    " soft window violations, budget is " +
                    std::to_string(inst.soft_violation_budget));
    const int splits = split_count(sol);
    if (splits > inst.split_budget)
        v.push_back("solution has " + std::to_string(splits) + " split deliveries, budget is " +
                    std::to_string(inst.split_budget));

    return v;
}

std::optional<Route> remove_visit(const ProblemInstance& inst, const Route& route, int pos) {
    if (pos < 0 || pos >= static_cast<int>(route.stops.size())) return std::nullopt;
    if (route.stops[pos].kind != StopKind::Visit) return std::nullopt;

    Route out = route;
    out.depot_departure.reset();
    const Stop removed = out.stops[pos];
    const bool anchors_park = pos + 1 < static_cast<int>(out.stops.size()) &&
                              out.stops[pos + 1].kind == StopKind::ParkTrailer &&
                              out.stops[pos + 1].park_site ==
                                  ParkSite{ParkSite::Kind::Customer, removed.customer};
    out.stops.erase(out.stops.begin() + pos);

    if (anchors_park) {
        // The park marker slid into the removed visit's slot. If its segment
        // still holds visits it lost its host customer and must be
        // re-anchored to the nearest transshipment point; if the segment is
        // empty the cleanup below drops the pair.
        std::size_t j = pos + 1;
        bool has_visit = false;
        while (j < out.stops.size() && out.stops[j].kind != StopKind::AttachTrailer) {
            has_visit = has_visit || out.stops[j].kind == StopKind::Visit;
            ++j;
        }
        if (has_visit) {
            const auto best =
                nearest_transshipment(inst, inst.customers[removed.customer].location);
            if (!best) return std::nullopt;
            out.stops[pos].park_site = {ParkSite::Kind::Transshipment, *best};
        }
    }

    // Drop park/attach pairs whose segment holds no visit anymore.
    for (std::size_t i = 0; i < out.stops.size();) {
        if (out.stops[i].kind == StopKind::ParkTrailer) {
            std::size_t j = i + 1;
            bool has_visit = false;
            while (j < out.stops.size() && out.stops[j].kind != StopKind::AttachTrailer) {
                has_visit = has_visit || out.stops[j].kind == StopKind::Visit;
                ++j;
            }
            if (j < out.stops.size() && !has_visit) {
                out.stops.erase(out.stops.begin() + i, out.stops.begin() + j + 1);
                continue;
            }
        }
        ++i;
    }

    return out;
}

} // namespace sdttrp
