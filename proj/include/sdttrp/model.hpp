#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdttrp {

// Money is kept in integer cents so cost arithmetic and report files are
// exactly reproducible. Loads and instance times are integral as well;
// only derived schedule times are real-valued (travel time = dist/speed).
using Money = std::int64_t;
using Load = std::int64_t;
using SecondsOfDay = std::int64_t;

struct Location {
    double x = 0.0; // meters
    double y = 0.0; // meters
};

inline double euclidean_distance(const Location& a, const Location& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

struct Customer {
    int id = -1;
    Location location;
    Load demand = 0;
    SecondsOfDay service_time_per_unit = 0; // seconds per delivered unit
    SecondsOfDay service_time_fixed = 0;
    SecondsOfDay hard_open = 0;
    SecondsOfDay hard_close = 0;
    SecondsOfDay soft_close = 0; // hard_open <= soft_close <= hard_close
    bool truck_only = false;
    std::vector<int> allowed_vehicles; // K_i, sorted ascending
};

struct Vehicle {
    int id = -1;
    Load truck_capacity = 0;
    Load trailer_capacity = 0; // 0 means no trailer
    Money fixed_cost = 0;
    double cost_per_meter = 0.0; // cents per meter
    double speed = 1.0;          // meters per second

    Load total_capacity() const { return truck_capacity + trailer_capacity; }
    bool has_trailer() const { return trailer_capacity > 0; }
};

struct TransshipmentPoint {
    int id = -1;
    Location location;
};

struct ProblemInstance {
    Location depot;
    std::vector<Customer> customers;
    std::vector<Vehicle> vehicles;
    std::vector<TransshipmentPoint> transshipments;
    SecondsOfDay day_start = 0;
    SecondsOfDay day_end = 0;
    int soft_violation_budget = 0; // v
    int split_budget = 0;
    SecondsOfDay trailer_park_time = 0;
    SecondsOfDay load_transfer_time_per_unit = 0;

    bool customer_allows(int customer, int vehicle) const;
};

enum class StopKind { Visit, ParkTrailer, AttachTrailer };

struct ParkSite {
    enum class Kind { Transshipment, Customer };
    Kind kind = Kind::Transshipment;
    int id = -1;

    friend bool operator==(const ParkSite&, const ParkSite&) = default;
};

struct Stop {
    StopKind kind = StopKind::Visit;
    int customer = -1;   // Visit only
    Load delivered = 0;  // Visit only, > 0
    ParkSite park_site;  // ParkTrailer only

    static Stop visit(int customer, Load delivered) {
        Stop s;
        s.kind = StopKind::Visit;
        s.customer = customer;
        s.delivered = delivered;
        return s;
    }
    static Stop park(ParkSite site) {
        Stop s;
        s.kind = StopKind::ParkTrailer;
        s.park_site = site;
        return s;
    }
    static Stop park_at_transshipment(int id) {
        return park({ParkSite::Kind::Transshipment, id});
    }
    static Stop park_at_customer(int id) {
        return park({ParkSite::Kind::Customer, id});
    }
    static Stop attach() {
        Stop s;
        s.kind = StopKind::AttachTrailer;
        return s;
    }

    friend bool operator==(const Stop&, const Stop&) = default;
};

struct Route {
    int vehicle = -1;
    std::vector<Stop> stops;
    // Depot departure time; unset means day_start. Only set by
    // finalize_routes_times; any stop mutation resets it.
    std::optional<SecondsOfDay> depot_departure;

    Load delivered_total() const {
        Load sum = 0;
        for (const Stop& s : stops)
            if (s.kind == StopKind::Visit) sum += s.delivered;
        return sum;
    }
    int visit_count() const {
        int n = 0;
        for (const Stop& s : stops)
            if (s.kind == StopKind::Visit) ++n;
        return n;
    }

    friend bool operator==(const Route&, const Route&) = default;
};

struct Solution {
    std::vector<Route> routes;

    std::map<int, Load> delivered_totals() const;

    friend bool operator==(const Solution&, const Solution&) = default;
};

// Number of split deliveries: sum over customers of (#routes serving it - 1).
int split_count(const Solution& sol);

// Instance sanity check. Returns one description per broken invariant,
// empty when the instance is well formed.
std::vector<std::string> validate_instance(const ProblemInstance& inst);

// Full independent validation of a complete solution: structural route
// rules, site dependency, truck-only/parking rules, capacities (route and
// parked segment), hard windows, soft/split budgets, demand coverage and
// vehicle uniqueness. Deliberately uses its own time propagation so it can
// serve as an oracle for the evaluate module.
std::vector<std::string> validate_solution(const ProblemInstance& inst, const Solution& sol);

// Structural rules of a single route: marker alternation and matching,
// park anchoring, truck-only placement, site dependency, per-visit
// delivered bounds and parked-segment truck capacity. Route-total capacity
// and time windows are not checked here (they live in evaluate and may be
// relaxed by the tabu corridor).
bool route_structure_ok(const ProblemInstance& inst, const Route& route);
void append_route_structure_violations(const ProblemInstance& inst, const Route& route,
                                       int route_index, std::vector<std::string>& out);

// Physical site of each stop (park/attach markers resolve to the parked
// trailer's location). Requires structurally valid markers.
std::vector<Location> stop_sites(const ProblemInstance& inst, const Route& route);

// Closest transshipment point to a location, lowest id on ties; nullopt
// when the instance has none.
std::optional<int> nearest_transshipment(const ProblemInstance& inst, const Location& loc);

// Removes the visit at stop index `pos`, dropping park/attach pairs whose
// segment became empty. A visit hosting a parked trailer (Park at the
// customer right behind it) is re-anchored to the nearest transshipment
// point; returns nullopt when that is impossible. Resets depot_departure.
std::optional<Route> remove_visit(const ProblemInstance& inst, const Route& route, int pos);

} // namespace sdttrp
