#include "sdttrp/io.hpp"

#include "sdttrp/evaluate.hpp"

#include <fstream>
#include <stdexcept>

namespace sdttrp::io {

using nlohmann::json;

namespace {

void require(bool condition, const std::string& what) {
    if (!condition) throw std::runtime_error("malformed document: " + what);
}

void check_format(const json& j, const char* type) {
    require(j.is_object(), "top level must be an object");
    require(j.value("format", "") == kFormatTag, std::string("format must be ") + kFormatTag);
    require(j.value("type", "") == type, std::string("type must be ") + type);
}

} // namespace

json instance_to_json(const ProblemInstance& inst) {
    json j;
    j["format"] = kFormatTag;
    j["type"] = "instance";
    j["depot"] = {{"x", inst.depot.x}, {"y", inst.depot.y}};
    j["day_start"] = inst.day_start;
    j["day_end"] = inst.day_end;
    j["soft_violation_budget"] = inst.soft_violation_budget;
    j["split_budget"] = inst.split_budget;
    j["trailer_park_time"] = inst.trailer_park_time;
    j["load_transfer_time_per_unit"] = inst.load_transfer_time_per_unit;

    j["customers"] = json::array();
    for (const Customer& c : inst.customers) {
        j["customers"].push_back({{"id", c.id},
                                  {"x", c.location.x},
                                  {"y", c.location.y},
                                  {"demand", c.demand},
                                  {"service_time_fixed", c.service_time_fixed},
                                  {"service_time_per_unit", c.service_time_per_unit},
                                  {"hard_open", c.hard_open},
                                  {"hard_close", c.hard_close},
                                  {"soft_close", c.soft_close},
                                  {"truck_only", c.truck_only},
                                  {"allowed_vehicles", c.allowed_vehicles}});
    }
    j["vehicles"] = json::array();
    for (const Vehicle& v : inst.vehicles) {
        j["vehicles"].push_back({{"id", v.id},
                                 {"truck_capacity", v.truck_capacity},
                                 {"trailer_capacity", v.trailer_capacity},
                                 {"fixed_cost", v.fixed_cost},
                                 {"cost_per_meter", v.cost_per_meter},
                                 {"speed", v.speed}});
    }
    j["transshipments"] = json::array();
    for (const TransshipmentPoint& t : inst.transshipments)
        j["transshipments"].push_back({{"id", t.id}, {"x", t.location.x}, {"y", t.location.y}});
    return j;
}

ProblemInstance instance_from_json(const json& j) {
    check_format(j, "instance");
    ProblemInstance inst;
    try {
        inst.depot = {j.at("depot").at("x").get<double>(), j.at("depot").at("y").get<double>()};
        inst.day_start = j.at("day_start").get<SecondsOfDay>();
        inst.day_end = j.at("day_end").get<SecondsOfDay>();
        inst.soft_violation_budget = j.at("soft_violation_budget").get<int>();
        inst.split_budget = j.at("split_budget").get<int>();
        inst.trailer_park_time = j.at("trailer_park_time").get<SecondsOfDay>();
        inst.load_transfer_time_per_unit = j.at("load_transfer_time_per_unit").get<SecondsOfDay>();

        for (const json& cj : j.at("customers")) {
            Customer c;
            c.id = cj.at("id").get<int>();
            c.location = {cj.at("x").get<double>(), cj.at("y").get<double>()};
            c.demand = cj.at("demand").get<Load>();
            c.service_time_fixed = cj.at("service_time_fixed").get<SecondsOfDay>();
            c.service_time_per_unit = cj.at("service_time_per_unit").get<SecondsOfDay>();
            c.hard_open = cj.at("hard_open").get<SecondsOfDay>();
            c.hard_close = cj.at("hard_close").get<SecondsOfDay>();
            c.soft_close = cj.at("soft_close").get<SecondsOfDay>();
            c.truck_only = cj.at("truck_only").get<bool>();
            c.allowed_vehicles = cj.at("allowed_vehicles").get<std::vector<int>>();
            inst.customers.push_back(std::move(c));
        }
        for (const json& vj : j.at("vehicles")) {
            Vehicle v;
            v.id = vj.at("id").get<int>();
            v.truck_capacity = vj.at("truck_capacity").get<Load>();
            v.trailer_capacity = vj.at("trailer_capacity").get<Load>();
            v.fixed_cost = vj.at("fixed_cost").get<Money>();
            v.cost_per_meter = vj.at("cost_per_meter").get<double>();
            v.speed = vj.at("speed").get<double>();
            inst.vehicles.push_back(v);
        }
        for (const json& tj : j.at("transshipments")) {
            TransshipmentPoint t;
            t.id = tj.at("id").get<int>();
            t.location = {tj.at("x").get<double>(), tj.at("y").get<double>()};
            inst.transshipments.push_back(t);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed instance: ") + e.what());
    }
    return inst;
}

json solution_to_json(const ProblemInstance& inst, const Solution& sol, bool complete,
                      const std::vector<UnservedDemand>& unserved) {
    json j;
    j["format"] = kFormatTag;
    j["type"] = "solution";
    j["complete"] = complete;
    j["cost"] = solution_cost(inst, sol);

    j["unserved"] = json::array();
    for (const UnservedDemand& u : unserved)
        j["unserved"].push_back({{"customer", u.customer}, {"remaining", u.remaining}});

    j["routes"] = json::array();
    for (const Route& route : sol.routes) {
        json rj;
        rj["vehicle"] = route.vehicle;
        if (route.depot_departure) rj["depot_departure"] = *route.depot_departure;
        rj["stops"] = json::array();
        for (const Stop& s : route.stops) {
            switch (s.kind) {
            case StopKind::Visit:
                rj["stops"].push_back(
                    {{"kind", "visit"}, {"customer", s.customer}, {"delivered", s.delivered}});
                break;
            case StopKind::ParkTrailer:
                rj["stops"].push_back(
                    {{"kind", "park"},
                     {"site_kind",
                      s.park_site.kind == ParkSite::Kind::Customer ? "customer" : "transshipment"},
                     {"site_id", s.park_site.id}});
                break;
            case StopKind::AttachTrailer:
                rj["stops"].push_back({{"kind", "attach"}});
                break;
            }
        }
        const Schedule sched = schedule_route(inst, route);
        json sj;
        sj["return_time"] = sched.return_time;
        sj["stops"] = json::array();
        for (const StopTimes& t : sched.stops)
            sj["stops"].push_back({{"arrival", t.arrival},
                                   {"service_start", t.service_start},
                                   {"departure", t.departure}});
        rj["schedule"] = std::move(sj);
        j["routes"].push_back(std::move(rj));
    }
    return j;
}

LoadedSolution solution_from_json(const json& j) {
    check_format(j, "solution");
    LoadedSolution loaded;
    try {
        loaded.complete = j.at("complete").get<bool>();
        if (j.contains("unserved"))
            for (const json& uj : j.at("unserved"))
                loaded.unserved.push_back(
                    {uj.at("customer").get<int>(), uj.at("remaining").get<Load>()});

        for (const json& rj : j.at("routes")) {
            Route route;
            route.vehicle = rj.at("vehicle").get<int>();
            if (rj.contains("depot_departure"))
                route.depot_departure = rj.at("depot_departure").get<SecondsOfDay>();
            for (const json& sj : rj.at("stops")) {
                const std::string kind = sj.at("kind").get<std::string>();
                if (kind == "visit") {
                    route.stops.push_back(Stop::visit(sj.at("customer").get<int>(),
                                                      sj.at("delivered").get<Load>()));
                } else if (kind == "park") {
                    const std::string site_kind = sj.at("site_kind").get<std::string>();
                    require(site_kind == "customer" || site_kind == "transshipment",
                            "park site_kind must be customer or transshipment");
                    ParkSite site{site_kind == "customer" ? ParkSite::Kind::Customer
                                                          : ParkSite::Kind::Transshipment,
                                  sj.at("site_id").get<int>()};
                    route.stops.push_back(Stop::park(site));
                } else if (kind == "attach") {
                    route.stops.push_back(Stop::attach());
                } else {
                    require(false, "unknown stop kind " + kind);
                }
            }
            loaded.solution.routes.push_back(std::move(route));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed solution: ") + e.what());
    }
    return loaded;
}

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

} // namespace

ProblemInstance load_instance(const std::string& path) {
    return instance_from_json(load_json_file(path));
}

LoadedSolution load_solution(const std::string& path) {
    return solution_from_json(load_json_file(path));
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace sdttrp::io
