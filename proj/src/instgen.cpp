#include "sdttrp/instgen.hpp"

#include "sdttrp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sdttrp {

namespace {

// Fixed generator constants. Changing any of these changes every generated
// instance, so they are deliberately named and kept in one place.
constexpr SecondsOfDay kDayStart = 21600; // 06:00
constexpr SecondsOfDay kDayEnd = 79200;   // 22:00
constexpr SecondsOfDay kTrailerParkTime = 300;
constexpr SecondsOfDay kLoadTransferPerUnit = 10;
constexpr SecondsOfDay kServiceFixedMin = 120;
constexpr SecondsOfDay kServiceFixedMax = 600;
constexpr SecondsOfDay kServicePerUnitMin = 5;
constexpr SecondsOfDay kServicePerUnitMax = 30;
constexpr double kSoftDeadlineShare = 0.7;  // soft_close at 70% of the hard width
constexpr SecondsOfDay kWindowTailGuard = 3600; // keep windows servable before day end

// Three-tier fleet mix cycled over vehicle ids.
struct FleetTier {
    Load truck_capacity;
    Load trailer_capacity;
    Money fixed_cost;
    double cost_per_meter;
    double speed;
};
constexpr FleetTier kFleetTiers[] = {
    {60, 0, 20000, 0.08, 12.5},   // small trailer-less truck
    {100, 0, 30000, 0.10, 11.0},  // medium trailer-less truck
    {120, 80, 45000, 0.13, 10.0}, // large truck with trailer
};

} // namespace

ProblemInstance generate_instance(const GenConfig& config) {
    if (config.n_customers < 0 || config.n_vehicles < 0 || config.n_transshipments < 0)
        throw std::invalid_argument("generator counts must be >= 0");
    if (config.truck_only_fraction < 0.0 || config.truck_only_fraction > 1.0 ||
        config.site_dependency_fraction < 0.0 || config.site_dependency_fraction > 1.0)
        throw std::invalid_argument("generator fractions must be within [0,1]");
    if (config.window_width_range.first > config.window_width_range.second ||
        config.window_width_range.first < 0)
        throw std::invalid_argument("window width range is empty or negative");
    if (config.demand_range.first > config.demand_range.second || config.demand_range.first <= 0)
        throw std::invalid_argument("demand range is empty or non-positive");
    if (!(config.area_side > 0.0))
        throw std::invalid_argument("area side must be positive");
    if (config.soft_violation_budget < 0 || config.split_budget < 0)
        throw std::invalid_argument("budgets must be >= 0");

    Rng rng(config.seed);
    ProblemInstance inst;

    const auto side = static_cast<std::int64_t>(config.area_side);
    inst.depot = {static_cast<double>(side) / 2.0, static_cast<double>(side) / 2.0};
    inst.day_start = kDayStart;
    inst.day_end = kDayEnd;
    inst.soft_violation_budget = config.soft_violation_budget;
    inst.split_budget = config.split_budget;
    inst.trailer_park_time = kTrailerParkTime;
    inst.load_transfer_time_per_unit = kLoadTransferPerUnit;

    inst.vehicles.reserve(config.n_vehicles);
    for (int k = 0; k < config.n_vehicles; ++k) {
        const FleetTier& tier = kFleetTiers[k % 3];
        Vehicle v;
        v.id = k;
        v.truck_capacity = tier.truck_capacity;
        v.trailer_capacity = tier.trailer_capacity;
        v.fixed_cost = tier.fixed_cost;
        v.cost_per_meter = tier.cost_per_meter;
        v.speed = tier.speed;
        inst.vehicles.push_back(v);
    }

    inst.transshipments.reserve(config.n_transshipments);
    for (int t = 0; t < config.n_transshipments; ++t) {
        TransshipmentPoint point;
        point.id = t;
        point.location = {static_cast<double>(rng.uniform_int(0, side)),
                          static_cast<double>(rng.uniform_int(0, side))};
        inst.transshipments.push_back(point);
    }

    inst.customers.reserve(config.n_customers);
    for (int i = 0; i < config.n_customers; ++i) {
        Customer c;
        c.id = i;
        c.location = {static_cast<double>(rng.uniform_int(0, side)),
                      static_cast<double>(rng.uniform_int(0, side))};
        c.demand = rng.uniform_int(config.demand_range.first, config.demand_range.second);

        const SecondsOfDay width = rng.uniform_int(config.window_width_range.first,
                                                   config.window_width_range.second);
        const SecondsOfDay latest_open =
            std::max(kDayStart, kDayEnd - width - kWindowTailGuard);
        c.hard_open = rng.uniform_int(kDayStart, latest_open);
        c.hard_close = c.hard_open + width;
        c.soft_close =
            c.hard_open + static_cast<SecondsOfDay>(std::llround(kSoftDeadlineShare *
                                                                 static_cast<double>(width)));

        c.truck_only = rng.uniform01() < config.truck_only_fraction;
        c.service_time_fixed = rng.uniform_int(kServiceFixedMin, kServiceFixedMax);
        c.service_time_per_unit = rng.uniform_int(kServicePerUnitMin, kServicePerUnitMax);

        for (int k = 0; k < config.n_vehicles; ++k) {
            const bool excluded = rng.uniform01() < config.site_dependency_fraction;
            if (!excluded) c.allowed_vehicles.push_back(k);
        }
        if (c.allowed_vehicles.empty() && config.n_vehicles > 0)
            c.allowed_vehicles.push_back(
                static_cast<int>(rng.below(static_cast<std::uint64_t>(config.n_vehicles))));

        inst.customers.push_back(std::move(c));
    }

    return inst;
}

} // namespace sdttrp
