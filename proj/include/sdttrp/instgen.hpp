#pragma once

#include "sdttrp/model.hpp"

#include <cstdint>
#include <utility>

namespace sdttrp {

// Configuration for the seeded synthetic instance generator. Everything not
// configurable here (day span, service times, fleet tiers, the 70% soft
// deadline) is a documented constant in instgen.cpp so benchmark numbers
// stay reproducible.
struct GenConfig {
    int n_customers = 20;
    int n_vehicles = 8;
    int n_transshipments = 2;
    double truck_only_fraction = 0.25;
    double site_dependency_fraction = 0.10; // chance a vehicle is excluded from a customer
    std::pair<SecondsOfDay, SecondsOfDay> window_width_range = {7200, 21600};
    std::pair<Load, Load> demand_range = {5, 30};
    double area_side = 20000.0; // meters
    int soft_violation_budget = 3;
    int split_budget = 2;
    std::uint64_t seed = 0;
};

// Deterministic in (config, seed); the output always passes
// validate_instance. Throws std::invalid_argument on a malformed config.
ProblemInstance generate_instance(const GenConfig& config);

} // namespace sdttrp
