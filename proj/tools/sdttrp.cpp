#include "sdttrp/driver.hpp"
#include "sdttrp/evaluate.hpp"
#include "sdttrp/instgen.hpp"
#include "sdttrp/io.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

// Exit codes: 0 ok, 1 validation failure, 2 usage, 3 infeasible / fleet
// exhausted, 4 internal error.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

struct GenerateOptions {
    sdttrp::GenConfig config;
    int vehicles = -1; // -1: derived from customer count
    std::string out = "instance.json";
};

struct SolveOptions {
    std::string instance_path;
    std::string out = "solution.json";
    sdttrp::SolveParams params;
    double time_limit = 0.0; // seconds; 0 disables
    int soft_override = -1;
    int split_override = -1;
};

struct ValidateOptions {
    std::string instance_path;
    std::string solution_path;
};

struct BenchOptions {
    std::vector<std::string> instance_paths;
    int gen_count = 0;
    sdttrp::GenConfig gen_config;
    int gen_vehicles = -1;
    std::uint64_t gen_seed = 1;
    SolveOptions solve; // shared heuristic knobs; instance/out unused
    std::string csv_path;
    int jobs = 1;
};

int default_vehicle_count(int n_customers) { return n_customers / 3 + 2; }

void add_solver_flags(CLI::App* cmd, SolveOptions& opt) {
    cmd->add_option("--seed", opt.params.seed, "Base RNG seed")->capture_default_str();
    cmd->add_option("--mu", opt.params.mu, "Seed pool: number of farthest customers")
        ->capture_default_str();
    cmd->add_flag("--greedy-only", opt.params.greedy_only, "Skip the improvement heuristic");
    cmd->add_option("--steps", opt.params.tabu.step_limit, "Improvement step cap")
        ->capture_default_str();
    cmd->add_option("--stall", opt.params.tabu.stall_limit,
                    "Stop after this many steps without a new best")
        ->capture_default_str();
    cmd->add_option("--time-limit", opt.time_limit,
                    "Wall-clock limit in seconds (checked between steps; 0 disables)");
    cmd->add_option("--closeness", opt.params.tabu.closeness,
                    "Max travel seconds to a neighbor at an insertion place")
        ->capture_default_str();
    cmd->add_option("--cost-increase", opt.params.tabu.initial_corridor.max_cost_increase,
                    "Initial per-move cost-increase allowance in cents")
        ->capture_default_str();
    cmd->add_option("--excess-delays", opt.params.tabu.initial_corridor.max_excess_delays,
                    "Initial soft violations allowed beyond the budget")
        ->capture_default_str();
    cmd->add_option("--overcap-routes", opt.params.tabu.initial_corridor.max_overcap_routes,
                    "Initial number of over-capacity routes allowed")
        ->capture_default_str();
    cmd->add_option("--feasibility-period", opt.params.tabu.feasibility_period,
                    "Applied moves between recovery attempts")
        ->capture_default_str();
    cmd->add_option("--growth", opt.params.tabu.corridor_growth, "Corridor widening factor")
        ->capture_default_str();
    cmd->add_option("--shrink", opt.params.tabu.corridor_shrink, "Corridor narrowing factor")
        ->capture_default_str();
    cmd->add_option("--widen-after", opt.params.tabu.widen_after_failures,
                    "Consecutive failures before widening")
        ->capture_default_str();
    cmd->add_option("--narrow-after", opt.params.tabu.narrow_after_successes,
                    "Consecutive successes before narrowing")
        ->capture_default_str();
    cmd->add_option("--tenure", opt.params.tabu.reversal_tenure,
                    "Steps before a customer may return to the route it left")
        ->capture_default_str();
    cmd->add_option("--v-override", opt.soft_override,
                    "Override the instance soft-violation budget (-1 keeps it)");
    cmd->add_option("--split-override", opt.split_override,
                    "Override the instance split budget (-1 keeps it)");
    cmd->add_flag("--reset-budget-per-route", opt.params.reset_soft_budget_per_route,
                  "Reset the soft-violation budget at every constructed route");
    cmd->add_flag("--adopt-recovered,!--no-adopt-recovered", opt.params.tabu.adopt_recovered,
                  "Recovered solutions replace the working solution (default) or only "
                  "compete for the incumbent");
}

sdttrp::SolveParams finalize_solve_params(const SolveOptions& opt) {
    sdttrp::SolveParams params = opt.params;
    if (opt.time_limit > 0.0) params.time_limit_seconds = opt.time_limit;
    if (opt.soft_override >= 0) params.soft_budget_override = opt.soft_override;
    if (opt.split_override >= 0) params.split_budget_override = opt.split_override;
    return params;
}

int run_generate(const GenerateOptions& opt) {
    sdttrp::GenConfig config = opt.config;
    config.n_vehicles =
        opt.vehicles >= 0 ? opt.vehicles : default_vehicle_count(config.n_customers);
    const sdttrp::ProblemInstance inst = sdttrp::generate_instance(config);
    sdttrp::io::save_json(opt.out, sdttrp::io::instance_to_json(inst));
    return kExitOk;
}

int run_solve(const SolveOptions& opt, bool quiet) {
    const sdttrp::ProblemInstance inst = sdttrp::io::load_instance(opt.instance_path);
    const auto instance_errors = sdttrp::validate_instance(inst);
    if (!instance_errors.empty()) {
        for (const auto& e : instance_errors) std::cerr << "instance: " << e << "\n";
        return kExitValidation;
    }

    const sdttrp::SolveOutcome outcome =
        sdttrp::solve_instance(inst, finalize_solve_params(opt), opt.instance_path);

    sdttrp::io::save_json(opt.out, sdttrp::io::solution_to_json(inst, outcome.solution,
                                                                outcome.complete,
                                                                outcome.unserved));
    if (!quiet) std::cout << sdttrp::report_to_json(outcome.report).dump() << "\n";
    return outcome.complete ? kExitOk : kExitInfeasible;
}

int run_validate(const ValidateOptions& opt, bool quiet) {
    const sdttrp::ProblemInstance inst = sdttrp::io::load_instance(opt.instance_path);
    const auto instance_errors = sdttrp::validate_instance(inst);
    if (!instance_errors.empty()) {
        for (const auto& e : instance_errors) std::cerr << "instance: " << e << "\n";
        return kExitValidation;
    }
    const sdttrp::io::LoadedSolution loaded = sdttrp::io::load_solution(opt.solution_path);
    const auto violations = sdttrp::validate_solution(inst, loaded.solution);
    for (const auto& v : violations) std::cout << v << "\n";
    if (violations.empty() && !quiet) std::cout << "valid\n";
    return violations.empty() ? kExitOk : kExitValidation;
}

std::string format_improvement(double improvement) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", improvement);
    return buf;
}

int run_bench(const BenchOptions& opt, bool quiet) {
    struct Job {
        std::string id;
        std::optional<sdttrp::ProblemInstance> instance;
        std::string path;
    };
    std::vector<Job> jobs;
    for (const std::string& path : opt.instance_paths) jobs.push_back({path, std::nullopt, path});
    for (int i = 0; i < opt.gen_count; ++i) {
        sdttrp::GenConfig config = opt.gen_config;
        config.n_vehicles = opt.gen_vehicles >= 0 ? opt.gen_vehicles
                                                  : default_vehicle_count(config.n_customers);
        config.seed = opt.gen_seed + static_cast<std::uint64_t>(i);
        Job job;
        job.id = "gen-n" + std::to_string(config.n_customers) + "-s" +
                 std::to_string(config.seed);
        job.instance = sdttrp::generate_instance(config);
        jobs.push_back(std::move(job));
    }

    struct Row {
        sdttrp::RunReport report;
        bool failed = false;
        std::string error;
    };
    std::vector<Row> rows(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                const sdttrp::ProblemInstance inst =
                    jobs[i].instance ? *jobs[i].instance
                                     : sdttrp::io::load_instance(jobs[i].path);
                const sdttrp::SolveOutcome outcome =
                    sdttrp::solve_instance(inst, finalize_solve_params(opt.solve), jobs[i].id);
                rows[i].report = outcome.report;
            } catch (const std::exception& e) {
                rows[i].failed = true;
                rows[i].error = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(opt.jobs, static_cast<int>(jobs.size())));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (!quiet) {
        std::printf("%-24s %12s %12s %12s %9s %8s %3s\n", "instance", "greedy", "tabu",
                    "improvement", "time", "iters", "ok");
    }
    double improvement_sum = 0.0;
    int improvement_runs = 0;
    int worst = kExitOk;
    for (const Row& row : rows) {
        if (row.failed) {
            std::printf("%-24s failed: %s\n", row.report.instance_id.c_str(),
                        row.error.c_str());
            worst = std::max(worst, kExitInternal);
            continue;
        }
        const sdttrp::RunReport& r = row.report;
        std::printf("%-24s %12" PRId64 " %12" PRId64 " %12s %9.3f %8lld %3s\n",
                    r.instance_id.c_str(), r.greedy_cost, r.tabu_cost,
                    format_improvement(r.improvement).c_str(), r.wall_time, r.iterations,
                    r.complete && r.feasible ? "yes" : "NO");
        if (r.complete) {
            improvement_sum += r.improvement;
            ++improvement_runs;
        }
        if (!r.complete) worst = std::max(worst, kExitInfeasible);
        else if (!r.feasible) worst = std::max(worst, kExitValidation);
    }
    if (improvement_runs > 0)
        std::printf("mean improvement over %d runs: %s\n", improvement_runs,
                    format_improvement(improvement_sum / improvement_runs).c_str());

    if (!opt.csv_path.empty()) {
        std::FILE* csv = std::fopen(opt.csv_path.c_str(), "w");
        if (!csv) throw std::runtime_error("cannot write " + opt.csv_path);
        std::fprintf(csv,
                     "instance,seed,greedy_cost,tabu_cost,improvement,wall_time,iterations,"
                     "feasible,complete\n");
        for (const Row& row : rows) {
            if (row.failed) {
                std::fprintf(csv, "%s,,,,,,,,failed\n", row.report.instance_id.c_str());
                continue;
            }
            const sdttrp::RunReport& r = row.report;
            std::fprintf(csv, "%s,%" PRIu64 ",%" PRId64 ",%" PRId64 ",%s,%.3f,%lld,%d,%d\n",
                         r.instance_id.c_str(), r.seed, r.greedy_cost, r.tabu_cost,
                         format_improvement(r.improvement).c_str(), r.wall_time, r.iterations,
                         r.feasible ? 1 : 0, r.complete ? 1 : 0);
        }
        std::fclose(csv);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for the site-dependent truck-and-trailer routing problem with "
                 "time windows and split deliveries"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress non-essential output");

    GenerateOptions gen;
    CLI::App* cmd_generate = app.add_subcommand("generate", "Write a seeded synthetic instance");
    cmd_generate->add_option("--n", gen.config.n_customers, "Number of customers")
        ->capture_default_str();
    cmd_generate->add_option("--vehicles", gen.vehicles, "Fleet size (-1: customers/3 + 2)");
    cmd_generate->add_option("--transshipments", gen.config.n_transshipments,
                             "Number of transshipment points")
        ->capture_default_str();
    cmd_generate->add_option("--truck-only-frac", gen.config.truck_only_fraction,
                             "Fraction of truck-only customers")
        ->capture_default_str();
    cmd_generate->add_option("--site-dep-frac", gen.config.site_dependency_fraction,
                             "Chance a vehicle is excluded from a customer")
        ->capture_default_str();
    cmd_generate->add_option("--window-min", gen.config.window_width_range.first,
                             "Min hard window width, seconds")
        ->capture_default_str();
    cmd_generate->add_option("--window-max", gen.config.window_width_range.second,
                             "Max hard window width, seconds")
        ->capture_default_str();
    cmd_generate->add_option("--demand-min", gen.config.demand_range.first, "Min demand")
        ->capture_default_str();
    cmd_generate->add_option("--demand-max", gen.config.demand_range.second, "Max demand")
        ->capture_default_str();
    cmd_generate->add_option("--area", gen.config.area_side, "Square area side, meters")
        ->capture_default_str();
    cmd_generate->add_option("--soft-budget", gen.config.soft_violation_budget,
                             "Permitted soft window violations (v)")
        ->capture_default_str();
    cmd_generate->add_option("--split-budget", gen.config.split_budget,
                             "Permitted split deliveries")
        ->capture_default_str();
    cmd_generate->add_option("--seed", gen.config.seed, "Generator seed")->capture_default_str();
    cmd_generate->add_option("--out", gen.out, "Output instance file")->capture_default_str();

    SolveOptions solve;
    CLI::App* cmd_solve = app.add_subcommand("solve", "Construct and improve a solution");
    cmd_solve->add_option("instance", solve.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_solve->add_option("--out", solve.out, "Output solution file")->capture_default_str();
    add_solver_flags(cmd_solve, solve);

    ValidateOptions validate;
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Check a solution file against an instance");
    cmd_validate->add_option("instance", validate.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_validate->add_option("solution", validate.solution_path, "Solution JSON file")
        ->required()
        ->check(CLI::ExistingFile);

    BenchOptions bench;
    CLI::App* cmd_bench =
        app.add_subcommand("bench", "Greedy-vs-tabu comparison over a set of instances");
    cmd_bench->add_option("instances", bench.instance_paths, "Instance JSON files")
        ->check(CLI::ExistingFile);
    cmd_bench->add_option("--gen-count", bench.gen_count, "Generate this many instances")
        ->capture_default_str();
    cmd_bench->add_option("--gen-n", bench.gen_config.n_customers,
                          "Customers per generated instance")
        ->capture_default_str();
    cmd_bench->add_option("--gen-vehicles", bench.gen_vehicles,
                          "Fleet size per generated instance (-1: auto)");
    cmd_bench->add_option("--gen-seed", bench.gen_seed, "First generator seed")
        ->capture_default_str();
    cmd_bench->add_option("--csv", bench.csv_path, "Also write rows to this CSV file");
    cmd_bench->add_option("--jobs", bench.jobs, "Parallel workers")->capture_default_str();
    add_solver_flags(cmd_bench, bench.solve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cmd_generate) return run_generate(gen);
        if (*cmd_solve) return run_solve(solve, quiet);
        if (*cmd_validate) return run_validate(validate, quiet);
        if (*cmd_bench) return run_bench(bench, quiet);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
