#include "crsense/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Joint sensing and resource allocation for overlay cognitive radios"};
    app.require_subcommand(1);

    std::string config, out = "out", artifacts = "out", policy = "optimal";
    std::string axis, trace_path;
    std::uint64_t seed = 12345;
    int slots = 0, reps = 0, channel = 0, grid_b = 200, grid_l = 200;
    double l_max = 0.0;
    std::vector<double> values;
    std::vector<std::string> policies;

    auto* train = app.add_subcommand("train", "train multipliers and value tables");
    train->add_option("--config", config, "experiment JSON")->required();
    train->add_option("--seed", seed, "master seed");
    train->add_option("--out", out, "output directory");

    auto* simulate = app.add_subcommand("simulate", "run the closed loop under one policy");
    simulate->add_option("--config", config, "experiment JSON")->required();
    simulate->add_option("--artifacts", artifacts, "directory with trained artifacts");
    simulate->add_option("--policy", policy, "optimal|myopic|horizon1|rule_of_thumb|always|never");
    simulate->add_option("--slots", slots, "slots per replication (0 = horizon)");
    simulate->add_option("--reps", reps, "replications (0 = config default)");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--out", out, "output directory");
    simulate->add_option("--trace", trace_path, "also write a per-slot trace CSV here");

    auto* map = app.add_subcommand("map", "export a sensing decision map");
    map->add_option("--config", config, "experiment JSON")->required();
    map->add_option("--artifacts", artifacts, "directory with trained artifacts");
    map->add_option("--channel", channel, "channel index (0-based)");
    map->add_option("--grid-b", grid_b, "belief cells");
    map->add_option("--grid-l", grid_l, "reward cells");
    map->add_option("--lmax", l_max, "reward axis bound (0 = auto)");
    map->add_option("--out", out, "output directory");

    auto* sweep = app.add_subcommand("sweep", "retrain and evaluate along a parameter axis");
    sweep->add_option("--config", config, "experiment JSON")->required();
    sweep->add_option("--axis", axis, "transition_time|sensing_cost|error_prob|snr")->required();
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
    sweep->add_option("--policy", policies, "policies to evaluate (repeatable)");
    sweep->add_option("--seed", seed, "master seed");
    sweep->add_option("--out", out, "output directory");

    auto* compare = app.add_subcommand("compare", "train once, evaluate the four policies");
    compare->add_option("--config", config, "experiment JSON")->required();
    compare->add_option("--slots", slots, "slots per replication (0 = horizon)");
    compare->add_option("--reps", reps, "replications (0 = config default)");
    compare->add_option("--seed", seed, "master seed");
    compare->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : crsense::cli::exit_usage;
    }

    if (train->parsed()) return crsense::cli::cmd_train(config, seed, out);
    if (simulate->parsed())
        return crsense::cli::cmd_simulate(config, artifacts, policy, slots, reps, seed, out,
                                          trace_path);
    if (map->parsed())
        return crsense::cli::cmd_map(config, artifacts, channel, grid_b, grid_l, l_max, out);
    if (sweep->parsed())
        return crsense::cli::cmd_sweep(config, axis, values, policies, seed, out);
    if (compare->parsed()) return crsense::cli::cmd_compare(config, seed, out, slots, reps);
    return crsense::cli::exit_usage;
}
