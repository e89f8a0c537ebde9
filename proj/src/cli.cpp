#include "crsense/cli.hpp"

#include "crsense/config.hpp"
#include "crsense/csv.hpp"
#include "crsense/duals.hpp"
#include "crsense/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace crsense::cli {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int report(const std::exception& e, int code) {
    std::cerr << "error: " << e.what() << "\n";
    return code;
}

struct Artifacts {
    DualState duals;
    std::vector<ValueTable> tables;
};

/// Load duals and, when `want_tables`, the per-channel value tables.
Artifacts load_artifacts(const std::string& dir, std::size_t n_channels, bool want_tables) {
    Artifacts a;
    const std::string duals_path = join(dir, "duals.csv");
    if (!fs::exists(duals_path))
        throw MissingArtifactError("no trained multipliers at " + duals_path +
                                   " (run the train command first)");
    a.duals = load_duals(duals_path);
    if (want_tables) {
        for (std::size_t k = 0; k < n_channels; ++k) {
            const std::string p = join(dir, "value_" + std::to_string(k) + ".csv");
            if (!fs::exists(p))
                throw MissingArtifactError("no trained value table at " + p);
            ValueTable t = load_value_table(p);
            t.channel = static_cast<int>(k);
            a.tables.push_back(std::move(t));
        }
    }
    return a;
}

std::vector<ValueTable> horizon1_tables(const ScenarioConfig& scenario, const DualState& duals,
                                        const SensingNumerics& numerics, std::uint64_t seed) {
    std::vector<ValueTable> tables;
    for (std::size_t k = 0; k < scenario.num_channels(); ++k) {
        const std::uint64_t fading_seed = mix_seed(seed, seed_stream::fading_sample, k);
        const FadingSample fading =
            sample_fading(scenario.mean_gains(k), numerics.fading_draws, fading_seed);
        const SensingContext ctx = make_sensing_context(
            scenario.channels[k], scenario.users, duals.power_price,
            duals.interference_price[k], scenario.discount, scenario.snr_gap, fading);
        ValueTable t = horizon1_table(ctx, numerics.grid_intervals);
        t.channel = static_cast<int>(k);
        t.fading_seed = fading_seed;
        tables.push_back(std::move(t));
    }
    return tables;
}

std::vector<ValueTable> tables_for(PolicyKind kind, const Artifacts& artifacts,
                                   const ScenarioConfig& scenario,
                                   const SensingNumerics& numerics, std::uint64_t seed) {
    if (kind == PolicyKind::optimal) return artifacts.tables;
    if (kind == PolicyKind::horizon1)
        return horizon1_tables(scenario, artifacts.duals, numerics, seed);
    return {};
}

void write_train_artifacts(const std::string& out_dir, const TrainResult& result) {
    fs::create_directories(out_dir);
    write_duals(join(out_dir, "duals.csv"), result.duals);
    for (std::size_t k = 0; k < result.tables.size(); ++k)
        write_value_table(join(out_dir, "value_" + std::to_string(k) + ".csv"),
                          result.tables[k]);
    write_training_trace(join(out_dir, "training_trace.csv"), result.trace);
}

void print_metrics(const ScenarioConfig& scenario, const std::string& policy,
                   const RunMetrics& m) {
    std::printf("%-14s U_T=%.4f  U_SU=%.4f  sense_cost=%.4f  sense_rate=%.3f  (ci %.4f)\n",
                policy.c_str(), m.utility_total, m.utility_su, m.sensing_cost, m.sensing_rate,
                m.ci_utility_total);
    for (std::size_t u = 0; u < m.avg_power.size(); ++u)
        std::printf("  user %zu: avg power %.4f (cap %.4f)\n", u, m.avg_power[u],
                    scenario.users[u].power_cap);
    for (std::size_t k = 0; k < m.interference.size(); ++k)
        std::printf("  channel %zu: interference %.4f (cap %.4f)\n", k, m.interference[k],
                    scenario.channels[k].interference_cap);
}

double auto_l_max(const DualState& duals, const ScenarioConfig& scenario) {
    double theta_max = 0.0, cost_max = 0.0;
    for (double t : duals.interference_price) theta_max = std::max(theta_max, t);
    for (const auto& c : scenario.channels) cost_max = std::max(cost_max, c.sensing_cost);
    return std::max(1.0, 1.2 * theta_max + cost_max);
}

} // namespace

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    try {
        const ExperimentSpec spec = load_experiment(config_path);
        const TrainResult result = train(spec.scenario, spec.trainer, spec.sensing, seed);
        write_train_artifacts(out_dir, result);
        std::printf("trained %zu power prices, %zu interference prices -> %s\n",
                    result.duals.power_price.size(), result.duals.interference_price.size(),
                    out_dir.c_str());
        for (std::size_t k = 0; k < result.duals.interference_price.size(); ++k)
            std::printf("  theta[%zu] = %.6f   measured interference %.4f (cap %.4f)\n", k,
                        result.duals.interference_price[k], result.final_estimate.interference[k],
                        spec.scenario.channels[k].interference_cap);
        if (!result.converged) {
            std::cerr << "warning: constraint targets not met within iteration caps; "
                         "artifacts hold the best iterate\n";
            return exit_no_convergence;
        }
        return exit_ok;
    } catch (const MissingArtifactError& e) {
        return report(e, exit_missing_artifacts);
    } catch (const std::exception& e) {
        return report(e, exit_usage);
    }
}

int cmd_simulate(const std::string& config_path, const std::string& artifacts_dir,
                 const std::string& policy, int slots, int reps, std::uint64_t seed,
                 const std::string& out_dir, const std::string& trace_path) {
    try {
        const ExperimentSpec spec = load_experiment(config_path);
        const PolicyKind kind = policy_from_name(policy);
        const Artifacts artifacts = load_artifacts(artifacts_dir, spec.scenario.num_channels(),
                                                   kind == PolicyKind::optimal);
        const auto tables = tables_for(kind, artifacts, spec.scenario, spec.sensing, seed);
        if (slots <= 0) slots = spec.sim_slots;
        if (reps <= 0) reps = spec.sim_replications;
        std::vector<SlotRecord> trace;
        const RunMetrics m =
            run(spec.scenario, artifacts.duals, tables, kind, slots, reps,
                mix_seed(seed, seed_stream::simulate, 0), trace_path.empty() ? nullptr : &trace);
        fs::create_directories(out_dir);
        write_metrics(join(out_dir, "metrics.csv"),
                      {metrics_row(policy, std::nan(""), m)});
        if (!trace_path.empty()) write_slot_trace(trace_path, trace);
        print_metrics(spec.scenario, policy, m);
        return exit_ok;
    } catch (const MissingArtifactError& e) {
        return report(e, exit_missing_artifacts);
    } catch (const std::exception& e) {
        return report(e, exit_usage);
    }
}

int cmd_map(const std::string& config_path, const std::string& artifacts_dir, int channel,
            int grid_b, int grid_l, double l_max, const std::string& out_dir) {
    try {
        const ExperimentSpec spec = load_experiment(config_path);
        if (channel < 0 || static_cast<std::size_t>(channel) >= spec.scenario.num_channels())
            throw std::invalid_argument("unknown channel index " + std::to_string(channel));
        const Artifacts artifacts =
            load_artifacts(artifacts_dir, spec.scenario.num_channels(), true);
        if (l_max <= 0.0) l_max = auto_l_max(artifacts.duals, spec.scenario);
        const auto k = static_cast<std::size_t>(channel);
        const DecisionMap map =
            decision_map(spec.scenario.channels[k], artifacts.duals.interference_price[k],
                         artifacts.tables[k], grid_b, grid_l, l_max, spec.scenario.discount);
        fs::create_directories(out_dir);
        const std::string path = join(out_dir, "map_" + std::to_string(channel) + ".csv");
        write_map(path, map);
        std::printf("map for channel %d: %d sense cells, %d access cells, %d idle cells -> %s\n",
                    channel, map.count(MapRegion::sense), map.count(MapRegion::nosense_access),
                    map.count(MapRegion::nosense_idle), path.c_str());
        return exit_ok;
    } catch (const MissingArtifactError& e) {
        return report(e, exit_missing_artifacts);
    } catch (const std::exception& e) {
        return report(e, exit_usage);
    }
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, const std::vector<std::string>& policies,
              std::uint64_t seed, const std::string& out_dir) {
    try {
        const ExperimentSpec spec = load_experiment(config_path);
        const SweepAxis ax = axis_from_name(axis);
        if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
        std::vector<PolicyKind> kinds;
        for (const auto& p : policies) kinds.push_back(policy_from_name(p));
        if (kinds.empty())
            kinds = {PolicyKind::optimal, PolicyKind::horizon1, PolicyKind::myopic,
                     PolicyKind::rule_of_thumb};

        std::vector<MetricsRow> rows;
        for (std::size_t vi = 0; vi < values.size(); ++vi) {
            const ScenarioConfig scenario = apply_axis(spec.scenario, ax, values[vi]);
            const std::uint64_t train_seed = mix_seed(seed, seed_stream::simulate, vi + 1);
            const TrainResult trained = train(scenario, spec.trainer, spec.sensing, train_seed);
            Artifacts artifacts{trained.duals, trained.tables};
            const std::uint64_t run_seed = mix_seed(train_seed, seed_stream::simulate, 0);
            for (PolicyKind kind : kinds) {
                const auto tables = tables_for(kind, artifacts, scenario, spec.sensing, train_seed);
                const RunMetrics m = run(scenario, artifacts.duals, tables, kind, spec.sim_slots,
                                         spec.sim_replications, run_seed);
                rows.push_back(metrics_row(policy_name(kind), values[vi], m));
                std::printf("%s=%-8g %-14s U_T=%.4f (ci %.4f)\n", axis.c_str(), values[vi],
                            policy_name(kind), m.utility_total, m.ci_utility_total);
            }
        }
        fs::create_directories(out_dir);
        write_metrics(join(out_dir, "sweep.csv"), rows);
        return exit_ok;
    } catch (const MissingArtifactError& e) {
        return report(e, exit_missing_artifacts);
    } catch (const std::exception& e) {
        return report(e, exit_usage);
    }
}

int cmd_compare(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
                int slots, int reps) {
    try {
        const ExperimentSpec spec = load_experiment(config_path);
        const TrainResult trained = train(spec.scenario, spec.trainer, spec.sensing, seed);
        write_train_artifacts(out_dir, trained);
        Artifacts artifacts{trained.duals, trained.tables};
        if (slots <= 0) slots = spec.sim_slots;
        if (reps <= 0) reps = spec.sim_replications;
        const std::uint64_t run_seed = mix_seed(seed, seed_stream::simulate, 0);
        std::vector<MetricsRow> rows;
        for (PolicyKind kind : {PolicyKind::optimal, PolicyKind::horizon1, PolicyKind::myopic,
                                PolicyKind::rule_of_thumb}) {
            const auto tables = tables_for(kind, artifacts, spec.scenario, spec.sensing, seed);
            const RunMetrics m =
                run(spec.scenario, artifacts.duals, tables, kind, slots, reps, run_seed);
            rows.push_back(metrics_row(policy_name(kind), std::nan(""), m));
            print_metrics(spec.scenario, policy_name(kind), m);
        }
        write_metrics(join(out_dir, "compare_metrics.csv"), rows);
        if (!trained.converged) {
            std::cerr << "warning: training did not meet the constraint targets\n";
            return exit_no_convergence;
        }
        return exit_ok;
    } catch (const MissingArtifactError& e) {
        return report(e, exit_missing_artifacts);
    } catch (const std::exception& e) {
        return report(e, exit_usage);
    }
}

} // namespace crsense::cli
