#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crsense::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_missing_artifacts = 3;
inline constexpr int exit_no_convergence = 4;

/// Train multipliers and value tables; writes duals.csv, value_<k>.csv per
/// channel and training_trace.csv into `out_dir`.
int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_dir);

/// Simulate the closed loop under one sensing policy using artifacts from
/// `artifacts_dir`; writes metrics.csv (plus trace.csv when `trace_path` is
/// nonempty) and prints a summary.
int cmd_simulate(const std::string& config_path, const std::string& artifacts_dir,
                 const std::string& policy, int slots, int reps, std::uint64_t seed,
                 const std::string& out_dir, const std::string& trace_path = "");

/// Export the sensing decision map of one channel as map_<k>.csv.
/// l_max <= 0 picks a bound covering every channel's sensing band so maps
/// of different channels are cell-comparable.
int cmd_map(const std::string& config_path, const std::string& artifacts_dir, int channel,
            int grid_b, int grid_l, double l_max, const std::string& out_dir);

/// Retrain and evaluate the listed policies for each axis value; writes
/// sweep.csv.
int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, const std::vector<std::string>& policies,
              std::uint64_t seed, const std::string& out_dir);

/// Train once, then evaluate optimal, horizon1, myopic and rule_of_thumb on
/// the same scenario with common random numbers; writes the training
/// artifacts and compare_metrics.csv.
int cmd_compare(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
                int slots = 0, int reps = 0);

} // namespace crsense::cli
