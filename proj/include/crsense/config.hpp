#pragma once

#include "crsense/duals.hpp"
#include "crsense/sensing.hpp"
#include "crsense/sim.hpp"

#include <string>

namespace crsense {

/// Complete description of one experiment: the scenario under test, the
/// trainer and value-function numerics, and simulation defaults.
struct ExperimentSpec {
    ScenarioConfig scenario;
    TrainerConfig trainer;
    SensingNumerics sensing;
    int sim_slots = 0; ///< 0 derives the horizon from the discount factor
    int sim_replications = 50;
};

void validate(const ExperimentSpec& spec);

/// The default four-channel, four-user test system.
ExperimentSpec default_table1();

/// Parse and validate a JSON experiment file. Unlisted scenario parameters
/// (weights, SNR gap, costs, caps) default to one.
ExperimentSpec load_experiment(const std::string& path);
ExperimentSpec parse_experiment(const std::string& json_text);

std::string experiment_to_json(const ExperimentSpec& spec);

} // namespace crsense
