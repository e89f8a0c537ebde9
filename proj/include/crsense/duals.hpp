#pragma once

#include "crsense/sim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crsense {

/// Right-hand sides of the long-term constraints, plus the stationary
/// occupancies that normalize the interference probabilities.
struct ConstraintTargets {
    std::vector<double> power_caps;           ///< per user
    std::vector<double> interference_caps;    ///< per channel
    std::vector<double> stationary_occupancy; ///< per channel (0 allowed: no PU activity)
};

ConstraintTargets targets_from(const ScenarioConfig& scenario);

/// Knobs of the multiplier search.
struct TrainerConfig {
    double step_size = 0.05; ///< mu; steps are normalized by constraint scale
    int inner_slots = 0;     ///< Monte-Carlo slots per dual evaluation; 0 = horizon
    int inner_reps = 50;     ///< replications per dual evaluation
    int outer_rounds = 5;    ///< value-iteration / dual-ascent alternations
    double tolerance = 0.02; ///< relative movement threshold ending a dual phase
    int max_dual_iters = 150;
};

void validate(const TrainerConfig& t);

struct ConstraintEstimate {
    std::vector<double> avg_power;    ///< discounted average per user
    std::vector<double> interference; ///< discounted Pr(interference | busy) per channel
};

/// Monte-Carlo estimate of both constraint functionals under a closed-loop
/// policy, by delegating the slot loop to sim::run.
ConstraintEstimate estimate_constraints(const ScenarioConfig& scenario, const DualState& duals,
                                        const std::vector<ValueTable>& tables, PolicyKind kind,
                                        int slots, int reps, std::uint64_t seed);

/// One projected subgradient step on the dual function:
/// pi  <- [pi  + mu (measured_power - cap)]_+ per user,
/// theta <- [theta + mu (measured_interference - cap)]_+ per channel.
DualState dual_step(const DualState& duals, const ConstraintEstimate& measured,
                    const ConstraintTargets& targets, double mu);

struct TraceRow {
    int round = 0;
    int iter = 0;
    std::string which; ///< "user<m>" or "ch<k>"
    double multiplier = 0.0;
    double measured = 0.0;
    double target = 0.0;
};

struct TrainResult {
    DualState duals;
    std::vector<ValueTable> tables;
    std::vector<TraceRow> trace;
    ConstraintEstimate final_estimate;
    std::uint64_t final_estimate_seed = 0;
    bool converged = false;
};

/// Alternate per-channel value iteration (policy fixed point for the current
/// prices) with dual ascent (prices against the Monte-Carlo constraint
/// estimates of the resulting closed loop). Constraint estimates use common
/// random numbers across the iterations of a round, which makes the whole
/// search deterministic for a given seed. Returns the best iterate with a
/// non-convergence flag instead of throwing when iteration caps run out.
TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& trainer,
                  const SensingNumerics& numerics, std::uint64_t seed);

} // namespace crsense
