#pragma once

#include "crsense/channel.hpp"
#include "crsense/ra.hpp"
#include "crsense/rng.hpp"
#include "crsense/sensing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crsense {

/// Full scenario under test: channels, users, discounting and fading model.
struct ScenarioConfig {
    std::vector<ChannelModel> channels;
    std::vector<UserConfig> users;
    double discount = 0.95;
    double snr_gap = 1.0;
    bool fixed_gain = false;              ///< degenerate fading (h = mean), for diagnostics
    std::vector<double> initial_belief;   ///< per channel; empty = stationary

    std::size_t num_channels() const { return channels.size(); }
    std::size_t num_users() const { return users.size(); }
    std::vector<double> mean_gains(std::size_t channel) const;
    Belief initial_belief_of(std::size_t channel) const;
};

void validate(const ScenarioConfig& s);

/// Truncation horizon: smallest N with discount^N < 1e-4.
int default_horizon(double discount);

/// One slot of one replication: state, decisions and rewards, per channel.
struct SlotRecord {
    int replication = 0;
    int slot = 0;
    std::vector<int> occupancy;               ///< a_k, 0/1
    std::vector<std::vector<double>> gains;   ///< [k][m]
    std::vector<double> pre_belief;
    std::vector<double> post_belief;
    std::vector<int> sensed;                  ///< s_k
    std::vector<int> outcome;                 ///< z_k, -1 when not sensed
    std::vector<int> winner;                  ///< -1 when idle
    std::vector<double> power;                ///< effective power of the winner
    std::vector<double> reward;               ///< per-channel DP reward
    std::vector<int> interfered;              ///< a_k AND someone transmitting
};

/// Discounted long-term metrics averaged across replications.
struct RunMetrics {
    double utility_total = 0.0;  ///< U_T = U_SU - sensing cost
    double utility_su = 0.0;
    double sensing_cost = 0.0;
    double sensing_rate = 0.0;   ///< discounted fraction of sensed channel-slots
    std::vector<double> avg_power;      ///< per user
    std::vector<double> interference;   ///< per channel, normalized by A_k
    double ci_utility_total = 0.0;      ///< 1.96 sd / sqrt(reps)
    double ci_utility_su = 0.0;
    std::vector<double> per_rep_utility_total; ///< for paired comparisons
    int replications = 0;
    int slots = 0;
};

/// Primitive draws, exposed for direct testing.
int step_primary(int state, const TransitionModel& model, double u);
LinkState draw_fading(const ScenarioConfig& config, Rng& rng);
bool draw_outcome(int state, const SensorModel& sensor, double u);

/// Run the closed-loop five-step slot procedure for `replications`
/// independent replications of `n_slots` slots each. `tables` must hold one
/// table per channel for table-based policies (trained tables for optimal,
/// one-step tables for horizon1). Metrics use normalized discount weights.
/// Replication r consumes the substream mix_seed(seed, replication, r); all
/// primitive randomness is drawn in a fixed order independent of decisions,
/// so runs with different policies under one seed are coupled.
RunMetrics run(const ScenarioConfig& scenario, const DualState& duals,
               const std::vector<ValueTable>& tables, PolicyKind kind, int n_slots,
               int replications, std::uint64_t seed,
               std::vector<SlotRecord>* trace = nullptr);

enum class SweepAxis { transition_time, sensing_cost, error_prob, snr };

SweepAxis axis_from_name(const std::string& name);
const char* axis_name(SweepAxis axis);

/// Scenario perturbations behind the sweep axes:
///  - transition_time: value T sets p01 = A/T, p10 = (1-A)/T (stationary
///    occupancy preserved; T = 1 makes occupancy i.i.d. across slots)
///  - sensing_cost:    value scales every channel's cost multiplicatively
///  - error_prob:      value scales every channel's (P_FA, P_MD)
///  - snr:             value replaces every channel's SNR (dB)
ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value);

} // namespace crsense
