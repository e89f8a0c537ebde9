#pragma once

#include "crsense/belief.hpp"
#include "crsense/channel.hpp"
#include "crsense/ra.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace crsense {

enum class PolicyKind { optimal, myopic, horizon1, rule_of_thumb, always, never };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);
bool policy_needs_table(PolicyKind kind);

/// Stationary value function of one channel's sensing POMDP, discretized on
/// a uniform belief grid with linear interpolation in between.
struct ValueTable {
    std::vector<double> values; ///< size = intervals + 1, nonnegative

    // provenance metadata
    int channel = -1;
    std::vector<double> power_price_snapshot;
    double interference_price_snapshot = 0.0;
    std::uint64_t fading_seed = 0;

    int intervals() const { return static_cast<int>(values.size()) - 1; }

    /// Piecewise-linear evaluation, argument clamped to [0,1].
    double at(double belief) const;
};

ValueTable zero_table(int intervals);

/// Frozen empirical fading distribution used to approximate the expectation
/// over secondary-link gains: draws[i][m] is the gain of user m in draw i.
struct FadingSample {
    std::vector<std::vector<double>> draws;
};

FadingSample sample_fading(const std::vector<double>& mean_gains, int count,
                           std::uint64_t seed);

/// Everything a per-channel Bellman backup needs, with the per-draw
/// secondary reward (max_m su_iri) precomputed once: it does not depend on
/// the belief, so backups reduce to scalar work per (grid point, draw).
struct SensingContext {
    TransitionModel transition;
    SensorModel sensor;
    double sensing_cost = 0.0;
    double theta = 0.0;
    double discount = 0.0;
    std::vector<double> su_best; ///< per fading draw
};

SensingContext make_sensing_context(const ChannelModel& channel,
                                    const std::vector<UserConfig>& users,
                                    const std::vector<double>& power_prices,
                                    double theta, double discount, double gamma_gap,
                                    const FadingSample& fading);

/// Expected slot reward when the channel is not sensed: [l^T b]_+.
double expected_reward_nosense(const std::array<double, 2>& l, const Belief& b);

/// Expected slot reward when the channel is sensed: averaged over the
/// outcome mass and charged the sensing cost, -xi + sum_z [l^T D_z b]_+.
double expected_reward_sense(const std::array<double, 2>& l, const Belief& b,
                             const SensorModel& sensor, double cost);

/// One sweep of the Bellman operator over the grid, averaging over the
/// frozen fading sample. The future term is evaluated by interpolation on
/// the input table.
ValueTable bellman_backup(const ValueTable& table, const SensingContext& ctx);

struct ValueIterationResult {
    ValueTable table;
    std::vector<double> deltas; ///< sup-norm change per sweep
    int iterations = 0;
    bool converged = false;
};

/// Iterate bellman_backup from an initial table (zero when empty) until the
/// sup-norm change drops below tol. A warning flag, not an exception, marks
/// hitting the iteration cap.
ValueIterationResult value_iteration(const SensingContext& ctx, int grid_intervals,
                                     double tol, int max_iters,
                                     const ValueTable* warm_start = nullptr);

/// Value of a fixed sensing rule (decisions taken per `kind` with
/// `decision_table` where relevant), by fixed-point policy evaluation on
/// the same grid and fading sample.
ValueIterationResult policy_evaluation(PolicyKind kind, const ValueTable* decision_table,
                                       const SensingContext& ctx, int grid_intervals,
                                       double tol, int max_iters);

/// Sensing decision for one channel at pre-decision belief b given the
/// slot's iri vector l. `table` must be present for optimal/horizon1.
/// Exact ties prefer not sensing.
bool decide(PolicyKind kind, const ValueTable* table, const std::array<double, 2>& l,
            const Belief& b, const ChannelModel& channel, double theta, double discount);

/// Horizon-1 value function: a single backup of the zero table.
ValueTable horizon1_table(const SensingContext& ctx, int grid_intervals);

/// Discretization and approximation knobs for the value-function solver.
struct SensingNumerics {
    int grid_intervals = 200;
    double tolerance = 1e-6;
    int max_iters = 5000;
    int fading_draws = 500;
};

void validate(const SensingNumerics& n);

/// Region labels over the (belief, su-reward) plane.
enum class MapRegion : int { nosense_idle = 0, nosense_access = 1, sense = 2 };

struct DecisionMap {
    int grid_b = 0;
    int grid_l = 0;
    double l_max = 0.0;
    std::vector<double> belief_axis;  ///< cell centers, size grid_b
    std::vector<double> su_iri_axis;  ///< cell centers, size grid_l
    std::vector<MapRegion> region;    ///< row-major [i_b * grid_l + i_l]

    int count(MapRegion r) const;
};

/// Evaluate the optimal decision rule over a (belief, su-reward) grid of
/// cell centers. Within nosense cells, access is labeled by [l^T b]_+ > 0
/// with the post-decision belief equal to the pre-decision one.
DecisionMap decision_map(const ChannelModel& channel, double theta,
                         const ValueTable& table, int grid_b, int grid_l,
                         double l_max, double discount);

} // namespace crsense
