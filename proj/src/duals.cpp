#include "crsense/duals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crsense {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double clip_unit(double x) { return std::clamp(x, -1.0, 1.0); }
} // namespace

ConstraintTargets targets_from(const ScenarioConfig& scenario) {
    ConstraintTargets t;
    for (const auto& u : scenario.users) t.power_caps.push_back(u.power_cap);
    for (const auto& c : scenario.channels) {
        t.interference_caps.push_back(c.interference_cap);
        const auto& tr = c.transition;
        t.stationary_occupancy.push_back(
            tr.idle_to_busy + tr.busy_to_idle > 0.0 ? stationary(tr).busy_prob : 0.0);
    }
    return t;
}

void validate(const TrainerConfig& t) {
    if (t.step_size <= 0.0 || t.inner_reps <= 0 || t.outer_rounds <= 0 ||
        t.tolerance <= 0.0 || t.max_dual_iters <= 0 || t.inner_slots < 0)
        throw std::invalid_argument("trainer parameters must be positive");
}

ConstraintEstimate estimate_constraints(const ScenarioConfig& scenario, const DualState& duals,
                                        const std::vector<ValueTable>& tables, PolicyKind kind,
                                        int slots, int reps, std::uint64_t seed) {
    const RunMetrics m = run(scenario, duals, tables, kind, slots, reps, seed);
    return ConstraintEstimate{m.avg_power, m.interference};
}

DualState dual_step(const DualState& duals, const ConstraintEstimate& measured,
                    const ConstraintTargets& targets, double mu) {
    if (duals.power_price.size() != measured.avg_power.size() ||
        duals.power_price.size() != targets.power_caps.size() ||
        duals.interference_price.size() != measured.interference.size() ||
        duals.interference_price.size() != targets.interference_caps.size())
        throw std::invalid_argument("dual_step: dimension mismatch");
    DualState out = duals;
    for (std::size_t m = 0; m < out.power_price.size(); ++m)
        out.power_price[m] = std::max(
            0.0, out.power_price[m] + mu * (measured.avg_power[m] - targets.power_caps[m]));
    for (std::size_t k = 0; k < out.interference_price.size(); ++k)
        out.interference_price[k] =
            std::max(0.0, out.interference_price[k] +
                              mu * (measured.interference[k] - targets.interference_caps[k]));
    return out;
}

namespace {

struct TrainScales {
    std::vector<double> pi;    // per user
    std::vector<double> theta; // per channel
    std::vector<double> pi_floor;
};

/// Normalized ascent step used inside training. Violations are measured
/// relative to the constraint caps and clipped, so one iteration moves a
/// multiplier by at most mu in its own scale. Power prices keep a small
/// positive floor: the per-slot power maximizer is finite only for
/// positive prices.
void ascend(DualState& duals, const ConstraintEstimate& est, const ConstraintTargets& targets,
            const TrainScales& scales, double mu, bool upward_only, double& movement) {
    movement = 0.0;
    for (std::size_t m = 0; m < duals.power_price.size(); ++m) {
        const double g = clip_unit((est.avg_power[m] - targets.power_caps[m]) / targets.power_caps[m]);
        if (upward_only && g <= 0.0) continue;
        const double next = std::max(scales.pi_floor[m], duals.power_price[m] + mu * scales.pi[m] * g);
        movement = std::max(movement, std::abs(next - duals.power_price[m]) / scales.pi[m]);
        duals.power_price[m] = next;
    }
    for (std::size_t k = 0; k < duals.interference_price.size(); ++k) {
        const double cap = targets.interference_caps[k];
        const double g = clip_unit((est.interference[k] - cap) / cap);
        if (upward_only && g <= 0.0) continue;
        const double next = std::max(0.0, duals.interference_price[k] + mu * scales.theta[k] * g);
        movement = std::max(movement, std::abs(next - duals.interference_price[k]) / scales.theta[k]);
        duals.interference_price[k] = next;
    }
}

void log_trace(std::vector<TraceRow>& trace, int round, int iter, const DualState& duals,
               const ConstraintEstimate& est, const ConstraintTargets& targets) {
    for (std::size_t m = 0; m < duals.power_price.size(); ++m)
        trace.push_back({round, iter, "user" + std::to_string(m), duals.power_price[m],
                         est.avg_power[m], targets.power_caps[m]});
    for (std::size_t k = 0; k < duals.interference_price.size(); ++k)
        trace.push_back({round, iter, "ch" + std::to_string(k), duals.interference_price[k],
                         est.interference[k], targets.interference_caps[k]});
}

bool feasible(const ConstraintEstimate& est, const ConstraintTargets& targets) {
    for (std::size_t m = 0; m < targets.power_caps.size(); ++m)
        if (est.avg_power[m] > targets.power_caps[m]) return false;
    for (std::size_t k = 0; k < targets.interference_caps.size(); ++k)
        if (est.interference[k] > targets.interference_caps[k]) return false;
    return true;
}

} // namespace

TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& trainer,
                  const SensingNumerics& numerics, std::uint64_t seed) {
    validate(scenario);
    validate(trainer);
    validate(numerics);
    const std::size_t K = scenario.num_channels();
    const std::size_t M = scenario.num_users();
    const ConstraintTargets targets = targets_from(scenario);
    const int slots = trainer.inner_slots > 0 ? trainer.inner_slots
                                              : default_horizon(scenario.discount);

    TrainResult res;
    res.duals.power_price.resize(M);
    res.duals.interference_price.assign(K, 1.0);

    TrainScales scales;
    scales.pi.resize(M);
    scales.pi_floor.resize(M);
    for (std::size_t m = 0; m < M; ++m) {
        // Price at which the waterlevel equals the power budget: the natural
        // magnitude of the trained multiplier.
        scales.pi[m] = scenario.users[m].weight / (scenario.users[m].power_cap * kLn2);
        scales.pi_floor[m] = 1e-9 * scales.pi[m];
        res.duals.power_price[m] = scales.pi[m];
    }
    scales.theta.assign(K, 1.0);

    std::vector<FadingSample> fading(K);
    std::vector<std::uint64_t> fading_seeds(K);
    for (std::size_t k = 0; k < K; ++k) {
        fading_seeds[k] = mix_seed(seed, seed_stream::fading_sample, k);
        fading[k] = sample_fading(scenario.mean_gains(k), numerics.fading_draws, fading_seeds[k]);
    }

    const auto refresh_tables = [&](bool warm) {
        for (std::size_t k = 0; k < K; ++k) {
            const SensingContext ctx = make_sensing_context(
                scenario.channels[k], scenario.users, res.duals.power_price,
                res.duals.interference_price[k], scenario.discount, scenario.snr_gap, fading[k]);
            const ValueTable* start = warm ? &res.tables[k] : nullptr;
            ValueIterationResult vi = value_iteration(ctx, numerics.grid_intervals,
                                                      numerics.tolerance, numerics.max_iters, start);
            vi.table.channel = static_cast<int>(k);
            vi.table.power_price_snapshot = res.duals.power_price;
            vi.table.interference_price_snapshot = res.duals.interference_price[k];
            vi.table.fading_seed = fading_seeds[k];
            if (warm)
                res.tables[k] = std::move(vi.table);
            else
                res.tables.push_back(std::move(vi.table));
        }
    };

    for (int round = 0; round < trainer.outer_rounds; ++round) {
        refresh_tables(round > 0);
        if (round == 0) {
            // Interference prices live on the scale of the secondary reward.
            for (std::size_t k = 0; k < K; ++k) {
                const SensingContext ctx = make_sensing_context(
                    scenario.channels[k], scenario.users, res.duals.power_price,
                    res.duals.interference_price[k], scenario.discount, scenario.snr_gap,
                    fading[k]);
                double mean = 0.0;
                for (double v : ctx.su_best) mean += v;
                mean /= static_cast<double>(ctx.su_best.size());
                scales.theta[k] = std::max(mean, 1e-3);
            }
        }
        const std::uint64_t est_seed =
            mix_seed(seed, seed_stream::constraint_est, static_cast<std::uint64_t>(round));
        for (int iter = 0; iter < trainer.max_dual_iters; ++iter) {
            const ConstraintEstimate est = estimate_constraints(
                scenario, res.duals, res.tables, PolicyKind::optimal, slots,
                trainer.inner_reps, est_seed);
            double movement = 0.0;
            ascend(res.duals, est, targets, scales, trainer.step_size, false, movement);
            log_trace(res.trace, round, iter, res.duals, est, targets);
            if (movement <= trainer.step_size * trainer.tolerance) break;
        }
    }

    // Align the value functions with the final prices, then verify the closed
    // loop on the training estimator; push violated prices up if needed.
    refresh_tables(true);
    res.final_estimate_seed = mix_seed(seed, seed_stream::constraint_est,
                                       static_cast<std::uint64_t>(trainer.outer_rounds));
    const int safety_cap = 60;
    for (int iter = 0; iter <= safety_cap; ++iter) {
        const ConstraintEstimate est =
            estimate_constraints(scenario, res.duals, res.tables, PolicyKind::optimal, slots,
                                 trainer.inner_reps, res.final_estimate_seed);
        res.final_estimate = est;
        res.converged = feasible(est, targets);
        if (res.converged || iter == safety_cap) break;
        double movement = 0.0;
        ascend(res.duals, est, targets, scales, trainer.step_size, true, movement);
        log_trace(res.trace, trainer.outer_rounds, iter, res.duals, est, targets);
    }
    return res;
}

} // namespace crsense
