#include "crsense/sim.hpp"
#include "crsense/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crsense {

std::vector<double> ScenarioConfig::mean_gains(std::size_t channel) const {
    return std::vector<double>(users.size(), channels.at(channel).mean_gain());
}

Belief ScenarioConfig::initial_belief_of(std::size_t channel) const {
    if (!initial_belief.empty()) return Belief{initial_belief.at(channel)};
    return stationary(channels.at(channel).transition);
}

void validate(const ScenarioConfig& s) {
    if (s.channels.empty()) throw std::invalid_argument("scenario needs at least one channel");
    if (s.users.empty()) throw std::invalid_argument("scenario needs at least one user");
    if (!(s.discount > 0.0 && s.discount < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");
    if (s.snr_gap <= 0.0) throw std::invalid_argument("SNR gap must be positive");
    for (const auto& c : s.channels) validate(c);
    for (const auto& u : s.users) validate(u);
    if (!s.initial_belief.empty()) {
        if (s.initial_belief.size() != s.channels.size())
            throw std::invalid_argument("initial_belief needs one entry per channel");
        for (double b : s.initial_belief) validate(Belief{b});
    }
}

int default_horizon(double discount) {
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");
    return static_cast<int>(std::ceil(std::log(1e-4) / std::log(discount)));
}

int step_primary(int state, const TransitionModel& model, double u) {
    const double p_busy = state == 0 ? model.idle_to_busy : 1.0 - model.busy_to_idle;
    return u < p_busy ? 1 : 0;
}

LinkState draw_fading(const ScenarioConfig& config, Rng& rng) {
    LinkState link;
    link.gains.resize(config.num_channels());
    for (std::size_t k = 0; k < config.num_channels(); ++k) {
        const double mean = config.channels[k].mean_gain();
        link.gains[k].resize(config.num_users());
        for (std::size_t m = 0; m < config.num_users(); ++m)
            link.gains[k][m] = config.fixed_gain ? mean : rng.exponential(mean);
    }
    return link;
}

bool draw_outcome(int state, const SensorModel& sensor, double u) {
    return state == 1 ? u < 1.0 - sensor.miss_detect : u < sensor.false_alarm;
}

namespace {

struct ReplicationTotals {
    double u_su = 0.0;
    double u_cost = 0.0;
    double sense_rate = 0.0;
    std::vector<double> power;        // per user
    std::vector<double> interference; // per channel
};

ReplicationTotals run_one(const ScenarioConfig& scenario, const DualState& duals,
                          const std::vector<ValueTable>& tables, PolicyKind kind,
                          int n_slots, const std::vector<double>& weights,
                          const std::vector<double>& stationary_occupancy,
                          std::uint64_t rep_seed, int rep_index,
                          std::vector<SlotRecord>* trace) {
    const std::size_t K = scenario.num_channels();
    const std::size_t M = scenario.num_users();
    Rng rng(rep_seed);

    ReplicationTotals tot;
    tot.power.assign(M, 0.0);
    tot.interference.assign(K, 0.0);

    std::vector<int> occupancy(K);
    std::vector<Belief> post_prev(K);
    for (std::size_t k = 0; k < K; ++k) {
        const Belief init = scenario.initial_belief_of(k);
        occupancy[k] = rng.bernoulli(init.busy_prob) ? 1 : 0;
        post_prev[k] = init;
    }

    std::vector<double> u_trans(K), u_outcome(K);
    std::vector<Belief> pre(K), post(K);
    std::vector<std::array<double, 2>> l(K);
    std::vector<int> sensed(K), outcome(K);

    for (int n = 0; n < n_slots; ++n) {
        // Primitive randomness for the slot, in a fixed order independent of
        // any decision, so identical seeds couple runs across policies.
        for (std::size_t k = 0; k < K; ++k) u_trans[k] = rng.uniform();
        const LinkState link = draw_fading(scenario, rng);
        for (std::size_t k = 0; k < K; ++k) u_outcome[k] = rng.uniform();

        // T2.1: time update of the occupancy beliefs.
        for (std::size_t k = 0; k < K; ++k)
            pre[k] = n == 0 ? post_prev[k] : predict(post_prev[k], scenario.channels[k].transition);

        // T1 output feeds the per-channel secondary rewards.
        IriBundle bundle;
        bundle.channels = compute_su_table(link, scenario.users, duals, scenario.snr_gap);
        for (std::size_t k = 0; k < K; ++k)
            l[k] = {bundle.channels[k].su_best,
                    bundle.channels[k].su_best - duals.interference_price[k]};

        // T2.2: sensing decisions.
        for (std::size_t k = 0; k < K; ++k) {
            const ValueTable* table = tables.size() == K ? &tables[k] : nullptr;
            sensed[k] = decide(kind, table, l[k], pre[k], scenario.channels[k],
                               duals.interference_price[k], scenario.discount)
                            ? 1
                            : 0;
        }

        // T2.3: measurement update on the sensed channels.
        for (std::size_t k = 0; k < K; ++k) {
            if (sensed[k]) {
                const bool z = draw_outcome(occupancy[k], scenario.channels[k].sensor, u_outcome[k]);
                outcome[k] = z ? 1 : 0;
                post[k] = correct(pre[k], scenario.channels[k].sensor, z);
            } else {
                outcome[k] = -1;
                post[k] = pre[k];
            }
        }

        // T3: resource allocation on the post-decision beliefs.
        complete_iri_bundle(bundle, duals, post);
        const SlotDecision decision = allocate(bundle);

        const double w = weights[static_cast<std::size_t>(n)];
        double slot_su = 0.0, slot_cost = 0.0, slot_sensed = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto& ch = bundle.channels[k];
            if (decision.winner[k]) {
                const auto m = static_cast<std::size_t>(*decision.winner[k]);
                slot_su += scenario.users[m].weight * ch.users[m].rate;
                tot.power[m] += w * decision.power[k];
                if (occupancy[k] == 1 && stationary_occupancy[k] > 0.0)
                    tot.interference[k] += w / stationary_occupancy[k];
            }
            if (sensed[k]) {
                slot_cost += scenario.channels[k].sensing_cost;
                slot_sensed += 1.0;
            }
        }
        tot.u_su += w * slot_su;
        tot.u_cost += w * slot_cost;
        tot.sense_rate += w * slot_sensed / static_cast<double>(K);

        if (trace) {
            SlotRecord rec;
            rec.replication = rep_index;
            rec.slot = n;
            rec.gains = link.gains;
            rec.occupancy = occupancy;
            rec.sensed = sensed;
            rec.outcome = outcome;
            rec.pre_belief.resize(K);
            rec.post_belief.resize(K);
            rec.winner.assign(K, -1);
            rec.power.assign(K, 0.0);
            rec.reward.resize(K);
            rec.interfered.assign(K, 0);
            for (std::size_t k = 0; k < K; ++k) {
                rec.pre_belief[k] = pre[k].busy_prob;
                rec.post_belief[k] = post[k].busy_prob;
                if (decision.winner[k]) {
                    rec.winner[k] = *decision.winner[k];
                    rec.power[k] = decision.power[k];
                    rec.interfered[k] = occupancy[k];
                }
                rec.reward[k] = -scenario.channels[k].sensing_cost * sensed[k] +
                                bundle.channels[k].channel_iri;
            }
            trace->push_back(std::move(rec));
        }

        for (std::size_t k = 0; k < K; ++k)
            occupancy[k] = step_primary(occupancy[k], scenario.channels[k].transition, u_trans[k]);
        post_prev = post;
    }
    return tot;
}

} // namespace

RunMetrics run(const ScenarioConfig& scenario, const DualState& duals,
               const std::vector<ValueTable>& tables, PolicyKind kind, int n_slots,
               int replications, std::uint64_t seed, std::vector<SlotRecord>* trace) {
    validate(scenario);
    validate(duals);
    const std::size_t K = scenario.num_channels();
    const std::size_t M = scenario.num_users();
    if (duals.power_price.size() != M || duals.interference_price.size() != K)
        throw std::invalid_argument("run: dual state dimensions do not match the scenario");
    if (policy_needs_table(kind) && tables.size() != K)
        throw MissingArtifactError(std::string("run: policy '") + policy_name(kind) +
                                   "' requires one value table per channel");
    if (n_slots <= 0) n_slots = default_horizon(scenario.discount);
    if (replications <= 0) throw std::invalid_argument("run: replications must be positive");

    const std::vector<double> weights = discount_weights(scenario.discount, n_slots);
    std::vector<double> stationary_occupancy(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& t = scenario.channels[k].transition;
        stationary_occupancy[k] =
            t.idle_to_busy + t.busy_to_idle > 0.0 ? stationary(t).busy_prob : 0.0;
    }

    RunMetrics metrics;
    metrics.replications = replications;
    metrics.slots = n_slots;
    metrics.avg_power.assign(M, 0.0);
    metrics.interference.assign(K, 0.0);
    metrics.per_rep_utility_total.reserve(static_cast<std::size_t>(replications));

    double sum_ut = 0.0, sum_ut2 = 0.0, sum_usu = 0.0, sum_usu2 = 0.0;
    for (int r = 0; r < replications; ++r) {
        const ReplicationTotals tot =
            run_one(scenario, duals, tables, kind, n_slots, weights, stationary_occupancy,
                    mix_seed(seed, seed_stream::replication, static_cast<std::uint64_t>(r)), r,
                    trace);
        const double ut = tot.u_su - tot.u_cost;
        metrics.per_rep_utility_total.push_back(ut);
        sum_ut += ut;
        sum_ut2 += ut * ut;
        sum_usu += tot.u_su;
        sum_usu2 += tot.u_su * tot.u_su;
        metrics.sensing_cost += tot.u_cost;
        metrics.sensing_rate += tot.sense_rate;
        for (std::size_t m = 0; m < M; ++m) metrics.avg_power[m] += tot.power[m];
        for (std::size_t k = 0; k < K; ++k) metrics.interference[k] += tot.interference[k];
    }

    const double nr = static_cast<double>(replications);
    metrics.utility_total = sum_ut / nr;
    metrics.utility_su = sum_usu / nr;
    metrics.sensing_cost /= nr;
    metrics.sensing_rate /= nr;
    for (auto& p : metrics.avg_power) p /= nr;
    for (auto& i : metrics.interference) i /= nr;
    if (replications > 1) {
        const double var_ut = std::max(0.0, (sum_ut2 - nr * metrics.utility_total * metrics.utility_total) / (nr - 1.0));
        const double var_usu = std::max(0.0, (sum_usu2 - nr * metrics.utility_su * metrics.utility_su) / (nr - 1.0));
        metrics.ci_utility_total = 1.96 * std::sqrt(var_ut / nr);
        metrics.ci_utility_su = 1.96 * std::sqrt(var_usu / nr);
    }
    return metrics;
}

SweepAxis axis_from_name(const std::string& name) {
    for (SweepAxis a : {SweepAxis::transition_time, SweepAxis::sensing_cost,
                        SweepAxis::error_prob, SweepAxis::snr})
        if (name == axis_name(a)) return a;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::transition_time: return "transition_time";
    case SweepAxis::sensing_cost: return "sensing_cost";
    case SweepAxis::error_prob: return "error_prob";
    case SweepAxis::snr: return "snr";
    }
    return "?";
}

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value) {
    ScenarioConfig out = base;
    switch (axis) {
    case SweepAxis::transition_time: {
        if (value < 1.0)
            throw std::invalid_argument("transition_time values must be >= 1");
        for (auto& c : out.channels) {
            const double a = stationary(c.transition).busy_prob;
            c.transition.idle_to_busy = a / value;
            c.transition.busy_to_idle = (1.0 - a) / value;
        }
        break;
    }
    case SweepAxis::sensing_cost:
        if (value < 0.0) throw std::invalid_argument("sensing_cost factor must be >= 0");
        for (auto& c : out.channels) c.sensing_cost *= value;
        break;
    case SweepAxis::error_prob:
        if (value < 0.0) throw std::invalid_argument("error_prob factor must be >= 0");
        for (auto& c : out.channels) {
            c.sensor.false_alarm *= value;
            c.sensor.miss_detect *= value;
            if (c.sensor.false_alarm >= 1.0 || c.sensor.miss_detect >= 1.0)
                throw std::invalid_argument("error_prob factor pushes an error rate past 1");
        }
        break;
    case SweepAxis::snr:
        for (auto& c : out.channels) c.snr_db = value;
        break;
    }
    return out;
}

} // namespace crsense
