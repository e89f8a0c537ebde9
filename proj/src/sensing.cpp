#include "crsense/sensing.hpp"
#include "crsense/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crsense {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::optimal: return "optimal";
    case PolicyKind::myopic: return "myopic";
    case PolicyKind::horizon1: return "horizon1";
    case PolicyKind::rule_of_thumb: return "rule_of_thumb";
    case PolicyKind::always: return "always";
    case PolicyKind::never: return "never";
    }
    return "?";
}

PolicyKind policy_from_name(const std::string& name) {
    for (PolicyKind k : {PolicyKind::optimal, PolicyKind::myopic, PolicyKind::horizon1,
                         PolicyKind::rule_of_thumb, PolicyKind::always, PolicyKind::never})
        if (name == policy_name(k)) return k;
    throw std::invalid_argument("unknown policy: " + name);
}

bool policy_needs_table(PolicyKind kind) {
    return kind == PolicyKind::optimal || kind == PolicyKind::horizon1;
}

double ValueTable::at(double belief) const {
    const int n = intervals();
    const double x = std::clamp(belief, 0.0, 1.0) * n;
    const int i = std::min(static_cast<int>(x), n - 1);
    const double w = x - i;
    const auto u = static_cast<std::size_t>(i);
    return values[u] * (1.0 - w) + values[u + 1] * w;
}

ValueTable zero_table(int intervals) {
    ValueTable t;
    if (intervals < 1) throw std::invalid_argument("grid needs at least one interval");
    t.values.assign(static_cast<std::size_t>(intervals) + 1, 0.0);
    return t;
}

FadingSample sample_fading(const std::vector<double>& mean_gains, int count,
                           std::uint64_t seed) {
    if (count <= 0) throw std::invalid_argument("fading sample must be nonempty");
    FadingSample s;
    s.draws.resize(static_cast<std::size_t>(count));
    Rng rng(seed);
    for (auto& draw : s.draws) {
        draw.resize(mean_gains.size());
        for (std::size_t m = 0; m < mean_gains.size(); ++m)
            draw[m] = rng.exponential(mean_gains[m]);
    }
    return s;
}

SensingContext make_sensing_context(const ChannelModel& channel,
                                    const std::vector<UserConfig>& users,
                                    const std::vector<double>& power_prices,
                                    double theta, double discount, double gamma_gap,
                                    const FadingSample& fading) {
    if (users.size() != power_prices.size())
        throw std::invalid_argument("one power price per user required");
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");
    SensingContext ctx;
    ctx.transition = channel.transition;
    ctx.sensor = channel.sensor;
    ctx.sensing_cost = channel.sensing_cost;
    ctx.theta = theta;
    ctx.discount = discount;
    ctx.su_best.reserve(fading.draws.size());
    for (const auto& draw : fading.draws) {
        if (draw.size() != users.size())
            throw std::invalid_argument("fading draw size mismatch");
        double best = 0.0;
        for (std::size_t m = 0; m < users.size(); ++m)
            best = std::max(best,
                            su_iri(draw[m], users[m].weight, power_prices[m], gamma_gap).iri);
        ctx.su_best.push_back(best);
    }
    if (ctx.su_best.empty()) throw std::invalid_argument("fading sample must be nonempty");
    return ctx;
}

double expected_reward_nosense(const std::array<double, 2>& l, const Belief& b) {
    const double dot = l[0] * (1.0 - b.busy_prob) + l[1] * b.busy_prob;
    return dot > 0.0 ? dot : 0.0;
}

double expected_reward_sense(const std::array<double, 2>& l, const Belief& b,
                             const SensorModel& sensor, double cost) {
    const double idle = 1.0 - b.busy_prob;
    const double busy = b.busy_prob;
    const double z0 = l[0] * (1.0 - sensor.false_alarm) * idle + l[1] * sensor.miss_detect * busy;
    const double z1 = l[0] * sensor.false_alarm * idle + l[1] * (1.0 - sensor.miss_detect) * busy;
    return -cost + (z0 > 0.0 ? z0 : 0.0) + (z1 > 0.0 ? z1 : 0.0);
}

namespace {

struct InterpCoord {
    std::size_t i = 0;
    double w = 0.0;
    double eval(const std::vector<double>& v) const {
        return v[i] * (1.0 - w) + v[i + 1] * w;
    }
};

InterpCoord coord_of(double belief, int intervals) {
    const double x = std::clamp(belief, 0.0, 1.0) * intervals;
    const int i = std::min(static_cast<int>(x), intervals - 1);
    return {static_cast<std::size_t>(i), x - i};
}

/// Belief-dependent quantities of one grid point, shared by every fading
/// draw during a sweep.
struct GridPoint {
    double belief = 0.0;
    InterpCoord pred_nosense;          // predict(b)
    double pr[2] = {0, 0};             // outcome probabilities
    double d_idle[2] = {0, 0};         // [D_z b]_1
    double d_busy[2] = {0, 0};         // [D_z b]_2
    InterpCoord pred_sense[2];         // predict(correct(b, z))
};

std::vector<GridPoint> build_grid(const SensingContext& ctx, int intervals) {
    std::vector<GridPoint> grid(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) {
        GridPoint& g = grid[static_cast<std::size_t>(i)];
        const Belief b{static_cast<double>(i) / intervals};
        g.belief = b.busy_prob;
        g.pred_nosense = coord_of(predict(b, ctx.transition).busy_prob, intervals);
        const double idle = 1.0 - b.busy_prob;
        const double busy = b.busy_prob;
        g.d_idle[0] = (1.0 - ctx.sensor.false_alarm) * idle;
        g.d_busy[0] = ctx.sensor.miss_detect * busy;
        g.d_idle[1] = ctx.sensor.false_alarm * idle;
        g.d_busy[1] = (1.0 - ctx.sensor.miss_detect) * busy;
        for (int z = 0; z < 2; ++z) {
            g.pr[z] = outcome_prob(b, ctx.sensor, z == 1);
            if (g.pr[z] > 0.0) {
                const Belief post = correct(b, ctx.sensor, z == 1);
                g.pred_sense[z] = coord_of(predict(post, ctx.transition).busy_prob, intervals);
            }
        }
    }
    return grid;
}

double backup_point(const GridPoint& g, const SensingContext& ctx,
                    const std::vector<double>& values) {
    const double gamma = ctx.discount;
    const double v_nosense = gamma * g.pred_nosense.eval(values);
    double v_sense_future = 0.0;
    for (int z = 0; z < 2; ++z)
        if (g.pr[z] > 0.0) v_sense_future += g.pr[z] * g.pred_sense[z].eval(values);
    v_sense_future *= gamma;

    double acc = 0.0;
    for (double lsu : ctx.su_best) {
        const double l1 = lsu - ctx.theta;
        const double dot = lsu * (1.0 - g.belief) + l1 * g.belief;
        const double nosense = (dot > 0.0 ? dot : 0.0) + v_nosense;
        double sense = -ctx.sensing_cost + v_sense_future;
        for (int z = 0; z < 2; ++z) {
            const double dz = lsu * g.d_idle[z] + l1 * g.d_busy[z];
            if (dz > 0.0) sense += dz;
        }
        acc += std::max(nosense, sense);
    }
    return acc / static_cast<double>(ctx.su_best.size());
}

} // namespace

ValueTable bellman_backup(const ValueTable& table, const SensingContext& ctx) {
    const int n = table.intervals();
    if (n < 1) throw std::invalid_argument("bellman_backup: empty table");
    const auto grid = build_grid(ctx, n);
    ValueTable out = table;
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] = backup_point(grid[i], ctx, table.values);
    return out;
}

namespace {

ValueIterationResult iterate_to_fixpoint(const SensingContext& ctx, int grid_intervals,
                                         double tol, int max_iters,
                                         const ValueTable* warm_start,
                                         const std::vector<GridPoint>& grid,
                                         double (*point_fn)(const GridPoint&,
                                                            const SensingContext&,
                                                            const std::vector<double>&,
                                                            const void*),
                                         const void* aux) {
    ValueIterationResult res;
    res.table = warm_start && warm_start->intervals() == grid_intervals
                    ? *warm_start
                    : zero_table(grid_intervals);
    std::vector<double> next(res.table.values.size());
    for (int it = 0; it < max_iters; ++it) {
        double delta = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            next[i] = point_fn(grid[i], ctx, res.table.values, aux);
            delta = std::max(delta, std::abs(next[i] - res.table.values[i]));
        }
        res.table.values.swap(next);
        res.deltas.push_back(delta);
        res.iterations = it + 1;
        if (delta <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double vi_point(const GridPoint& g, const SensingContext& ctx,
                const std::vector<double>& values, const void*) {
    return backup_point(g, ctx, values);
}

} // namespace

ValueIterationResult value_iteration(const SensingContext& ctx, int grid_intervals,
                                     double tol, int max_iters,
                                     const ValueTable* warm_start) {
    const auto grid = build_grid(ctx, grid_intervals);
    return iterate_to_fixpoint(ctx, grid_intervals, tol, max_iters, warm_start, grid,
                               &vi_point, nullptr);
}

namespace {

/// Fixed-rule analogue of backup_point: the action comes from the policy,
/// the future term from the table being evaluated.
struct PolicyEvalAux {
    PolicyKind kind = PolicyKind::never;
    const ValueTable* decision_table = nullptr; // consulted by optimal/horizon1
    double rot_lo = 0.0, rot_hi = 1.0;          // rule-of-thumb belief band
};

double policy_point(const GridPoint& g, const SensingContext& ctx,
                    const std::vector<double>& values, const void* aux_ptr) {
    const auto& aux = *static_cast<const PolicyEvalAux*>(aux_ptr);
    const double gamma = ctx.discount;
    const double v_nosense = gamma * g.pred_nosense.eval(values);
    double v_sense_future = 0.0;
    for (int z = 0; z < 2; ++z)
        if (g.pr[z] > 0.0) v_sense_future += g.pr[z] * g.pred_sense[z].eval(values);
    v_sense_future *= gamma;

    double dec_nosense_future = 0.0, dec_sense_future = 0.0;
    if (aux.kind == PolicyKind::optimal || aux.kind == PolicyKind::horizon1) {
        const auto& dv = aux.decision_table->values;
        dec_nosense_future = gamma * g.pred_nosense.eval(dv);
        for (int z = 0; z < 2; ++z)
            if (g.pr[z] > 0.0) dec_sense_future += g.pr[z] * g.pred_sense[z].eval(dv);
        dec_sense_future *= gamma;
    }

    double acc = 0.0;
    for (double lsu : ctx.su_best) {
        const double l1 = lsu - ctx.theta;
        const double dot = lsu * (1.0 - g.belief) + l1 * g.belief;
        const double short_nosense = dot > 0.0 ? dot : 0.0;
        double short_sense = -ctx.sensing_cost;
        for (int z = 0; z < 2; ++z) {
            const double dz = lsu * g.d_idle[z] + l1 * g.d_busy[z];
            if (dz > 0.0) short_sense += dz;
        }

        bool sense = false;
        switch (aux.kind) {
        case PolicyKind::always: sense = true; break;
        case PolicyKind::never: sense = false; break;
        case PolicyKind::myopic: sense = short_sense > short_nosense; break;
        case PolicyKind::optimal:
        case PolicyKind::horizon1:
            sense = short_sense + dec_sense_future > short_nosense + dec_nosense_future;
            break;
        case PolicyKind::rule_of_thumb:
            sense = short_nosense >= ctx.sensing_cost &&
                    short_nosense <= ctx.theta - ctx.sensing_cost &&
                    g.belief >= aux.rot_lo && g.belief <= aux.rot_hi;
            break;
        }
        acc += sense ? short_sense + v_sense_future : short_nosense + v_nosense;
    }
    return acc / static_cast<double>(ctx.su_best.size());
}

} // namespace

ValueIterationResult policy_evaluation(PolicyKind kind, const ValueTable* decision_table,
                                       const SensingContext& ctx, int grid_intervals,
                                       double tol, int max_iters) {
    if (policy_needs_table(kind) && decision_table == nullptr)
        throw std::invalid_argument("policy_evaluation: decision table required");
    PolicyEvalAux aux;
    aux.kind = kind;
    aux.decision_table = decision_table;
    if (kind == PolicyKind::rule_of_thumb) {
        const Belief a = stationary(ctx.transition);
        aux.rot_lo = correct(a, ctx.sensor, false).busy_prob;
        aux.rot_hi = correct(a, ctx.sensor, true).busy_prob;
    }
    const auto grid = build_grid(ctx, grid_intervals);
    return iterate_to_fixpoint(ctx, grid_intervals, tol, max_iters, nullptr, grid,
                               &policy_point, &aux);
}

bool decide(PolicyKind kind, const ValueTable* table, const std::array<double, 2>& l,
            const Belief& b, const ChannelModel& channel, double theta, double discount) {
    switch (kind) {
    case PolicyKind::always: return true;
    case PolicyKind::never: return false;
    case PolicyKind::rule_of_thumb: {
        const double iri = expected_reward_nosense(l, b);
        if (iri < channel.sensing_cost || iri > theta - channel.sensing_cost) return false;
        const Belief a = stationary(channel.transition);
        const double lo = correct(a, channel.sensor, false).busy_prob;
        const double hi = correct(a, channel.sensor, true).busy_prob;
        return b.busy_prob >= lo && b.busy_prob <= hi;
    }
    case PolicyKind::optimal:
    case PolicyKind::horizon1:
        if (table == nullptr)
            throw std::invalid_argument("decide: value table required for this policy");
        [[fallthrough]];
    case PolicyKind::myopic: {
        const auto future = [&](double belief) {
            return kind == PolicyKind::myopic || table == nullptr ? 0.0 : table->at(belief);
        };
        const double nosense = expected_reward_nosense(l, b) +
                               discount * future(predict(b, channel.transition).busy_prob);
        double sense = expected_reward_sense(l, b, channel.sensor, channel.sensing_cost);
        for (int z = 0; z < 2; ++z) {
            const double pr = outcome_prob(b, channel.sensor, z == 1);
            if (pr > 0.0) {
                const Belief post = correct(b, channel.sensor, z == 1);
                sense += discount * pr * future(predict(post, channel.transition).busy_prob);
            }
        }
        return sense > nosense;
    }
    }
    return false;
}

ValueTable horizon1_table(const SensingContext& ctx, int grid_intervals) {
    return bellman_backup(zero_table(grid_intervals), ctx);
}

void validate(const SensingNumerics& n) {
    if (n.grid_intervals < 1 || n.tolerance <= 0.0 || n.max_iters < 1 || n.fading_draws < 1)
        throw std::invalid_argument("sensing numerics must all be positive");
}

int DecisionMap::count(MapRegion r) const {
    int n = 0;
    for (MapRegion x : region)
        if (x == r) ++n;
    return n;
}

DecisionMap decision_map(const ChannelModel& channel, double theta,
                         const ValueTable& table, int grid_b, int grid_l,
                         double l_max, double discount) {
    if (grid_b <= 0 || grid_l <= 0 || l_max <= 0.0)
        throw std::invalid_argument("decision_map: bad grid");
    DecisionMap map;
    map.grid_b = grid_b;
    map.grid_l = grid_l;
    map.l_max = l_max;
    map.belief_axis.resize(static_cast<std::size_t>(grid_b));
    map.su_iri_axis.resize(static_cast<std::size_t>(grid_l));
    for (int i = 0; i < grid_b; ++i)
        map.belief_axis[static_cast<std::size_t>(i)] = (i + 0.5) / grid_b;
    for (int j = 0; j < grid_l; ++j)
        map.su_iri_axis[static_cast<std::size_t>(j)] = (j + 0.5) * l_max / grid_l;
    map.region.resize(static_cast<std::size_t>(grid_b) * static_cast<std::size_t>(grid_l));
    for (int i = 0; i < grid_b; ++i) {
        const Belief b{map.belief_axis[static_cast<std::size_t>(i)]};
        for (int j = 0; j < grid_l; ++j) {
            const double lsu = map.su_iri_axis[static_cast<std::size_t>(j)];
            const std::array<double, 2> l{lsu, lsu - theta};
            MapRegion r;
            if (decide(PolicyKind::optimal, &table, l, b, channel, theta, discount))
                r = MapRegion::sense;
            else
                r = expected_reward_nosense(l, b) > 0.0 ? MapRegion::nosense_access
                                                        : MapRegion::nosense_idle;
            map.region[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_l) +
                       static_cast<std::size_t>(j)] = r;
        }
    }
    return map;
}

} // namespace crsense
