#pragma once

// Independent reference computations used to check the library: exhaustive
// HMM posterior enumeration, dense grid search for the power allocation and
// explicit expectimax tree evaluation for the sensing recursion. These stay
// deliberately naive (full 2-vectors, no caching) so they share as little
// arithmetic as possible with the code under test.

#include "crsense/belief.hpp"
#include "crsense/sensing.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

struct SlotObservation {
    bool sensed = false;
    bool outcome = false; ///< meaningful only when sensed
};

using Vec2 = std::array<double, 2>; // [idle mass, busy mass]

inline Vec2 transition_apply(const crsense::TransitionModel& m, const Vec2& v) {
    // column-stochastic, columns indexed by the previous state
    return {(1.0 - m.idle_to_busy) * v[0] + m.busy_to_idle * v[1],
            m.idle_to_busy * v[0] + (1.0 - m.busy_to_idle) * v[1]};
}

inline Vec2 sensor_apply(const crsense::SensorModel& s, bool z, const Vec2& v) {
    if (z) return {s.false_alarm * v[0], (1.0 - s.miss_detect) * v[1]};
    return {(1.0 - s.false_alarm) * v[0], s.miss_detect * v[1]};
}

/// Posterior Pr(a_t = 1 | observations up to horizon) by brute-force
/// enumeration over all state trajectories a_0..a_t.
inline double hmm_posterior(const crsense::TransitionModel& trans,
                            const crsense::SensorModel& sensor, double prior_busy,
                            const std::vector<SlotObservation>& obs, int t,
                            int evidence_upto) {
    const int len = t + 1;
    double mass_busy = 0.0, mass_total = 0.0;
    for (std::uint32_t path = 0; path < (1u << len); ++path) {
        double w = 1.0;
        int prev = -1;
        for (int i = 0; i < len; ++i) {
            const int a = (path >> i) & 1;
            if (i == 0)
                w *= a ? prior_busy : 1.0 - prior_busy;
            else {
                const double p_busy =
                    prev ? 1.0 - trans.busy_to_idle : trans.idle_to_busy;
                w *= a ? p_busy : 1.0 - p_busy;
            }
            if (i <= evidence_upto && obs[static_cast<std::size_t>(i)].sensed) {
                const bool z = obs[static_cast<std::size_t>(i)].outcome;
                if (a)
                    w *= z ? 1.0 - sensor.miss_detect : sensor.miss_detect;
                else
                    w *= z ? sensor.false_alarm : 1.0 - sensor.false_alarm;
            }
            prev = a;
        }
        mass_total += w;
        if ((path >> t) & 1) mass_busy += w;
    }
    return mass_busy / mass_total;
}

inline double power_objective(double p, double h, double beta, double pi, double gap) {
    return beta * std::log2(1.0 + h * p / gap) - pi * p;
}

/// Best objective over a dense power grid on [0, hi].
inline double grid_search_power(double h, double beta, double pi, double gap, double hi,
                                int points) {
    double best = 0.0; // p = 0 is always feasible and scores 0
    for (int i = 1; i <= points; ++i) {
        const double p = hi * static_cast<double>(i) / points;
        best = std::max(best, power_objective(p, h, beta, pi, gap));
    }
    return best;
}

inline double interp(const std::vector<double>& table, double x) {
    const int n = static_cast<int>(table.size()) - 1;
    double pos = std::min(std::max(x, 0.0), 1.0) * n;
    int i = static_cast<int>(pos);
    if (i >= n) i = n - 1;
    const double w = pos - i;
    return table[static_cast<std::size_t>(i)] * (1.0 - w) +
           table[static_cast<std::size_t>(i) + 1] * w;
}

/// Finite-horizon expectimax over the sense/outcome tree, evaluated per grid
/// point with explicit vector algebra. Depth d uses the depth d-1 grid as
/// its continuation value through the same linear interpolation operator.
inline std::vector<double> expectimax_table(const crsense::SensingContext& ctx,
                                            int grid_intervals, int depth) {
    std::vector<double> prev(static_cast<std::size_t>(grid_intervals) + 1, 0.0);
    for (int d = 0; d < depth; ++d) {
        std::vector<double> cur(prev.size());
        for (int i = 0; i <= grid_intervals; ++i) {
            const double busy = static_cast<double>(i) / grid_intervals;
            const Vec2 b{1.0 - busy, busy};
            double acc = 0.0;
            for (double lsu : ctx.su_best) {
                const Vec2 l{lsu, lsu - ctx.theta};

                const double instant0 = std::max(0.0, l[0] * b[0] + l[1] * b[1]);
                const Vec2 next0 = transition_apply(ctx.transition, b);
                const double branch0 = instant0 + ctx.discount * interp(prev, next0[1]);

                double branch1 = -ctx.sensing_cost;
                for (int z = 0; z < 2; ++z) {
                    const Vec2 dzb = sensor_apply(ctx.sensor, z == 1, b);
                    const double pr = dzb[0] + dzb[1];
                    branch1 += std::max(0.0, l[0] * dzb[0] + l[1] * dzb[1]);
                    if (pr > 0.0) {
                        const Vec2 pred = transition_apply(ctx.transition, dzb);
                        branch1 += ctx.discount * pr * interp(prev, pred[1] / pr);
                    }
                }
                acc += std::max(branch0, branch1);
            }
            cur[static_cast<std::size_t>(i)] = acc / static_cast<double>(ctx.su_best.size());
        }
        prev = std::move(cur);
    }
    return prev;
}

} // namespace oracle
