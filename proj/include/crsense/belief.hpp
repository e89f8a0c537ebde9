#pragma once

#include <array>

namespace crsense {

/// Two-state occupancy chain for one primary user. State 0 = idle, 1 = busy.
/// The induced 2x2 matrix is column-stochastic with columns indexed by the
/// previous state, so each column sums to one by construction.
struct TransitionModel {
    double idle_to_busy = 0.0; ///< Pr(busy at n | idle at n-1)
    double busy_to_idle = 0.0; ///< Pr(idle at n | busy at n-1)
};

/// Binary sensor with asymmetric error rates.
struct SensorModel {
    double false_alarm = 0.0; ///< Pr(z=1 | idle)
    double miss_detect = 0.0; ///< Pr(z=0 | busy)
};

/// Probability that the channel is busy. The vector form [1-B, B] is
/// materialized on demand; the state itself is one-dimensional.
struct Belief {
    double busy_prob = 0.0;

    std::array<double, 2> vec() const { return {1.0 - busy_prob, busy_prob}; }
};

void validate(const TransitionModel& m);
void validate(const SensorModel& s);
void validate(const Belief& b);

/// Time update: propagate a post-decision belief one slot forward through
/// the occupancy chain. Output is clamped to [0,1] to guard float drift.
Belief predict(const Belief& prior, const TransitionModel& model);

/// Probability of sensor outcome z given a belief, 1^T D_z b.
/// outcome_prob(b,s,0) + outcome_prob(b,s,1) == 1.
double outcome_prob(const Belief& prior, const SensorModel& sensor, bool outcome);

/// Measurement update of a Bayesian recursive estimator: D_z b normalized
/// by the outcome probability. Throws std::domain_error on zero-probability
/// evidence (only reachable with exact-zero error rates and a contradictory
/// pure belief).
Belief correct(const Belief& prior, const SensorModel& sensor, bool outcome);

/// Stationary busy probability, the principal eigenvector of the chain.
/// Throws std::domain_error when both transition probabilities are zero
/// (reducible chain, no unique stationary distribution).
Belief stationary(const TransitionModel& model);

} // namespace crsense
