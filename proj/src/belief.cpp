#include "crsense/belief.hpp"

#include <algorithm>
#include <stdexcept>

namespace crsense {

namespace {
bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }
} // namespace

void validate(const TransitionModel& m) {
    if (!is_prob(m.idle_to_busy) || !is_prob(m.busy_to_idle))
        throw std::invalid_argument("transition probabilities must lie in [0,1]");
}

void validate(const SensorModel& s) {
    if (!(s.false_alarm >= 0.0 && s.false_alarm < 1.0) ||
        !(s.miss_detect >= 0.0 && s.miss_detect < 1.0))
        throw std::invalid_argument("sensor error rates must lie in [0,1)");
}

void validate(const Belief& b) {
    if (!is_prob(b.busy_prob))
        throw std::invalid_argument("belief must lie in [0,1]");
}

Belief predict(const Belief& prior, const TransitionModel& model) {
    // Second row of P b: Pr(busy) = P10 (1-B) + P11 B.
    const double b = model.idle_to_busy * (1.0 - prior.busy_prob) +
                     (1.0 - model.busy_to_idle) * prior.busy_prob;
    return Belief{std::clamp(b, 0.0, 1.0)};
}

double outcome_prob(const Belief& prior, const SensorModel& sensor, bool outcome) {
    const double idle = 1.0 - prior.busy_prob;
    const double busy = prior.busy_prob;
    if (outcome)
        return sensor.false_alarm * idle + (1.0 - sensor.miss_detect) * busy;
    return (1.0 - sensor.false_alarm) * idle + sensor.miss_detect * busy;
}

Belief correct(const Belief& prior, const SensorModel& sensor, bool outcome) {
    const double denom = outcome_prob(prior, sensor, outcome);
    if (denom <= 0.0)
        throw std::domain_error("degenerate evidence: outcome has zero probability under belief");
    const double busy_mass = outcome ? (1.0 - sensor.miss_detect) * prior.busy_prob
                                     : sensor.miss_detect * prior.busy_prob;
    return Belief{std::clamp(busy_mass / denom, 0.0, 1.0)};
}

Belief stationary(const TransitionModel& model) {
    const double rate = model.idle_to_busy + model.busy_to_idle;
    if (rate <= 0.0)
        throw std::domain_error("reducible chain: both transition probabilities are zero");
    return Belief{model.idle_to_busy / rate};
}

} // namespace crsense
