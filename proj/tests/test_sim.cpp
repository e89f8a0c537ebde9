#include <doctest.h>

#include "crsense/errors.hpp"
#include "crsense/sim.hpp"

#include <cmath>
#include <map>

using namespace crsense;

namespace {

ScenarioConfig two_channel_scenario() {
    ScenarioConfig s;
    ChannelModel a;
    a.transition = {0.05, 0.02};
    a.sensor = {0.09, 0.08};
    a.sensing_cost = 1.0;
    a.interference_cap = 0.3;
    a.snr_db = 5.0;
    ChannelModel b = a;
    b.sensor = {0.05, 0.03};
    b.sensing_cost = 1.8;
    b.interference_cap = 0.05;
    s.channels = {a, b};
    s.users = {{1.0, 20.0}, {1.0, 16.0}};
    s.discount = 0.95;
    return s;
}

DualState hand_duals(std::size_t users, std::size_t channels, double pi, double theta) {
    return DualState{std::vector<double>(users, pi), std::vector<double>(channels, theta)};
}

} // namespace

TEST_CASE("primitive draws: occupancy, fading and sensor outcomes") {
    // an absorbing idle state never becomes busy
    for (double u : {0.0, 0.3, 0.999})
        CHECK(step_primary(0, TransitionModel{0.0, 0.4}, u) == 0);
    CHECK(step_primary(0, TransitionModel{0.05, 0.02}, 0.04) == 1);
    CHECK(step_primary(0, TransitionModel{0.05, 0.02}, 0.06) == 0);
    CHECK(step_primary(1, TransitionModel{0.05, 0.02}, 0.97) == 1);
    CHECK(step_primary(1, TransitionModel{0.05, 0.02}, 0.985) == 0);

    ChannelModel c;
    c.snr_db = 5.0;
    CHECK(c.mean_gain() == doctest::Approx(3.16227766).epsilon(1e-8));

    ScenarioConfig s = two_channel_scenario();
    Rng rng(1);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += draw_fading(s, rng).gains[0][0];
    CHECK(sum / n == doctest::Approx(3.16227766).epsilon(0.05));

    const SensorModel sensor{0.09, 0.08};
    CHECK(draw_outcome(1, sensor, 0.91));  // busy detected
    CHECK(!draw_outcome(1, sensor, 0.93)); // missed with probability 0.08
    CHECK(draw_outcome(0, sensor, 0.08));  // false alarm below 0.09
    CHECK(!draw_outcome(0, sensor, 0.10));
}

TEST_CASE("default horizon keeps the discounted tail below 1e-4") {
    CHECK(default_horizon(0.95) == 180);
    CHECK(std::pow(0.95, default_horizon(0.95)) < 1e-4);
    CHECK(std::pow(0.95, default_horizon(0.95) - 1) >= 1e-4);
}

TEST_CASE("identical seed and config reproduce metrics bit for bit") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.05, 4.0);
    const RunMetrics a = run(s, duals, {}, PolicyKind::myopic, 120, 8, 77);
    const RunMetrics b = run(s, duals, {}, PolicyKind::myopic, 120, 8, 77);
    CHECK(a.utility_total == b.utility_total);
    CHECK(a.utility_su == b.utility_su);
    CHECK(a.sensing_cost == b.sensing_cost);
    for (std::size_t m = 0; m < a.avg_power.size(); ++m)
        CHECK(a.avg_power[m] == b.avg_power[m]);
    for (std::size_t k = 0; k < a.interference.size(); ++k)
        CHECK(a.interference[k] == b.interference[k]);
}

TEST_CASE("utility accounting identity holds in every run") {
    const ScenarioConfig s = two_channel_scenario();
    for (PolicyKind kind : {PolicyKind::myopic, PolicyKind::always, PolicyKind::never,
                            PolicyKind::rule_of_thumb}) {
        const RunMetrics m = run(s, hand_duals(2, 2, 0.05, 4.0), {}, kind, 100, 6, 5);
        CHECK(m.utility_total ==
              doctest::Approx(m.utility_su - m.sensing_cost).epsilon(1e-9));
    }
}

TEST_CASE("extending the horizon beyond the truncation point changes little") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.05, 4.0);
    const int horizon = default_horizon(s.discount);
    std::vector<SlotRecord> trace;
    const RunMetrics base =
        run(s, duals, {}, PolicyKind::myopic, horizon, 4, 31, &trace);
    const RunMetrics longer = run(s, duals, {}, PolicyKind::myopic, horizon + 80, 4, 31);
    double max_slot_utility = 0.0;
    for (const auto& rec : trace) {
        double slot = 0.0;
        for (std::size_t k = 0; k < rec.reward.size(); ++k) slot += std::abs(rec.reward[k]);
        max_slot_utility = std::max(max_slot_utility, slot);
    }
    CHECK(std::abs(longer.utility_total - base.utility_total) <
          2e-4 * std::max(1.0, max_slot_utility));
}

TEST_CASE("slot records are internally consistent") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.05, 4.0);
    std::vector<SlotRecord> trace;
    run(s, duals, {}, PolicyKind::myopic, 60, 3, 9, &trace);
    REQUIRE(!trace.empty());
    for (const auto& rec : trace) {
        for (std::size_t k = 0; k < rec.occupancy.size(); ++k) {
            // outcome present exactly when the channel was sensed
            CHECK((rec.outcome[k] >= 0) == (rec.sensed[k] == 1));
            // reward recomputed from its parts
            double su_best = 0.0;
            for (std::size_t m = 0; m < s.users.size(); ++m)
                su_best = std::max(su_best, su_iri(rec.gains[k][m], s.users[m].weight,
                                                   duals.power_price[m], s.snr_gap)
                                                .iri);
            const double dot = su_best * (1.0 - rec.post_belief[k]) +
                               (su_best - duals.interference_price[k]) * rec.post_belief[k];
            const double expected = -s.channels[k].sensing_cost * rec.sensed[k] +
                                    std::max(0.0, dot);
            CHECK(rec.reward[k] == doctest::Approx(expected).epsilon(1e-12));
            if (rec.winner[k] < 0) CHECK(rec.power[k] == 0.0);
        }
    }
}

TEST_CASE("runs under one seed share their random inputs across policies") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.05, 4.0);
    std::vector<SlotRecord> ta, tb;
    run(s, duals, {}, PolicyKind::never, 50, 2, 123, &ta);
    run(s, duals, {}, PolicyKind::always, 50, 2, 123, &tb);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].gains == tb[i].gains);
        CHECK(ta[i].occupancy == tb[i].occupancy);
    }
}

TEST_CASE("channel metrics do not depend on other channels' parameters") {
    ScenarioConfig s1 = two_channel_scenario();
    ScenarioConfig s2 = s1;
    s2.channels[1].sensor = {0.2, 0.2};
    s2.channels[1].sensing_cost = 0.1;
    const DualState duals = hand_duals(2, 2, 0.05, 4.0);
    std::vector<SlotRecord> ta, tb;
    run(s1, duals, {}, PolicyKind::myopic, 80, 4, 55, &ta);
    run(s2, duals, {}, PolicyKind::myopic, 80, 4, 55, &tb);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].pre_belief[0] == tb[i].pre_belief[0]);
        CHECK(ta[i].post_belief[0] == tb[i].post_belief[0]);
        CHECK(ta[i].sensed[0] == tb[i].sensed[0]);
        CHECK(ta[i].winner[0] == tb[i].winner[0]);
        CHECK(ta[i].reward[0] == tb[i].reward[0]);
    }
}

TEST_CASE("never-sensing on a certainly idle channel transmits without interference") {
    ScenarioConfig s = two_channel_scenario();
    s.channels.resize(1);
    s.users.resize(1);
    s.channels[0].transition = {0.0, 0.3}; // idle is absorbing, stationary is idle
    const RunMetrics m = run(s, hand_duals(1, 1, 0.05, 4.0), {}, PolicyKind::never, 100, 5, 3);
    CHECK(m.interference[0] == 0.0);
    CHECK(m.avg_power[0] > 0.0);
    CHECK(m.sensing_rate == 0.0);
}

TEST_CASE("posterior beliefs are calibrated against realized occupancy") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.04, 6.0);
    std::vector<SlotRecord> trace;
    run(s, duals, {}, PolicyKind::always, 150, 20, 2718, &trace);

    std::map<int, std::pair<double, double>> bins; // bin -> (count, busy count)
    for (const auto& rec : trace)
        for (std::size_t k = 0; k < rec.occupancy.size(); ++k) {
            const int bin = std::min(19, static_cast<int>(rec.post_belief[k] / 0.05));
            bins[bin].first += 1.0;
            bins[bin].second += rec.occupancy[k];
        }
    for (const auto& [bin, stat] : bins) {
        if (stat.first < 200.0) continue;
        const double center = 0.05 * bin + 0.025;
        const double freq = stat.second / stat.first;
        // occupancy is Markov, so use a conservative effective sample size
        const double n_eff = stat.first / 4.0;
        const double sigma = std::sqrt(std::max(center * (1.0 - center), 0.0124) / n_eff);
        CHECK(std::abs(freq - center) <= 3.0 * sigma + 0.025);
    }
}

TEST_CASE("under sensing, access follows the outcome") {
    const ScenarioConfig s = two_channel_scenario();
    const DualState duals = hand_duals(2, 2, 0.04, 6.0);
    std::vector<SlotRecord> trace;
    run(s, duals, {}, PolicyKind::always, 150, 20, 314, &trace);
    double n0 = 0, acc0 = 0, n1 = 0, acc1 = 0;
    for (const auto& rec : trace)
        for (std::size_t k = 0; k < rec.occupancy.size(); ++k) {
            if (!rec.sensed[k]) continue;
            if (rec.outcome[k] == 0) {
                n0 += 1.0;
                acc0 += rec.winner[k] >= 0 ? 1.0 : 0.0;
            } else {
                n1 += 1.0;
                acc1 += rec.winner[k] >= 0 ? 1.0 : 0.0;
            }
        }
    REQUIRE(n0 > 100);
    REQUIRE(n1 > 100);
    CHECK(acc0 / n0 > acc1 / n1 + 0.2);
}

TEST_CASE("table-based policies reject a run without tables") {
    const ScenarioConfig s = two_channel_scenario();
    CHECK_THROWS_AS(run(s, hand_duals(2, 2, 0.05, 4.0), {}, PolicyKind::optimal, 50, 2, 1),
                    MissingArtifactError);
}

TEST_CASE("sweep axes perturb the scenario as documented") {
    const ScenarioConfig base = two_channel_scenario();

    const ScenarioConfig iid = apply_axis(base, SweepAxis::transition_time, 1.0);
    for (std::size_t k = 0; k < iid.channels.size(); ++k) {
        const auto& t = iid.channels[k].transition;
        CHECK(1.0 - t.idle_to_busy - t.busy_to_idle == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(stationary(t).busy_prob ==
              doctest::Approx(stationary(base.channels[k].transition).busy_prob));
    }
    const ScenarioConfig slow = apply_axis(base, SweepAxis::transition_time, 50.0);
    CHECK(stationary(slow.channels[0].transition).busy_prob ==
          doctest::Approx(5.0 / 7.0).epsilon(1e-12));
    CHECK(slow.channels[0].transition.idle_to_busy == doctest::Approx(5.0 / 7.0 / 50.0));

    const ScenarioConfig free = apply_axis(base, SweepAxis::sensing_cost, 0.0);
    for (const auto& c : free.channels) CHECK(c.sensing_cost == 0.0);

    const ScenarioConfig noisy = apply_axis(base, SweepAxis::error_prob, 2.0);
    CHECK(noisy.channels[0].sensor.false_alarm == doctest::Approx(0.18));
    CHECK(noisy.channels[0].sensor.miss_detect == doctest::Approx(0.16));
    CHECK_THROWS_AS(apply_axis(base, SweepAxis::error_prob, 20.0), std::invalid_argument);

    const ScenarioConfig strong = apply_axis(base, SweepAxis::snr, 10.0);
    for (const auto& c : strong.channels) CHECK(c.snr_db == 10.0);

    CHECK_THROWS_AS(axis_from_name("bogus"), std::invalid_argument);
    CHECK(axis_from_name("snr") == SweepAxis::snr);
}
