#include <doctest.h>

#include "crsense/rng.hpp"
#include "crsense/sensing.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace crsense;

namespace {

/// Single-user toy channel with a two-point fading sample.
SensingContext toy_context(double discount = 0.8, double cost = 1.0, double theta = 2.0) {
    ChannelModel ch;
    ch.transition = {0.05, 0.02};
    ch.sensor = {0.09, 0.08};
    ch.sensing_cost = cost;
    ch.interference_cap = 0.3;
    ch.snr_db = 0.0;
    FadingSample fading;
    fading.draws = {{1.0}, {4.0}};
    return make_sensing_context(ch, {{1.0, 10.0}}, {0.5}, theta, discount, 1.0, fading);
}

ChannelModel toy_channel(double cost = 1.0) {
    ChannelModel ch;
    ch.transition = {0.05, 0.02};
    ch.sensor = {0.09, 0.08};
    ch.sensing_cost = cost;
    ch.interference_cap = 0.3;
    ch.snr_db = 5.0;
    return ch;
}

} // namespace

TEST_CASE("expected reward without sensing is the clamped dot product") {
    const std::array<double, 2> l{0.586, -1.414};
    CHECK(expected_reward_nosense(l, Belief{0.5}) == 0.0); // 0.586/2 - 1.414/2 < 0
    CHECK(expected_reward_nosense(l, Belief{0.0}) == doctest::Approx(0.586).epsilon(1e-14));
    CHECK(expected_reward_nosense({0.0, -2.0}, Belief{0.3}) == 0.0);
}

TEST_CASE("expected reward with sensing averages over the outcome mass") {
    const SensorModel s{0.09, 0.08};

    // pure belief: the outcome cannot move it, only the cost remains
    CHECK(expected_reward_sense({1.0, 1.0 - 2.0}, Belief{0.0}, s, 0.1) ==
          doctest::Approx(0.9).epsilon(1e-14));

    // interior belief, enumerated by hand over both outcomes
    const PowerRateIri r = su_iri(1.0, 1.0, 0.5, 1.0);
    const std::array<double, 2> l{r.iri, r.iri - 2.0};
    const Belief b{0.5};
    double by_outcomes = -1.0;
    for (bool z : {false, true}) {
        const double pr = outcome_prob(b, s, z);
        const double posterior = correct(b, s, z).busy_prob;
        const double dot = l[0] * (1.0 - posterior) + l[1] * posterior;
        by_outcomes += pr * std::max(0.0, dot);
    }
    CHECK(expected_reward_sense(l, b, s, 1.0) == doctest::Approx(by_outcomes).epsilon(1e-12));
    CHECK(expected_reward_sense(l, b, s, 1.0) == doctest::Approx(-0.78990).epsilon(1e-4));

    // free sensing can only help in expectation
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
        const double lsu = 3.0 * rng.uniform();
        const std::array<double, 2> lr{lsu, lsu - 4.0 * rng.uniform()};
        const Belief br{rng.uniform()};
        const SensorModel sr{0.49 * rng.uniform(), 0.49 * rng.uniform()};
        CHECK(expected_reward_sense(lr, br, sr, 0.0) >=
              expected_reward_nosense(lr, br) - 1e-12);
    }
}

TEST_CASE("backing up a zero table with no attainable reward stays zero") {
    ChannelModel ch = toy_channel();
    FadingSample fading;
    fading.draws = {{0.0}, {0.0}};
    const SensingContext ctx =
        make_sensing_context(ch, {{1.0, 10.0}}, {0.5}, 2.0, 0.8, 1.0, fading);
    const ValueTable out = bellman_backup(zero_table(40), ctx);
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("vanishing discount reduces the backup to the myopic value") {
    SensingContext ctx = toy_context(1e-9);
    const ValueTable out = bellman_backup(zero_table(30), ctx);
    for (int i = 0; i <= 30; ++i) {
        const Belief b{i / 30.0};
        double expect = 0.0;
        for (double lsu : ctx.su_best) {
            const std::array<double, 2> l{lsu, lsu - ctx.theta};
            expect += std::max(expected_reward_nosense(l, b),
                               expected_reward_sense(l, b, ctx.sensor, ctx.sensing_cost));
        }
        expect /= static_cast<double>(ctx.su_best.size());
        CHECK(out.values[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("iterated backups match brute-force expectimax enumeration") {
    const SensingContext ctx = toy_context(0.8);
    const int grid = 51;
    ValueTable table = zero_table(grid);
    for (int d = 0; d < 3; ++d) table = bellman_backup(table, ctx);
    const std::vector<double> tree = oracle::expectimax_table(ctx, grid, 3);
    for (std::size_t i = 0; i < table.values.size(); ++i)
        CHECK(std::abs(table.values[i] - tree[i]) < 1e-8);
}

TEST_CASE("value iteration contracts and converges") {
    const SensingContext ctx = toy_context(0.9);
    const ValueIterationResult res = value_iteration(ctx, 60, 1e-9, 4000);
    REQUIRE(res.converged);
    for (std::size_t i = 1; i < res.deltas.size(); ++i) {
        if (res.deltas[i - 1] <= 1e-10) break;
        CHECK(res.deltas[i] <= (ctx.discount + 0.02) * res.deltas[i - 1] + 1e-13);
    }
    for (double v : res.table.values) CHECK(v >= 0.0);
}

TEST_CASE("converged value function is convex in the belief") {
    const SensingContext ctx = toy_context(0.9);
    const ValueIterationResult res = value_iteration(ctx, 100, 1e-8, 5000);
    const auto& v = res.table.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        CHECK(v[i - 1] + v[i + 1] - 2.0 * v[i] >= -1e-6);
}

TEST_CASE("prohibitive sensing cost collapses to the never-sense value") {
    double cost_bound = 0.0;
    const SensingContext probe = toy_context(0.9);
    for (double lsu : probe.su_best) cost_bound = std::max(cost_bound, lsu);
    const SensingContext ctx = toy_context(0.9, 10.0 * cost_bound + 5.0);
    const ValueIterationResult vi = value_iteration(ctx, 60, 1e-10, 6000);
    const ValueIterationResult never =
        policy_evaluation(PolicyKind::never, nullptr, ctx, 60, 1e-10, 6000);
    REQUIRE(vi.converged);
    REQUIRE(never.converged);
    for (std::size_t i = 0; i < vi.table.values.size(); ++i)
        CHECK(std::abs(vi.table.values[i] - never.table.values[i]) < 1e-9);
}

TEST_CASE("optimal value dominates every fixed baseline policy") {
    const SensingContext ctx = toy_context(0.9);
    const int grid = 60;
    const ValueIterationResult vi = value_iteration(ctx, grid, 1e-9, 5000);
    const ValueTable h1 = horizon1_table(ctx, grid);

    for (PolicyKind kind : {PolicyKind::myopic, PolicyKind::horizon1, PolicyKind::never,
                            PolicyKind::always, PolicyKind::rule_of_thumb}) {
        const ValueTable* dec = kind == PolicyKind::horizon1 ? &h1 : nullptr;
        const ValueIterationResult pe = policy_evaluation(kind, dec, ctx, grid, 1e-9, 5000);
        REQUIRE(pe.converged);
        for (std::size_t i = 0; i < vi.table.values.size(); ++i)
            CHECK(vi.table.values[i] >= pe.table.values[i] - 1e-6);
    }

    // evaluating the greedy rule for the fixed point recovers the fixed point
    const ValueIterationResult self =
        policy_evaluation(PolicyKind::optimal, &vi.table, ctx, grid, 1e-9, 5000);
    for (std::size_t i = 0; i < vi.table.values.size(); ++i)
        CHECK(std::abs(self.table.values[i] - vi.table.values[i]) < 1e-5);
}

TEST_CASE("decide: pure beliefs make sensing pure cost") {
    const ChannelModel ch = toy_channel(0.5);
    const SensingContext ctx = toy_context(0.9, 0.5);
    const ValueIterationResult vi = value_iteration(ctx, 60, 1e-8, 5000);
    for (double lsu : {0.0, 0.4, 2.0, 7.0}) {
        const std::array<double, 2> l{lsu, lsu - 2.0};
        CHECK(!decide(PolicyKind::optimal, &vi.table, l, Belief{0.0}, ch, 2.0, 0.9));
        CHECK(!decide(PolicyKind::optimal, &vi.table, l, Belief{1.0}, ch, 2.0, 0.9));
    }
}

TEST_CASE("decide: free sensing at an uncertain belief is taken") {
    ChannelModel ch = toy_channel(0.0);
    const std::array<double, 2> l{1.0, -1.0};
    CHECK(decide(PolicyKind::myopic, nullptr, l, Belief{0.5}, ch, 2.0, 0.9));
    const SensingContext ctx = toy_context(0.9, 0.0);
    const ValueIterationResult vi = value_iteration(ctx, 60, 1e-8, 5000);
    CHECK(decide(PolicyKind::optimal, &vi.table, l, Belief{0.5}, ch, 2.0, 0.9));
}

TEST_CASE("decide: myopic equals optimal with a zero table, bit for bit") {
    const ChannelModel ch = toy_channel();
    const ValueTable zero = zero_table(80);
    Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        const double lsu = 6.0 * rng.uniform();
        const double theta = 5.0 * rng.uniform();
        const std::array<double, 2> l{lsu, lsu - theta};
        const Belief b{rng.uniform()};
        CHECK(decide(PolicyKind::myopic, nullptr, l, b, ch, theta, 0.95) ==
              decide(PolicyKind::optimal, &zero, l, b, ch, theta, 0.95));
    }
}

TEST_CASE("decide: rule of thumb interval tests") {
    const ChannelModel ch = toy_channel(1.0);
    // indicator below the sensing cost: not worth a measurement
    const std::array<double, 2> l{0.5, 0.5 - 2.0};
    CHECK(!decide(PolicyKind::rule_of_thumb, nullptr, l, Belief{0.5}, ch, 2.0, 0.95));
    // inside both bands
    const std::array<double, 2> l2{1.4, 1.4 - 3.0};
    const Belief a = stationary(ch.transition);
    CHECK(decide(PolicyKind::rule_of_thumb, nullptr, l2, a, ch, 3.0, 0.95));
    // belief too settled: outside the one-measurement band
    CHECK(!decide(PolicyKind::rule_of_thumb, nullptr, l2, Belief{0.999}, ch, 3.0, 0.95));
}

TEST_CASE("decide: table-based policies require a table") {
    const ChannelModel ch = toy_channel();
    CHECK_THROWS_AS(
        decide(PolicyKind::optimal, nullptr, {1.0, -1.0}, Belief{0.5}, ch, 2.0, 0.95),
        std::invalid_argument);
    CHECK_THROWS_AS(
        decide(PolicyKind::horizon1, nullptr, {1.0, -1.0}, Belief{0.5}, ch, 2.0, 0.95),
        std::invalid_argument);
}

TEST_CASE("free sensing dominates inside whole branches of the recursion") {
    const SensingContext ctx = toy_context(0.9, 0.0);
    const ValueIterationResult vi = value_iteration(ctx, 60, 1e-9, 5000);
    const ChannelModel ch = toy_channel(0.0);
    for (int i = 0; i <= 60; ++i) {
        const Belief b{i / 60.0};
        for (double lsu : ctx.su_best) {
            const std::array<double, 2> l{lsu, lsu - ctx.theta};
            double nosense = expected_reward_nosense(l, b) +
                             0.9 * vi.table.at(predict(b, ch.transition).busy_prob);
            double sense = expected_reward_sense(l, b, ctx.sensor, 0.0);
            for (bool z : {false, true}) {
                const double pr = outcome_prob(b, ctx.sensor, z);
                if (pr > 0.0)
                    sense += 0.9 * pr *
                             vi.table.at(predict(correct(b, ctx.sensor, z), ch.transition).busy_prob);
            }
            CHECK(sense >= nosense - 1e-9);
        }
    }
}

TEST_CASE("decision map labels all three regions on a trained channel") {
    const SensingContext ctx = toy_context(0.9, 0.15, 2.5);
    const ValueIterationResult vi = value_iteration(ctx, 100, 1e-8, 5000);
    ChannelModel ch = toy_channel(0.15);
    const DecisionMap map = decision_map(ch, 2.5, vi.table, 60, 60, 4.0, 0.9);
    CHECK(map.count(MapRegion::sense) > 0);
    CHECK(map.count(MapRegion::nosense_access) > 0);
    CHECK(map.count(MapRegion::nosense_idle) > 0);
    CHECK(map.count(MapRegion::sense) + map.count(MapRegion::nosense_access) +
              map.count(MapRegion::nosense_idle) ==
          60 * 60);

    // low-belief cells with positive reward are access cells
    const std::array<double, 2> l{1.0, 1.0 - 2.5};
    CHECK(!decide(PolicyKind::optimal, &vi.table, l, Belief{0.0}, ch, 2.5, 0.9));
    CHECK(expected_reward_nosense(l, Belief{0.0}) > 0.0);

    // zero secondary reward: nothing to gain from sensing or access
    const std::array<double, 2> l0{0.0, -2.5};
    CHECK(!decide(PolicyKind::optimal, &vi.table, l0, Belief{0.4}, ch, 2.5, 0.9));
    CHECK(expected_reward_nosense(l0, Belief{0.4}) == 0.0);
}

TEST_CASE("value table interpolation is exact on nodes and linear between") {
    ValueTable t = zero_table(4);
    t.values = {0.0, 1.0, 0.5, 0.25, 2.0};
    CHECK(t.at(0.25) == doctest::Approx(1.0));
    CHECK(t.at(0.375) == doctest::Approx(0.75));
    CHECK(t.at(-0.5) == doctest::Approx(0.0));
    CHECK(t.at(1.5) == doctest::Approx(2.0));
}
