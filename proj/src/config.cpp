#include "crsense/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crsense {

using nlohmann::json;

void validate(const ExperimentSpec& spec) {
    validate(spec.scenario);
    validate(spec.trainer);
    validate(spec.sensing);
    if (spec.sim_slots < 0) throw std::invalid_argument("sim slots must be nonnegative");
    if (spec.sim_replications <= 0)
        throw std::invalid_argument("sim replications must be positive");
}

ExperimentSpec default_table1() {
    ExperimentSpec spec;
    auto& s = spec.scenario;
    s.discount = 0.95;
    s.snr_gap = 1.0;
    // Transition rows are indexed by the previous state:
    // [Pr(idle->idle), Pr(idle->busy); Pr(busy->idle), Pr(busy->busy)].
    const TransitionModel chain{0.05, 0.02};
    s.channels = {
        {chain, SensorModel{0.09, 0.08}, 1.00, 0.30, 5.0},
        {chain, SensorModel{0.09, 0.08}, 1.80, 0.05, 5.0},
        {chain, SensorModel{0.05, 0.03}, 1.00, 0.10, 5.0},
        {chain, SensorModel{0.05, 0.03}, 1.80, 0.10, 5.0},
    };
    s.users = {{1.0, 20.0}, {1.0, 16.0}, {1.0, 18.0}, {1.0, 10.0}};
    return spec;
}

namespace {

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<int>();
}

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig s;
    s.discount = num_or(j, "discount", 0.95);
    s.snr_gap = num_or(j, "snr_gap", 1.0);
    const double global_snr = num_or(j, "snr_db", 1.0);
    s.fixed_gain = j.value("fixed_gain", false);
    if (!j.contains("channels") || !j.at("channels").is_array() || j.at("channels").empty())
        throw std::invalid_argument("scenario.channels must be a nonempty array");
    for (const auto& jc : j.at("channels")) {
        ChannelModel c;
        c.transition.idle_to_busy = num_or(jc, "p_idle_to_busy", 0.0);
        c.transition.busy_to_idle = num_or(jc, "p_busy_to_idle", 0.0);
        c.sensor.false_alarm = num_or(jc, "p_false_alarm", 0.0);
        c.sensor.miss_detect = num_or(jc, "p_miss_detect", 0.0);
        c.sensing_cost = num_or(jc, "sensing_cost", 1.0);
        c.interference_cap = num_or(jc, "interference_cap", 1.0);
        c.snr_db = num_or(jc, "snr_db", global_snr);
        s.channels.push_back(c);
    }
    if (!j.contains("users") || !j.at("users").is_array() || j.at("users").empty())
        throw std::invalid_argument("scenario.users must be a nonempty array");
    for (const auto& ju : j.at("users")) {
        UserConfig u;
        u.weight = num_or(ju, "weight", 1.0);
        u.power_cap = num_or(ju, "power_cap", 1.0);
        s.users.push_back(u);
    }
    if (j.contains("initial_belief"))
        s.initial_belief = j.at("initial_belief").get<std::vector<double>>();
    return s;
}

} // namespace

ExperimentSpec parse_experiment(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        if (!j.contains("scenario"))
            throw std::invalid_argument("config must contain a scenario object");
        spec.scenario = parse_scenario(j.at("scenario"));
        if (j.contains("trainer")) {
            const auto& jt = j.at("trainer");
            spec.trainer.step_size = num_or(jt, "step_size", spec.trainer.step_size);
            spec.trainer.inner_slots = int_or(jt, "inner_slots", spec.trainer.inner_slots);
            spec.trainer.inner_reps = int_or(jt, "inner_reps", spec.trainer.inner_reps);
            spec.trainer.outer_rounds = int_or(jt, "outer_rounds", spec.trainer.outer_rounds);
            spec.trainer.tolerance = num_or(jt, "tolerance", spec.trainer.tolerance);
            spec.trainer.max_dual_iters = int_or(jt, "max_dual_iters", spec.trainer.max_dual_iters);
        }
        if (j.contains("sensing")) {
            const auto& js = j.at("sensing");
            spec.sensing.grid_intervals = int_or(js, "grid_size", spec.sensing.grid_intervals);
            spec.sensing.tolerance = num_or(js, "tolerance", spec.sensing.tolerance);
            spec.sensing.max_iters = int_or(js, "max_iters", spec.sensing.max_iters);
            spec.sensing.fading_draws = int_or(js, "fading_draws", spec.sensing.fading_draws);
        }
        if (j.contains("sim")) {
            const auto& js = j.at("sim");
            spec.sim_slots = int_or(js, "slots", spec.sim_slots);
            spec.sim_replications = int_or(js, "replications", spec.sim_replications);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    validate(spec);
    return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment(buffer.str());
}

std::string experiment_to_json(const ExperimentSpec& spec) {
    json j;
    json js;
    js["discount"] = spec.scenario.discount;
    js["snr_gap"] = spec.scenario.snr_gap;
    if (spec.scenario.fixed_gain) js["fixed_gain"] = true;
    js["channels"] = json::array();
    for (const auto& c : spec.scenario.channels) {
        json jc;
        jc["p_idle_to_busy"] = c.transition.idle_to_busy;
        jc["p_busy_to_idle"] = c.transition.busy_to_idle;
        jc["p_false_alarm"] = c.sensor.false_alarm;
        jc["p_miss_detect"] = c.sensor.miss_detect;
        jc["sensing_cost"] = c.sensing_cost;
        jc["interference_cap"] = c.interference_cap;
        jc["snr_db"] = c.snr_db;
        js["channels"].push_back(jc);
    }
    js["users"] = json::array();
    for (const auto& u : spec.scenario.users)
        js["users"].push_back({{"weight", u.weight}, {"power_cap", u.power_cap}});
    if (!spec.scenario.initial_belief.empty())
        js["initial_belief"] = spec.scenario.initial_belief;
    j["scenario"] = js;
    j["trainer"] = {{"step_size", spec.trainer.step_size},
                    {"inner_slots", spec.trainer.inner_slots},
                    {"inner_reps", spec.trainer.inner_reps},
                    {"outer_rounds", spec.trainer.outer_rounds},
                    {"tolerance", spec.trainer.tolerance},
                    {"max_dual_iters", spec.trainer.max_dual_iters}};
    j["sensing"] = {{"grid_size", spec.sensing.grid_intervals},
                    {"tolerance", spec.sensing.tolerance},
                    {"max_iters", spec.sensing.max_iters},
                    {"fading_draws", spec.sensing.fading_draws}};
    j["sim"] = {{"slots", spec.sim_slots}, {"replications", spec.sim_replications}};
    return j.dump(2) + "\n";
}

} // namespace crsense
