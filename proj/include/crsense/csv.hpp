#pragma once

#include "crsense/duals.hpp"
#include "crsense/ra.hpp"
#include "crsense/sensing.hpp"
#include "crsense/sim.hpp"

#include <string>
#include <vector>

namespace crsense {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// duals.csv: kind,index,value with kind in {power, interference}
void write_duals(const std::string& path, const DualState& duals);
DualState load_duals(const std::string& path);

// value table: belief,value on a uniform ascending grid
void write_value_table(const std::string& path, const ValueTable& table);
ValueTable load_value_table(const std::string& path);

// training trace: round,iter,user_or_channel,multiplier,measured,target
void write_training_trace(const std::string& path, const std::vector<TraceRow>& rows);
std::vector<TraceRow> load_training_trace(const std::string& path);

/// One row of a metrics table; axis_value is NaN outside sweeps.
struct MetricsRow {
    std::string policy;
    double axis_value = 0.0;
    double utility_total = 0.0;
    double utility_su = 0.0;
    double sensing_cost = 0.0;
    std::vector<double> avg_power;
    std::vector<double> interference;
    double ci_halfwidth = 0.0;
};

MetricsRow metrics_row(const std::string& policy, double axis_value, const RunMetrics& m);

// metrics: policy,axis_value,U_T,U_SU,sense_cost,power_user_m...,interf_ch_k...,ci_halfwidth
void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> load_metrics(const std::string& path);

// decision map: B,L_SU,region with region in {0,1,2}
void write_map(const std::string& path, const DecisionMap& map);
DecisionMap load_map(const std::string& path);

/// Flattened per-(replication, slot, channel) trace row.
struct TraceSlotRow {
    int replication = 0;
    int slot = 0;
    int channel = 0;
    int occupancy = 0;
    double pre_belief = 0.0;
    double post_belief = 0.0;
    int sensed = 0;
    int outcome = -1;
    int winner = -1;
    double power = 0.0;
    double reward = 0.0;
    int interfered = 0;
    std::vector<double> gains; ///< per user
};

void write_slot_trace(const std::string& path, const std::vector<SlotRecord>& records);
std::vector<TraceSlotRow> load_slot_trace(const std::string& path);

} // namespace crsense
