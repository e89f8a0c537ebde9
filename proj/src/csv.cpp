#include "crsense/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crsense {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("bad numeric field: '" + s + "'");
    return v;
}

int to_int(const std::string& s) { return static_cast<int>(to_double(s)); }

struct CsvReader {
    std::ifstream in;
    std::vector<std::string> header;
    explicit CsvReader(const std::string& path) : in(open_in(path)) {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
        header = split(line);
    }
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            fields = split(line);
            return true;
        }
        return false;
    }
};

} // namespace

void write_duals(const std::string& path, const DualState& duals) {
    auto out = open_out(path);
    out << "kind,index,value\n";
    for (std::size_t m = 0; m < duals.power_price.size(); ++m)
        out << "power," << m << "," << format_double(duals.power_price[m]) << "\n";
    for (std::size_t k = 0; k < duals.interference_price.size(); ++k)
        out << "interference," << k << "," << format_double(duals.interference_price[k]) << "\n";
}

DualState load_duals(const std::string& path) {
    CsvReader r(path);
    DualState d;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 3) throw std::runtime_error("malformed duals row in " + path);
        const auto idx = static_cast<std::size_t>(to_int(f[1]));
        auto& vec = f[0] == "power" ? d.power_price : d.interference_price;
        if (f[0] != "power" && f[0] != "interference")
            throw std::runtime_error("unknown dual kind '" + f[0] + "' in " + path);
        if (vec.size() <= idx) vec.resize(idx + 1, 0.0);
        vec[idx] = to_double(f[2]);
    }
    return d;
}

void write_value_table(const std::string& path, const ValueTable& table) {
    auto out = open_out(path);
    out << "belief,value\n";
    const int n = table.intervals();
    for (int i = 0; i <= n; ++i)
        out << format_double(static_cast<double>(i) / n) << ","
            << format_double(table.values[static_cast<std::size_t>(i)]) << "\n";
}

ValueTable load_value_table(const std::string& path) {
    CsvReader r(path);
    ValueTable t;
    std::vector<std::string> f;
    double prev = -1.0;
    while (r.next(f)) {
        if (f.size() != 2) throw std::runtime_error("malformed value row in " + path);
        const double b = to_double(f[0]);
        if (b <= prev) throw std::runtime_error("value grid must be ascending in " + path);
        prev = b;
        t.values.push_back(to_double(f[1]));
    }
    if (t.values.size() < 2) throw std::runtime_error("value table too small in " + path);
    return t;
}

void write_training_trace(const std::string& path, const std::vector<TraceRow>& rows) {
    auto out = open_out(path);
    out << "round,iter,user_or_channel,multiplier,measured,target\n";
    for (const auto& row : rows)
        out << row.round << "," << row.iter << "," << row.which << ","
            << format_double(row.multiplier) << "," << format_double(row.measured) << ","
            << format_double(row.target) << "\n";
}

std::vector<TraceRow> load_training_trace(const std::string& path) {
    CsvReader r(path);
    std::vector<TraceRow> rows;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 6) throw std::runtime_error("malformed trace row in " + path);
        rows.push_back({to_int(f[0]), to_int(f[1]), f[2], to_double(f[3]), to_double(f[4]),
                        to_double(f[5])});
    }
    return rows;
}

MetricsRow metrics_row(const std::string& policy, double axis_value, const RunMetrics& m) {
    MetricsRow row;
    row.policy = policy;
    row.axis_value = axis_value;
    row.utility_total = m.utility_total;
    row.utility_su = m.utility_su;
    row.sensing_cost = m.sensing_cost;
    row.avg_power = m.avg_power;
    row.interference = m.interference;
    row.ci_halfwidth = m.ci_utility_total;
    return row;
}

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows) {
    auto out = open_out(path);
    if (rows.empty()) throw std::invalid_argument("write_metrics: no rows");
    out << "policy,axis_value,U_T,U_SU,sense_cost";
    for (std::size_t m = 0; m < rows.front().avg_power.size(); ++m) out << ",power_user_" << m;
    for (std::size_t k = 0; k < rows.front().interference.size(); ++k) out << ",interf_ch_" << k;
    out << ",ci_halfwidth\n";
    for (const auto& row : rows) {
        out << row.policy << "," << format_double(row.axis_value) << ","
            << format_double(row.utility_total) << "," << format_double(row.utility_su) << ","
            << format_double(row.sensing_cost);
        for (double p : row.avg_power) out << "," << format_double(p);
        for (double i : row.interference) out << "," << format_double(i);
        out << "," << format_double(row.ci_halfwidth) << "\n";
    }
}

std::vector<MetricsRow> load_metrics(const std::string& path) {
    CsvReader r(path);
    std::size_t n_users = 0, n_channels = 0;
    for (const auto& name : r.header) {
        if (name.rfind("power_user_", 0) == 0) ++n_users;
        if (name.rfind("interf_ch_", 0) == 0) ++n_channels;
    }
    std::vector<MetricsRow> rows;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 6 + n_users + n_channels)
            throw std::runtime_error("malformed metrics row in " + path);
        MetricsRow row;
        row.policy = f[0];
        row.axis_value = to_double(f[1]);
        row.utility_total = to_double(f[2]);
        row.utility_su = to_double(f[3]);
        row.sensing_cost = to_double(f[4]);
        std::size_t pos = 5;
        for (std::size_t m = 0; m < n_users; ++m) row.avg_power.push_back(to_double(f[pos++]));
        for (std::size_t k = 0; k < n_channels; ++k)
            row.interference.push_back(to_double(f[pos++]));
        row.ci_halfwidth = to_double(f[pos]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_map(const std::string& path, const DecisionMap& map) {
    auto out = open_out(path);
    out << "B,L_SU,region\n";
    for (int i = 0; i < map.grid_b; ++i)
        for (int j = 0; j < map.grid_l; ++j)
            out << format_double(map.belief_axis[static_cast<std::size_t>(i)]) << ","
                << format_double(map.su_iri_axis[static_cast<std::size_t>(j)]) << ","
                << static_cast<int>(
                       map.region[static_cast<std::size_t>(i) * static_cast<std::size_t>(map.grid_l) +
                                  static_cast<std::size_t>(j)])
                << "\n";
}

DecisionMap load_map(const std::string& path) {
    CsvReader r(path);
    DecisionMap map;
    std::vector<std::string> f;
    std::vector<double> b_axis, l_axis;
    std::vector<int> regions;
    while (r.next(f)) {
        if (f.size() != 3) throw std::runtime_error("malformed map row in " + path);
        const double b = to_double(f[0]);
        const double l = to_double(f[1]);
        if (b_axis.empty() || b != b_axis.back()) b_axis.push_back(b);
        if (b_axis.size() == 1) l_axis.push_back(l);
        regions.push_back(to_int(f[2]));
    }
    map.grid_b = static_cast<int>(b_axis.size());
    map.grid_l = static_cast<int>(l_axis.size());
    map.belief_axis = b_axis;
    map.su_iri_axis = l_axis;
    map.l_max = l_axis.empty() ? 0.0 : l_axis.back() * 2.0 * map.grid_l / (2.0 * map.grid_l - 1);
    if (regions.size() != static_cast<std::size_t>(map.grid_b) * static_cast<std::size_t>(map.grid_l))
        throw std::runtime_error("map grid is ragged in " + path);
    map.region.reserve(regions.size());
    for (int v : regions) map.region.push_back(static_cast<MapRegion>(v));
    return map;
}

void write_slot_trace(const std::string& path, const std::vector<SlotRecord>& records) {
    auto out = open_out(path);
    const std::size_t n_users = records.empty() || records.front().gains.empty()
                                    ? 0
                                    : records.front().gains.front().size();
    out << "rep,slot,channel,a,B_pre,B_post,s,z,winner,power,reward,interfered";
    for (std::size_t m = 0; m < n_users; ++m) out << ",h_" << m;
    out << "\n";
    for (const auto& rec : records)
        for (std::size_t k = 0; k < rec.occupancy.size(); ++k) {
            out << rec.replication << "," << rec.slot << "," << k << "," << rec.occupancy[k]
                << "," << format_double(rec.pre_belief[k]) << ","
                << format_double(rec.post_belief[k]) << "," << rec.sensed[k] << ","
                << rec.outcome[k] << "," << rec.winner[k] << "," << format_double(rec.power[k])
                << "," << format_double(rec.reward[k]) << "," << rec.interfered[k];
            for (std::size_t m = 0; m < n_users; ++m)
                out << "," << format_double(rec.gains[k][m]);
            out << "\n";
        }
}

std::vector<TraceSlotRow> load_slot_trace(const std::string& path) {
    CsvReader r(path);
    const std::size_t n_users = r.header.size() - 12;
    std::vector<TraceSlotRow> rows;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 12 + n_users) throw std::runtime_error("malformed trace row in " + path);
        TraceSlotRow row;
        row.replication = to_int(f[0]);
        row.slot = to_int(f[1]);
        row.channel = to_int(f[2]);
        row.occupancy = to_int(f[3]);
        row.pre_belief = to_double(f[4]);
        row.post_belief = to_double(f[5]);
        row.sensed = to_int(f[6]);
        row.outcome = to_int(f[7]);
        row.winner = to_int(f[8]);
        row.power = to_double(f[9]);
        row.reward = to_double(f[10]);
        row.interfered = to_int(f[11]);
        for (std::size_t m = 0; m < n_users; ++m) row.gains.push_back(to_double(f[12 + m]));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace crsense
