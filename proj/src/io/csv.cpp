#include "gaitrad/io/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gaitrad/common.hpp"

namespace gaitrad::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

Foot parse_foot(const std::string& s) {
    if (s == "L") return Foot::Left;
    if (s == "R") return Foot::Right;
    return Foot::Unknown;
}

EventSource parse_source(const std::string& s) {
    if (s == "feet_alg") return EventSource::FeetAlg;
    if (s == "torso_alg") return EventSource::TorsoAlg;
    return EventSource::Truth;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw PipelineError("cannot write: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot read: " + path);
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_events_csv(const std::string& path, const std::vector<GaitEvent>& events) {
    auto out = open_out(path);
    out << "time_s,kind,foot,source\n";
    for (const auto& e : events)
        out << format_double(e.time_s) << ',' << to_string(e.kind) << ',' << to_string(e.foot)
            << ',' << to_string(e.source) << '\n';
}

std::vector<GaitEvent> read_events_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<GaitEvent> events;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() < 4) throw PipelineError("malformed events CSV row: " + line);
        GaitEvent e;
        e.time_s = std::stod(f[0]);
        e.kind = f[1] == "HS" ? EventKind::HeelStrike : EventKind::ToeOff;
        e.foot = parse_foot(f[2]);
        e.source = parse_source(f[3]);
        events.push_back(e);
    }
    return events;
}

void write_records_csv(const std::string& path, const std::vector<StrideRecord>& records) {
    auto out = open_out(path);
    out << "foot,cycle_start_s,cycle_end_s,stride_time_s,step_time_s,stance_time_s,"
           "swing_time_s,double_support_time_s,stride_velocity_mps,step_velocity_mps,"
           "stride_distance_m,step_distance_m,foot_max_velocity_mps,cadence_spm,"
           "temporal_method,spatial_method\n";
    for (const auto& r : records) {
        out << to_string(r.foot) << ',' << format_double(r.cycle_start_s) << ','
            << format_double(r.cycle_end_s) << ',' << opt_str(r.stride_time_s) << ','
            << opt_str(r.step_time_s) << ',' << opt_str(r.stance_time_s) << ','
            << opt_str(r.swing_time_s) << ',' << opt_str(r.double_support_time_s) << ','
            << opt_str(r.stride_velocity_mps) << ',' << opt_str(r.step_velocity_mps) << ','
            << opt_str(r.stride_distance_m) << ',' << opt_str(r.step_distance_m) << ','
            << opt_str(r.foot_max_velocity_mps) << ',' << opt_str(r.cadence_spm) << ','
            << r.temporal_method << ',' << r.spatial_method << '\n';
    }
}

std::vector<StrideRecord> read_records_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<StrideRecord> records;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() < 16) throw PipelineError("malformed records CSV row: " + line);
        StrideRecord r;
        r.foot = parse_foot(f[0]);
        r.cycle_start_s = std::stod(f[1]);
        r.cycle_end_s = std::stod(f[2]);
        r.stride_time_s = parse_opt(f[3]);
        r.step_time_s = parse_opt(f[4]);
        r.stance_time_s = parse_opt(f[5]);
        r.swing_time_s = parse_opt(f[6]);
        r.double_support_time_s = parse_opt(f[7]);
        r.stride_velocity_mps = parse_opt(f[8]);
        r.step_velocity_mps = parse_opt(f[9]);
        r.stride_distance_m = parse_opt(f[10]);
        r.step_distance_m = parse_opt(f[11]);
        r.foot_max_velocity_mps = parse_opt(f[12]);
        r.cadence_spm = parse_opt(f[13]);
        r.temporal_method = f[14];
        r.spatial_method = f[15];
        records.push_back(r);
    }
    return records;
}

void write_errors_csv(const std::string& path, const std::vector<stats::ErrorRecord>& errors) {
    auto out = open_out(path);
    out << "parameter,truth,estimate,abs_err,rel_err,group,configuration\n";
    for (const auto& e : errors) {
        out << e.parameter << ',' << format_double(e.truth) << ',' << format_double(e.estimate)
            << ',' << format_double(e.abs_err) << ','
            << (e.rel_err ? format_double(*e.rel_err) : std::string()) << ',' << e.group << ','
            << e.configuration << '\n';
    }
}

std::vector<stats::ErrorRecord> read_errors_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<stats::ErrorRecord> errors;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() < 7) throw PipelineError("malformed errors CSV row: " + line);
        stats::ErrorRecord e;
        e.parameter = f[0];
        e.truth = std::stod(f[1]);
        e.estimate = std::stod(f[2]);
        e.abs_err = std::stod(f[3]);
        e.rel_err = parse_opt(f[4]);
        e.group = f[5];
        e.configuration = f[6];
        errors.push_back(e);
    }
    return errors;
}

}  // namespace gaitrad::io
