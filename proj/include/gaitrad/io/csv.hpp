#pragma once

#include <string>
#include <vector>

#include "gaitrad/gait_types.hpp"
#include "gaitrad/stats/stats.hpp"

namespace gaitrad::io {

void write_events_csv(const std::string& path, const std::vector<GaitEvent>& events);
std::vector<GaitEvent> read_events_csv(const std::string& path);

void write_records_csv(const std::string& path, const std::vector<StrideRecord>& records);
std::vector<StrideRecord> read_records_csv(const std::string& path);

void write_errors_csv(const std::string& path, const std::vector<stats::ErrorRecord>& errors);
std::vector<stats::ErrorRecord> read_errors_csv(const std::string& path);

// Full-precision decimal form that round-trips doubles exactly.
std::string format_double(double v);

}  // namespace gaitrad::io
