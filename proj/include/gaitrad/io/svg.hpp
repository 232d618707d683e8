#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gaitrad::io {

// Scatter of estimate against truth with the dashed identity line.
void write_correlation_svg(const std::string& path, const std::string& title,
                           const std::vector<std::pair<double, double>>& truth_estimate,
                           const std::string& r_label);

// Differences against pair means with the mean line (solid) and the limits
// of agreement (dashed).
void write_bland_altman_svg(const std::string& path, const std::string& title,
                            const std::vector<std::pair<double, double>>& truth_estimate,
                            double mean_diff, double loa_low, double loa_high);

}  // namespace gaitrad::io
