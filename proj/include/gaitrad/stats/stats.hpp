#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gaitrad::stats {

struct ErrorRecord {
    std::string parameter;
    double truth = 0.0;     // P_vic
    double estimate = 0.0;  // P_rad
    double abs_err = 0.0;
    std::optional<double> rel_err;  // absent when truth == 0
    std::string group;
    std::string configuration;
};

struct GroupComparison {
    std::string factor;  // "configuration" | "group"
    double h_statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::size_t> group_sizes;
};

struct AgreementSummary {
    double mean_difference = 0.0;  // mean(truth - estimate)
    double loa_low = 0.0;          // mean - 1.96 * sd
    double loa_high = 0.0;         // mean + 1.96 * sd
    std::optional<double> pearson_r;
    std::optional<double> pearson_p;
    std::size_t n = 0;
};

ErrorRecord error_metrics(double truth, double estimate);

// Rank test with tie correction; p from the chi-squared approximation with
// k-1 degrees of freedom. Identical values across all groups give H=0, p=1.
GroupComparison kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Sample correlation with a two-sided p from the t distribution (n-2 dof).
std::pair<double, double> pearson(const std::vector<double>& x, const std::vector<double>& y);

// Differences truth-estimate against pair means; limits of agreement at
// mean +- 1.96 * sample sd. Correlation fields are filled when computable.
AgreementSummary bland_altman(const std::vector<std::pair<double, double>>& truth_estimate);

// Upper tail of the chi-squared distribution.
double chi2_sf(double x, double dof);

// Two-sided tail of the t distribution.
double t_sf_two_sided(double t, double dof);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

}  // namespace gaitrad::stats
