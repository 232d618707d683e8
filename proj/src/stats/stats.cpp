#include "gaitrad/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaitrad::stats {

namespace {

// Regularized incomplete gamma, series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma, continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

// Incomplete beta continued fraction (Lentz).
double betacf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // front factor is symmetric under (a,b,x) -> (b,a,1-x)
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double chi2_sf(double x, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi2 dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

double t_sf_two_sided(double t, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("t dof must be positive");
    return incbeta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty range");
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / double(v.size() - 1));
}

ErrorRecord error_metrics(double truth, double estimate) {
    if (!std::isfinite(truth) || !std::isfinite(estimate))
        throw std::invalid_argument("error_metrics requires finite inputs");
    ErrorRecord r;
    r.truth = truth;
    r.estimate = estimate;
    r.abs_err = std::abs(truth - estimate);
    if (truth != 0.0) r.rel_err = r.abs_err / std::abs(truth);
    return r;
}

GroupComparison kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis needs at least 2 groups");
    for (const auto& g : groups)
        if (g.empty()) throw std::invalid_argument("kruskal_wallis: empty group");

    struct Tagged {
        double value;
        std::size_t group;
    };
    std::vector<Tagged> all;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (double v : groups[gi]) all.push_back({v, gi});
    const double n = double(all.size());
    std::sort(all.begin(), all.end(),
              [](const Tagged& a, const Tagged& b) { return a.value < b.value; });

    // midranks for ties, plus the tie-correction accumulator
    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double r = 0.5 * (double(i + 1) + double(j));
        const double t = double(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) rank_sum[all[k].group] += r;
        i = j;
    }

    GroupComparison out;
    out.factor = "group";
    for (const auto& g : groups) out.group_sizes.push_back(g.size());

    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) {  // every value identical
        out.h_statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    double h = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        h += rank_sum[gi] * rank_sum[gi] / double(groups[gi].size());
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h /= correction;
    out.h_statistic = std::max(0.0, h);
    out.p_value = out.h_statistic == 0.0
                      ? 1.0
                      : chi2_sf(out.h_statistic, double(groups.size() - 1));
    return out;
}

std::pair<double, double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("pearson needs n >= 3 paired values");
    const double n = double(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    double p = 0.0;
    if (std::abs(r) < 1.0) {
        const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
        p = t_sf_two_sided(t, n - 2.0);
    }
    return {r, p};
}

AgreementSummary bland_altman(const std::vector<std::pair<double, double>>& truth_estimate) {
    if (truth_estimate.size() < 2) throw std::invalid_argument("bland_altman needs n >= 2");
    std::vector<double> diffs, truths, estimates;
    for (const auto& [t, e] : truth_estimate) {
        diffs.push_back(t - e);
        truths.push_back(t);
        estimates.push_back(e);
    }
    AgreementSummary s;
    s.n = truth_estimate.size();
    s.mean_difference = mean(diffs);
    const double sd = sample_sd(diffs);
    s.loa_low = s.mean_difference - 1.96 * sd;
    s.loa_high = s.mean_difference + 1.96 * sd;
    if (s.n >= 3) {
        try {
            const auto [r, p] = pearson(truths, estimates);
            s.pearson_r = r;
            s.pearson_p = p;
        } catch (const std::invalid_argument&) {
            // zero variance: correlation undefined, leave unset
        }
    }
    return s;
}

}  // namespace gaitrad::stats
