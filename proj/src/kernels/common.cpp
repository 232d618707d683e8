#include "gaitrad/common.hpp"

#include <algorithm>

namespace gaitrad {

std::vector<double> moving_average(const std::vector<double>& x, std::size_t half_width) {
    const std::size_t n = x.size();
    if (n == 0 || half_width == 0) return x;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        // symmetric shrink at the edges keeps the filter zero-lag
        const std::size_t h = std::min({half_width, i, n - 1 - i});
        double acc = 0.0;
        for (std::size_t j = i - h; j <= i + h; ++j) acc += x[j];
        out[i] = acc / double(2 * h + 1);
    }
    return out;
}

std::vector<double> median_filter(const std::vector<double>& x, std::size_t half_width) {
    const std::size_t n = x.size();
    if (n == 0 || half_width == 0) return x;
    std::vector<double> out(n);
    std::vector<double> win;
    win.reserve(2 * half_width + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half_width, i, n - 1 - i});
        win.assign(x.begin() + long(i - h), x.begin() + long(i + h + 1));
        auto mid = win.begin() + long(win.size() / 2);
        std::nth_element(win.begin(), mid, win.end());
        out[i] = *mid;  // window size is always odd
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty range");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + long(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        auto lower = std::max_element(values.begin(), values.begin() + long(mid));
        m = 0.5 * (m + *lower);
    }
    return m;
}

}  // namespace gaitrad
