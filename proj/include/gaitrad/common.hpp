#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitrad {

using cdouble = std::complex<double>;
using cfloat = std::complex<float>;

constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Thrown when an operation's preconditions are violated.
class PipelineError : public std::runtime_error {
  public:
    explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

// Centered moving average; the window shrinks symmetrically at the edges so
// the output has no phase lag and the same length as the input.
std::vector<double> moving_average(const std::vector<double>& x, std::size_t half_width);

// Centered running median with the same edge behavior as moving_average.
std::vector<double> median_filter(const std::vector<double>& x, std::size_t half_width);

double median(std::vector<double> values);

}  // namespace gaitrad
