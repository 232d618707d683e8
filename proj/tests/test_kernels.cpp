#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaitrad/kernels/fft.hpp"
#include "gaitrad/kernels/kernels.hpp"
#include "test_util.hpp"

using namespace gaitrad;
using testutil::naive_dft;
using testutil::random_complex;
using testutil::random_real;

namespace {
const std::size_t kSizes[] = {1, 2, 3, 7, 8, 16, 31, 64, 100, 255, 256};
}

TEST_CASE("scalar and simd kernels agree") {
    std::mt19937_64 rng(42);
    for (std::size_t n : kSizes) {
        auto in = random_complex(rng, n);
        auto win = random_real(rng, n);

        std::vector<cdouble> out_s(n), out_v(n);
        kernels::scalar::apply_window(in.data(), win.data(), out_s.data(), n);
        kernels::apply_window(in.data(), win.data(), out_v.data(), n);
        CHECK(testutil::max_abs_diff(out_s, out_v) < 1e-13);

        std::vector<double> mag_s(n), mag_v(n);
        kernels::scalar::magnitude_squared(in.data(), mag_s.data(), n);
        kernels::magnitude_squared(in.data(), mag_v.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(mag_s[i] == doctest::Approx(mag_v[i]).epsilon(1e-13));

        auto acc_s = random_complex(rng, n);
        auto acc_v = acc_s;
        kernels::scalar::accumulate(acc_s.data(), in.data(), n);
        kernels::accumulate(acc_v.data(), in.data(), n);
        CHECK(testutil::max_abs_diff(acc_s, acc_v) == 0.0);

        auto y_s = random_complex(rng, n);
        auto y_v = y_s;
        kernels::scalar::axpy_real(y_s.data(), in.data(), 0.37, n);
        kernels::axpy_real(y_v.data(), in.data(), 0.37, n);
        CHECK(testutil::max_abs_diff(y_s, y_v) < 1e-13);

        std::vector<cdouble> tone_s(n, cdouble(0.1, -0.2)), tone_v(n, cdouble(0.1, -0.2));
        kernels::scalar::add_tone(tone_s.data(), n, 1.7, 0.3, 0.11);
        kernels::add_tone(tone_v.data(), n, 1.7, 0.3, 0.11);
        CHECK(testutil::max_abs_diff(tone_s, tone_v) < 1e-12);
    }
}

TEST_CASE("add_tone matches the direct sin/cos evaluation") {
    std::vector<cdouble> buf(300, cdouble(0.0, 0.0));
    const double amp = 0.8, p0 = 1.234, dp = 0.456;
    kernels::add_tone(buf.data(), buf.size(), amp, p0, dp);
    for (std::size_t k = 0; k < buf.size(); ++k) {
        const cdouble want = amp * cdouble(std::cos(p0 + double(k) * dp), std::sin(p0 + double(k) * dp));
        CHECK(std::abs(buf[k] - want) < 1e-11);
    }
}

TEST_CASE("fft matches the naive dft at mixed sizes") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {std::size_t(8), std::size_t(78), std::size_t(100), std::size_t(128),
                          std::size_t(255), std::size_t(256)}) {
        auto x = random_complex(rng, n);
        auto want = naive_dft(x);
        std::vector<cdouble> got(n);
        kernels::Fft fft(n);
        fft.forward(x.data(), got.data());
        const double scale = std::sqrt(double(n));
        CHECK(testutil::max_abs_diff(want, got) / scale < 1e-10);

        std::vector<cdouble> back(n);
        fft.inverse(got.data(), back.data());
        CHECK(testutil::max_abs_diff(back, x) < 1e-10);
    }
}

TEST_CASE("fft of a pure on-grid tone is a single bin") {
    const std::size_t n = 128;
    std::vector<cdouble> x(n);
    const std::size_t bin = 17;
    for (std::size_t j = 0; j < n; ++j) {
        const double ang = 2.0 * kPi * double(bin) * double(j) / double(n);
        x[j] = cdouble(std::cos(ang), std::sin(ang));
    }
    kernels::Fft fft(n);
    std::vector<cdouble> spec(n);
    fft.forward(x.data(), spec.data());
    for (std::size_t k = 0; k < n; ++k) {
        if (k == bin)
            CHECK(std::abs(spec[k] - cdouble(double(n), 0.0)) < 1e-9);
        else
            CHECK(std::abs(spec[k]) < 1e-9);
    }
}

TEST_CASE("backend reports a known name") {
    const std::string name = kernels::backend_name();
    CHECK((name == "scalar" || name == "avx2"));
    MESSAGE("kernel backend: ", name);
}
