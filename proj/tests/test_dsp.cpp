#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "gaitrad/dsp/pipeline.hpp"
#include "test_util.hpp"

using namespace gaitrad;
using namespace gaitrad::dsp;

namespace {

double stats_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

sim::RadarWaveform paper_waveform() {
    sim::RadarWaveform wf;
    wf.f0_hz = 23e9;
    wf.b_hz = 1.4e9;
    wf.tc_s = 625e-6;
    wf.fs_hz = 204.8e3;
    return wf;
}

// cube holding one complex tone per chirp
sim::IqCube tone_cube(const sim::RadarWaveform& wf, std::size_t n_chirps,
                      const std::vector<double>& freqs_hz) {
    sim::IqCube cube;
    cube.n_chirps = n_chirps;
    cube.n_samples = wf.samples_per_chirp();
    cube.data.resize(n_chirps * cube.n_samples);
    for (std::size_t m = 0; m < n_chirps; ++m)
        for (std::size_t i = 0; i < cube.n_samples; ++i) {
            cdouble acc(0.0, 0.0);
            for (double f : freqs_hz) {
                const double ang = 2.0 * kPi * f * double(i) / wf.fs_hz;
                acc += cdouble(std::cos(ang), std::sin(ang));
            }
            cube.data[m * cube.n_samples + i] = cfloat(float(acc.real()), float(acc.imag()));
        }
    return cube;
}

double response_at(const std::vector<double>& taps, double f_norm) {
    cdouble acc(0.0, 0.0);
    for (std::size_t k = 0; k < taps.size(); ++k) {
        const double ang = -2.0 * kPi * f_norm * double(k);
        acc += taps[k] * cdouble(std::cos(ang), std::sin(ang));
    }
    return std::abs(acc);
}

}  // namespace

TEST_CASE("range peak of the 44.8 kHz beat tone lands at 3 m") {
    const auto wf = paper_waveform();
    const auto cube = tone_cube(wf, 4, {44.8e3});
    const auto rtm = range_transform(cube, wf);
    CHECK(rtm.bin_spacing_m == doctest::Approx(kSpeedOfLight / (2.0 * wf.b_hz)).epsilon(1e-12));
    std::size_t peak = 0;
    for (std::size_t b = 1; b < rtm.n_bins; ++b)
        if (std::abs(rtm.frame(0)[b]) > std::abs(rtm.frame(0)[peak])) peak = b;
    CHECK(std::abs(rtm.range_of_bin(peak) - 3.0) <= rtm.bin_spacing_m);
}

TEST_CASE("two tones resolve to their ranges within one cell") {
    const auto wf = paper_waveform();
    const double f1 = wf.beat_frequency_hz(1.5);
    const double f2 = wf.beat_frequency_hz(4.5);
    const auto rtm = range_transform(tone_cube(wf, 2, {f1, f2}), wf);
    // find the two dominant separated peaks
    std::vector<std::pair<double, std::size_t>> mags;
    for (std::size_t b = 0; b < rtm.n_bins; ++b)
        mags.emplace_back(std::abs(rtm.frame(0)[b]), b);
    std::sort(mags.rbegin(), mags.rend());
    const double r_a = rtm.range_of_bin(mags[0].second);
    std::size_t second = 1;
    while (second < mags.size() &&
           std::abs(rtm.range_of_bin(mags[second].second) - r_a) < 3.0 * rtm.bin_spacing_m)
        ++second;
    const double r_b = rtm.range_of_bin(mags[second].second);
    const double lo = std::min(r_a, r_b), hi = std::max(r_a, r_b);
    CHECK(std::abs(lo - 1.5) <= rtm.bin_spacing_m);
    CHECK(std::abs(hi - 4.5) <= rtm.bin_spacing_m);
}

TEST_CASE("all-zero cube transforms to an all-zero matrix") {
    const auto wf = paper_waveform();
    sim::IqCube cube;
    cube.n_chirps = 3;
    cube.n_samples = wf.samples_per_chirp();
    cube.data.assign(cube.n_chirps * cube.n_samples, cfloat(0, 0));
    const auto rtm = range_transform(cube, wf);
    for (const auto& v : rtm.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("range transform rejects non-finite samples and short chirps") {
    const auto wf = paper_waveform();
    auto cube = tone_cube(wf, 2, {1000.0});
    cube.data[5] = cfloat(std::numeric_limits<float>::quiet_NaN(), 0.0f);
    CHECK_THROWS_AS(range_transform(cube, wf), PipelineError);
}

TEST_CASE("range transform is Parseval-consistent") {
    const auto wf = paper_waveform();
    std::mt19937_64 rng(3);
    sim::IqCube cube;
    cube.n_chirps = 8;
    cube.n_samples = wf.samples_per_chirp();
    std::normal_distribution<float> g(0.0f, 1.0f);
    cube.data.resize(cube.n_chirps * cube.n_samples);
    for (auto& v : cube.data) v = cfloat(g(rng), g(rng));
    const auto rtm = range_transform(cube, wf);

    // windowed input energy per chirp must equal output energy
    const std::size_t n = cube.n_samples;
    for (std::size_t m = 0; m < cube.n_chirps; ++m) {
        double in_energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * double(i) / double(n)));
            in_energy += std::norm(std::complex<double>(cube.chirp(m)[i])) * w * w;
        }
        double out_energy = 0.0;
        for (std::size_t b = 0; b < n; ++b) out_energy += std::norm(rtm.frame(m)[b]);
        CHECK(std::abs(out_energy - in_energy) / in_energy < 1e-9);
    }
}

TEST_CASE("pipeline power scales quadratically with input amplitude") {
    const auto wf = paper_waveform();
    auto cube = tone_cube(wf, 3, {30e3});
    auto scaled = cube;
    for (auto& v : scaled.data) v *= 2.0f;
    const auto a = range_transform(cube, wf);
    const auto b = range_transform(scaled, wf);
    double pa = 0.0, pb = 0.0;
    for (const auto& v : a.values) pa += std::norm(v);
    for (const auto& v : b.values) pb += std::norm(v);
    CHECK(pb == doctest::Approx(4.0 * pa).epsilon(1e-9));
}

TEST_CASE("clutter filter suppresses static returns and passes 100 Hz") {
    const double fr = 1600.0;
    const auto taps = clutter_filter_taps(fr);
    CHECK(taps.size() % 2 == 1);
    // exact DC null
    double dc = 0.0;
    for (double t : taps) dc += t;
    CHECK(std::abs(dc) < 1e-12);
    // static suppression >= 40 dB, 100 Hz loss <= 1 dB
    CHECK(linear_to_db(response_at(taps, 0.0) + 1e-300) < -40.0);
    const double loss_100 = -linear_to_db(response_at(taps, 100.0 / fr));
    CHECK(loss_100 < 1.0);
}

TEST_CASE("clutter filter on a matrix removes the static bin") {
    const auto wf = paper_waveform();
    const auto cube = tone_cube(wf, 500, {wf.beat_frequency_hz(3.0)});
    const auto rtm = range_transform(cube, wf);
    const auto filtered = clutter_filter(rtm);
    CHECK(filtered.clutter_filtered);
    CHECK(filtered.n_frames < rtm.n_frames);
    CHECK(filtered.t0_s > rtm.t0_s);
    double before = 0.0, after = 0.0;
    for (std::size_t f = 0; f < filtered.n_frames; ++f)
        for (std::size_t b = 0; b < filtered.n_bins; ++b) {
            before += std::norm(rtm.frame(f)[b]);
            after += std::norm(filtered.frame(f)[b]);
        }
    CHECK(linear_to_db(after / before) < -40.0);
}

TEST_CASE("clutter filter passes a 100 Hz doppler line within 1 dB") {
    const auto wf = paper_waveform();
    const double fr = wf.chirp_rate_hz();
    const std::size_t n_chirps = 1200;
    sim::IqCube cube;
    cube.n_chirps = n_chirps;
    cube.n_samples = wf.samples_per_chirp();
    cube.data.resize(n_chirps * cube.n_samples);
    const double fb = wf.beat_frequency_hz(3.0);
    for (std::size_t m = 0; m < n_chirps; ++m) {
        const double slow_phase = 2.0 * kPi * 100.0 * double(m) / fr;
        for (std::size_t i = 0; i < cube.n_samples; ++i) {
            const double ang = 2.0 * kPi * fb * double(i) / wf.fs_hz + slow_phase;
            cube.data[m * cube.n_samples + i] = cfloat(float(std::cos(ang)), float(std::sin(ang)));
        }
    }
    const auto rtm = range_transform(cube, wf);
    const auto filtered = clutter_filter(rtm);
    const std::size_t settle = (rtm.n_frames - filtered.n_frames) / 2;
    double before = 0.0, after = 0.0;
    for (std::size_t f = 0; f < filtered.n_frames; ++f)
        for (std::size_t b = 0; b < filtered.n_bins; ++b) {
            before += std::norm(rtm.frame(f + settle)[b]);
            after += std::norm(filtered.frame(f)[b]);
        }
    CHECK(std::abs(linear_to_db(after / before)) < 1.0);
}

TEST_CASE("filtering an already filtered matrix is idempotent in the passband") {
    const auto wf = paper_waveform();
    const double fr = wf.chirp_rate_hz();
    const std::size_t n_chirps = 1500;
    sim::IqCube cube;
    cube.n_chirps = n_chirps;
    cube.n_samples = wf.samples_per_chirp();
    cube.data.resize(n_chirps * cube.n_samples);
    const double fb = wf.beat_frequency_hz(2.0);
    for (std::size_t m = 0; m < n_chirps; ++m)
        for (std::size_t i = 0; i < cube.n_samples; ++i) {
            const double ang =
                2.0 * kPi * fb * double(i) / wf.fs_hz + 2.0 * kPi * 150.0 * double(m) / fr;
            cube.data[m * cube.n_samples + i] = cfloat(float(std::cos(ang)), float(std::sin(ang)));
        }
    const auto once = clutter_filter(range_transform(cube, wf));
    const auto twice = clutter_filter(once);
    const std::size_t settle = (once.n_frames - twice.n_frames) / 2;
    double diff = 0.0, ref = 0.0;
    for (std::size_t f = 0; f < twice.n_frames; ++f)
        for (std::size_t b = 0; b < twice.n_bins; ++b) {
            diff += std::norm(twice.frame(f)[b] - once.frame(f + settle)[b]);
            ref += std::norm(once.frame(f + settle)[b]);
        }
    CHECK(diff / ref < 0.05);  // passband ripple only
}

TEST_CASE("clutter filter rejects too-short records and low frame rates") {
    RangeTimeMatrix rtm;
    rtm.n_frames = 10;
    rtm.n_bins = 4;
    rtm.frame_rate_hz = 1600.0;
    rtm.values.assign(40, cdouble(1.0, 0.0));
    CHECK_THROWS_AS(clutter_filter(rtm), PipelineError);
    rtm.frame_rate_hz = 15.0;
    CHECK_THROWS_AS(clutter_filter(rtm), PipelineError);
}

TEST_CASE("target selection finds the single hot bin and rejects noise") {
    RangeTimeMatrix rtm;
    rtm.n_frames = 50;
    rtm.n_bins = 64;
    rtm.frame_rate_hz = 1600.0;
    rtm.clutter_filtered = true;
    rtm.values.assign(rtm.n_frames * rtm.n_bins, cdouble(0.0, 0.0));
    for (std::size_t f = 0; f < rtm.n_frames; ++f) rtm.frame(f)[17] = cdouble(3.0, 0.0);
    const auto mask = select_target_bins(rtm);
    for (std::size_t f = 0; f < rtm.n_frames; ++f) {
        CHECK(mask.spans[f].first == 17);
        CHECK(mask.spans[f].last == 17);
    }

    // pure noise: >= 90% of frames empty at the 12 dB threshold
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    RangeTimeMatrix noise;
    noise.n_frames = 400;
    noise.n_bins = 128;
    noise.frame_rate_hz = 1600.0;
    noise.clutter_filtered = true;
    noise.values.resize(noise.n_frames * noise.n_bins);
    for (auto& v : noise.values) v = cdouble(g(rng), g(rng));
    const auto noise_mask = select_target_bins(noise);
    std::size_t empty = 0;
    for (const auto& s : noise_mask.spans)
        if (s.empty()) ++empty;
    CHECK(double(empty) / double(noise.n_frames) >= 0.9);
}

TEST_CASE("integrate_bins sums the masked bins coherently") {
    RangeTimeMatrix rtm;
    rtm.n_frames = 4;
    rtm.n_bins = 8;
    rtm.frame_rate_hz = 1600.0;
    rtm.clutter_filtered = true;
    rtm.values.assign(32, cdouble(0.0, 0.0));
    for (std::size_t f = 0; f < 4; ++f) {
        rtm.frame(f)[2] = cdouble(1.0, double(f));
        rtm.frame(f)[3] = cdouble(0.5, -1.0);
    }
    TargetMask single;
    single.spans.assign(4, {2, 2});
    const auto s1 = integrate_bins(rtm, single);
    for (std::size_t f = 0; f < 4; ++f) CHECK(s1.values[f] == rtm.frame(f)[2]);

    TargetMask both;
    both.spans.assign(4, {2, 3});
    const auto s2 = integrate_bins(rtm, both);
    for (std::size_t f = 0; f < 4; ++f)
        CHECK(std::abs(s2.values[f] - (rtm.frame(f)[2] + rtm.frame(f)[3])) < 1e-15);

    TargetMask empty;
    empty.spans.assign(4, {});
    const auto s3 = integrate_bins(rtm, empty);
    for (const auto& v : s3.values) CHECK(v == cdouble(0.0, 0.0));
}

TEST_CASE("coherent integration of a split tone beats either single bin") {
    // tone energy split across two adjacent bins plus noise
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.3);
    RangeTimeMatrix rtm;
    rtm.n_frames = 4096;
    rtm.n_bins = 8;
    rtm.frame_rate_hz = 1600.0;
    rtm.clutter_filtered = true;
    rtm.values.resize(rtm.n_frames * rtm.n_bins);
    const double fd = 200.0;
    for (std::size_t f = 0; f < rtm.n_frames; ++f) {
        const double ang = 2.0 * kPi * fd * double(f) / rtm.frame_rate_hz;
        const cdouble tone(std::cos(ang), std::sin(ang));
        for (std::size_t b = 0; b < rtm.n_bins; ++b) rtm.frame(f)[b] = cdouble(g(rng), g(rng));
        rtm.frame(f)[3] += 0.6 * tone;
        rtm.frame(f)[4] += 0.6 * tone;
    }
    auto tone_snr = [&](TargetMask::Span span) {
        TargetMask m;
        m.spans.assign(rtm.n_frames, span);
        const auto s = integrate_bins(rtm, m);
        kernels::Fft fft(4096);
        std::vector<cdouble> spec(4096);
        fft.forward(s.values.data(), spec.data());
        const std::size_t peak = std::size_t(fd / rtm.frame_rate_hz * 4096.0 + 0.5);
        double noise = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = 0; k < 4096; ++k) {
            if (k > peak - 20 && k < peak + 20) continue;
            noise += std::norm(spec[k]);
            ++cnt;
        }
        return std::norm(spec[peak]) / (noise / double(cnt));
    };
    const double joint = tone_snr({3, 4});
    const double solo_a = tone_snr({3, 3});
    const double solo_b = tone_snr({4, 4});
    CHECK(linear_to_db(joint) >= linear_to_db(std::max(solo_a, solo_b)) + 2.0);
}

TEST_CASE("doppler transform places a 200 Hz ridge within one bin") {
    SlowTimeSeries s;
    s.frame_rate_hz = 1600.0;
    s.values.resize(2000);
    for (std::size_t f = 0; f < s.values.size(); ++f) {
        const double ang = 2.0 * kPi * 200.0 * double(f) / s.frame_rate_hz;
        s.values[f] = cdouble(std::cos(ang), std::sin(ang));
    }
    const auto dtm = doppler_transform(s, 23e9);
    CHECK(dtm.n_bins % 2 == 1);
    CHECK(dtm.window_s == doctest::Approx(0.05));
    for (std::size_t f = 0; f < dtm.n_frames; f += 177) {
        std::size_t peak = 0;
        for (std::size_t b = 1; b < dtm.n_bins; ++b)
            if (dtm.frame(f)[b] > dtm.frame(f)[peak]) peak = b;
        CHECK(std::abs(dtm.doppler_of_bin(peak) - 200.0) <= dtm.bin_hz);
    }
}

TEST_CASE("conjugated input mirrors the doppler matrix") {
    std::mt19937_64 rng(17);
    SlowTimeSeries s;
    s.frame_rate_hz = 1600.0;
    s.values = testutil::random_complex(rng, 400);
    auto conj = s;
    for (auto& v : conj.values) v = std::conj(v);
    const auto a = doppler_transform(s, 23e9);
    const auto b = doppler_transform(conj, 23e9);
    for (std::size_t f = 0; f < a.n_frames; ++f)
        for (std::size_t bin = 0; bin < a.n_bins; ++bin)
            CHECK(a.frame(f)[bin] == doctest::Approx(b.frame(f)[a.n_bins - 1 - bin]).epsilon(1e-5));
}

TEST_CASE("constant series concentrates at 0 Hz with Hann sidelobes below -31 dB") {
    SlowTimeSeries s;
    s.frame_rate_hz = 1600.0;
    s.values.assign(300, cdouble(1.0, 0.0));
    const auto dtm = doppler_transform(s, 23e9);
    const int c = dtm.center_bin();
    const double main_power = dtm.frame(0)[std::size_t(c)];
    std::size_t peak = 0;
    for (std::size_t b = 1; b < dtm.n_bins; ++b)
        if (dtm.frame(0)[b] > dtm.frame(0)[peak]) peak = b;
    CHECK(int(peak) == c);
    // beyond the mainlobe (2 * nfft / window bins wide), sidelobes <= -31 dB
    const int mainlobe = 2 * 256 / 80 + 1;
    for (std::size_t b = 0; b < dtm.n_bins; ++b) {
        if (std::abs(int(b) - c) <= mainlobe) continue;
        CHECK(linear_to_db(double(dtm.frame(0)[b]) / main_power + 1e-300) <= -31.0);
    }
}

TEST_CASE("doppler transform rejects series shorter than the window") {
    SlowTimeSeries s;
    s.frame_rate_hz = 1600.0;
    s.values.assign(50, cdouble(1.0, 0.0));  // window is 80 at 1600 Hz
    CHECK_THROWS_AS(doppler_transform(s, 23e9), PipelineError);
}

namespace {

DopplerTimeMatrix synthetic_dtm(std::size_t n_frames, std::size_t n_bins, double ridge_power,
                                std::size_t ridge_bins, std::uint64_t seed) {
    DopplerTimeMatrix dtm;
    dtm.n_frames = n_frames;
    dtm.n_bins = n_bins;
    dtm.bin_hz = 6.25;
    dtm.frame_rate_hz = 1600.0;
    dtm.f0_hz = 23e9;
    dtm.window_s = 0.05;
    dtm.power.resize(n_frames * n_bins);
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    for (auto& v : dtm.power) v = float(ex(rng));
    if (ridge_power > 0.0)
        for (std::size_t f = 0; f < n_frames; ++f)
            for (std::size_t k = 0; k < ridge_bins; ++k)
                dtm.frame(f)[40 + k] = float(ridge_power);
    return dtm;
}

}  // namespace

TEST_CASE("frame snr sits near zero on noise and reads out a 20 dB ridge") {
    const auto noise = synthetic_dtm(600, 255, 0.0, 0, 23);
    const auto snr_noise = estimate_frame_snr(noise);
    CHECK(stats_mean(snr_noise) <= 3.0);

    const auto ridge = synthetic_dtm(600, 255, 100.0, 5, 29);
    const auto snr_ridge = estimate_frame_snr(ridge);
    CHECK(std::abs(stats_mean(snr_ridge) - 20.0) <= 3.0);

    // identical frames give identical estimates
    DopplerTimeMatrix flat = synthetic_dtm(1, 255, 0.0, 0, 31);
    DopplerTimeMatrix many;
    many = flat;
    many.n_frames = 20;
    many.power.clear();
    for (int i = 0; i < 20; ++i)
        many.power.insert(many.power.end(), flat.power.begin(), flat.power.end());
    const auto snr_many = estimate_frame_snr(many);
    for (double v : snr_many) CHECK(v == doctest::Approx(snr_many[0]).epsilon(1e-12));
}

TEST_CASE("frame snr is monotone in the injected ridge power") {
    double last = -1e9;
    for (double power : {2.0, 8.0, 30.0, 120.0, 500.0}) {
        const auto dtm = synthetic_dtm(200, 255, power, 5, 41);
        const auto snr = estimate_frame_snr(dtm);
        const double m = stats_mean(snr);
        CHECK(m >= last);
        last = m;
    }
}

TEST_CASE("doppler-velocity mapping is exact and sign-preserving") {
    CHECK(doppler_to_velocity(0.0, 23e9) == 0.0);
    const double v = doppler_to_velocity(153.3, 23e9);
    CHECK(v == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(doppler_to_velocity(-153.3, 23e9) == -v);
    for (double vv : {-2.5, -0.3, 0.7, 3.1})
        CHECK(doppler_to_velocity(velocity_to_doppler(vv, 23e9), 23e9) ==
              doctest::Approx(vv).epsilon(1e-12));
    CHECK_THROWS_AS(doppler_to_velocity(100.0, 0.0), std::invalid_argument);
}
