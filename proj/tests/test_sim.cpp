#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "gaitrad/kernels/fft.hpp"
#include "gaitrad/sim/radar.hpp"
#include "gaitrad/sim/walker.hpp"
#include "test_util.hpp"

using namespace gaitrad;
using namespace gaitrad::sim;

namespace {

WalkerProfile healthy() {
    WalkerProfile w;
    w.stride_time_s = 1.1;
    w.stride_length_m = 1.2;
    w.duty_factor = 0.6;
    w.foot_peak_velocity_mps = 3.0;
    return w;
}

TrialScript straight_walk(int reps = 1, double path = 8.0) {
    TrialScript s;
    s.protocol = Protocol::ContinuousWalk;
    s.path_length_m = path;
    s.repetitions = reps;
    return s;
}

double max_part_speed(const ScattererPart& part, double dt) {
    double best = 0.0;
    for (std::size_t i = 1; i < part.positions.size(); ++i) {
        const Vec3 d = part.positions[i] - part.positions[i - 1];
        best = std::max(best, d.norm() / dt);
    }
    return best;
}

}  // namespace

TEST_CASE("stance and swing split the stride by the duty factor") {
    const auto out = synthesize_walker(healthy(), straight_walk(), 1600.0, 1);
    for (const auto& r : out.truth.records) {
        REQUIRE(r.stance_time_s);
        REQUIRE(r.swing_time_s);
        CHECK(*r.stance_time_s == doctest::Approx(0.66).epsilon(1e-12));
        CHECK(*r.swing_time_s == doctest::Approx(0.44).epsilon(1e-12));
        CHECK(*r.stance_time_s + *r.swing_time_s == doctest::Approx(1.1).epsilon(1e-12));
    }
}

TEST_CASE("mean torso speed equals stride length over stride time") {
    WalkerProfile w = healthy();
    w.stride_length_m = 1.2;
    w.stride_time_s = 1.2;
    const auto out = synthesize_walker(w, straight_walk(), 1600.0, 1);
    CHECK(out.truth.mean_speed_mps == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& r : out.truth.records)
        CHECK(*r.stride_velocity_mps == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("foot peak speed reaches the profile value") {
    const auto out = synthesize_walker(healthy(), straight_walk(), 3200.0, 1);
    const auto* foot = out.tracks.find(PartKind::FootLeft);
    REQUIRE(foot != nullptr);
    const double peak = max_part_speed(*foot, out.tracks.dt_s);
    CHECK(peak == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("asymmetry scales the right foot peak velocity") {
    WalkerProfile w = healthy();
    w.asymmetry = 1.25;
    const auto out = synthesize_walker(w, straight_walk(), 3200.0, 1);
    const double peak_l = max_part_speed(*out.tracks.find(PartKind::FootLeft), out.tracks.dt_s);
    const double peak_r = max_part_speed(*out.tracks.find(PartKind::FootRight), out.tracks.dt_s);
    CHECK(peak_l == doctest::Approx(3.0).epsilon(0.02));
    CHECK(peak_r == doctest::Approx(2.4).epsilon(0.02));
}

TEST_CASE("heel strikes exceed strides by one per foot per bout") {
    const auto out = synthesize_walker(healthy(), straight_walk(3), 1600.0, 1);
    REQUIRE(out.truth.segments.size() == 3);
    for (const auto& seg : out.truth.segments) {
        std::size_t hs_l = 0, strides_l = 0;
        for (const auto& e : out.truth.events)
            if (e.kind == EventKind::HeelStrike && e.foot == Foot::Left && seg.contains(e.time_s))
                ++hs_l;
        for (const auto& r : out.truth.records)
            if (r.foot == Foot::Left && r.cycle_start_s >= seg.start_s &&
                r.cycle_end_s <= seg.end_s + 1e-9)
                ++strides_l;
        CHECK(hs_l == strides_l + 1);
    }
}

TEST_CASE("feet are pinned during stance") {
    const auto out = synthesize_walker(healthy(), straight_walk(), 1600.0, 1);
    const auto* foot = out.tracks.find(PartKind::FootLeft);
    const double dt = out.tracks.dt_s;
    // check within every truth stance window of the left foot
    for (const auto& r : out.truth.records) {
        if (r.foot != Foot::Left) continue;
        const std::size_t a = std::size_t((r.cycle_start_s + 1e-9) / dt) + 1;
        const std::size_t b = std::size_t((r.cycle_start_s + *r.stance_time_s) / dt);
        for (std::size_t i = a + 1; i <= b && i < foot->positions.size(); ++i) {
            const Vec3 d = foot->positions[i] - foot->positions[i - 1];
            CHECK(d.norm() == 0.0);
        }
    }
}

TEST_CASE("torso speed peaks align with heel strikes") {
    const auto out = synthesize_walker(healthy(), straight_walk(1, 10.0), 1600.0, 1);
    const auto* torso = out.tracks.find(PartKind::Torso);
    const double dt = out.tracks.dt_s;
    std::vector<double> speed(torso->positions.size() - 1);
    for (std::size_t i = 0; i + 1 < torso->positions.size(); ++i)
        speed[i] = (torso->positions[i + 1] - torso->positions[i]).norm() / dt;
    // every local max of the torso speed during walking sits near an HS
    const auto& seg = out.truth.segments[0];
    for (std::size_t i = 1; i + 1 < speed.size(); ++i) {
        const double t = (double(i) + 0.5) * dt;
        if (t < seg.start_s + 0.6 || t > seg.end_s - 0.6) continue;
        if (!(speed[i] > speed[i - 1] && speed[i] >= speed[i + 1])) continue;
        if (speed[i] < out.truth.mean_speed_mps * 1.05) continue;
        double nearest = 1e9;
        for (const auto& e : out.truth.events)
            if (e.kind == EventKind::HeelStrike)
                nearest = std::min(nearest, std::abs(e.time_s - t));
        CHECK(nearest < 0.08);
    }
}

TEST_CASE("events alternate per foot and interleave across feet") {
    const auto out = synthesize_walker(healthy(), straight_walk(2), 1600.0, 1);
    for (const auto& seg : out.truth.segments) {
        std::vector<GaitEvent> hs;
        for (Foot f : {Foot::Left, Foot::Right}) {
            EventKind expect = EventKind::HeelStrike;
            for (const auto& e : out.truth.events) {
                if (e.foot != f || !seg.contains(e.time_s)) continue;
                if (e.kind == EventKind::HeelStrike) hs.push_back(e);
                CHECK(e.kind == expect);
                expect = expect == EventKind::HeelStrike ? EventKind::ToeOff
                                                         : EventKind::HeelStrike;
            }
        }
        std::sort(hs.begin(), hs.end(),
                  [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; });
        for (std::size_t i = 1; i < hs.size(); ++i) CHECK(hs[i].foot != hs[i - 1].foot);
    }
}

TEST_CASE("rejects a path shorter than one stride") {
    CHECK_THROWS_WITH_AS(synthesize_walker(healthy(), straight_walk(1, 0.9), 1600.0, 1),
                         doctest::Contains("path too short"), PipelineError);
}

TEST_CASE("rejects inconsistent profiles") {
    WalkerProfile w = healthy();
    w.duty_factor = 0.2;
    CHECK_THROWS_AS(synthesize_walker(w, straight_walk(), 1600.0, 1), std::invalid_argument);
    w = healthy();
    w.foot_peak_velocity_mps = 0.5;
    CHECK_THROWS_AS(synthesize_walker(w, straight_walk(), 1600.0, 1), std::invalid_argument);
    w = healthy();
    w.asymmetry = -1.0;
    CHECK_THROWS_AS(synthesize_walker(w, straight_walk(), 1600.0, 1), std::invalid_argument);
}

TEST_CASE("TUG produces out-and-back segments per repetition") {
    TrialScript s;
    s.protocol = Protocol::Tug;
    s.path_length_m = 3.0;
    s.repetitions = 1;
    const auto out = synthesize_walker(healthy(), s, 1600.0, 1);
    CHECK(out.truth.segments.size() == 2);
    CHECK(out.truth.segments[0].direction != out.truth.segments[1].direction);
}

// --- rendering ---

namespace {

RadarWaveform paper_waveform() {
    RadarWaveform wf;
    wf.f0_hz = 23e9;
    wf.b_hz = 1.4e9;
    wf.tc_s = 625e-6;
    wf.fs_hz = 204.8e3;
    return wf;
}

ScattererTracks static_point(double range_m, std::size_t n_chirps, double tc_s) {
    ScattererTracks t;
    t.dt_s = tc_s;
    ScattererPart p{PartKind::Torso, 1.0, {}};
    p.positions.assign(n_chirps, Vec3{range_m, 0.0, 0.0});
    t.parts.push_back(p);
    return t;
}

NodeGeometry origin_node() {
    NodeGeometry n;
    n.position = {0.0, 0.0, 0.0};
    n.boresight = {1.0, 0.0, 0.0};
    return n;
}

}  // namespace

TEST_CASE("static point produces the expected beat tone") {
    const auto wf = paper_waveform();
    // the formula value: 2*R*B/(c*Tc) at R = 3 m
    const double fb = wf.beat_frequency_hz(3.0);
    CHECK(fb == doctest::Approx(2.0 * 3.0 * 1.4e9 / (kSpeedOfLight * 625e-6)).epsilon(1e-12));
    CHECK(fb == doctest::Approx(44.8e3).epsilon(0.002));

    const auto tracks = static_point(3.0, 64, wf.tc_s);
    const auto cube = render_iq(tracks, origin_node(), wf,
                                std::numeric_limits<double>::infinity());
    // measure the dominant frequency of one chirp with a long zero-padded DFT
    const std::size_t n = cube.n_samples;
    std::vector<cdouble> x(4096, cdouble(0, 0));
    for (std::size_t i = 0; i < n; ++i)
        x[i] = cdouble(cube.chirp(0)[i].real(), cube.chirp(0)[i].imag());
    kernels::Fft fft(4096);
    std::vector<cdouble> spec(4096);
    fft.forward(x.data(), spec.data());
    std::size_t peak = 0;
    for (std::size_t k = 1; k < 2048; ++k)
        if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
    const double f_meas = double(peak) * wf.fs_hz / 4096.0;
    CHECK(f_meas == doctest::Approx(fb).epsilon(0.01));
}

TEST_CASE("chirp-to-chirp phase advances by the doppler rate") {
    RadarWaveform wf = paper_waveform();
    const double v = 1.0;  // m/s approaching
    const std::size_t n_chirps = 512;
    ScattererTracks t;
    t.dt_s = wf.tc_s;
    ScattererPart p{PartKind::Torso, 1.0, {}};
    for (std::size_t i = 0; i < n_chirps; ++i)
        p.positions.push_back(Vec3{5.0 - v * double(i) * wf.tc_s, 0.0, 0.0});
    t.parts.push_back(p);
    const auto cube = render_iq(t, origin_node(), wf, std::numeric_limits<double>::infinity());

    // slow-time series at a fixed fast-time sample
    std::vector<cdouble> slow(n_chirps);
    for (std::size_t m = 0; m < n_chirps; ++m)
        slow[m] = cdouble(cube.chirp(m)[3].real(), cube.chirp(m)[3].imag());
    // mean phase increment
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t m = 1; m < n_chirps; ++m) {
        const cdouble r = slow[m] * std::conj(slow[m - 1]);
        if (std::abs(r) > 0.0) {
            acc += std::arg(r);
            ++cnt;
        }
    }
    const double fd = acc / double(cnt) / (2.0 * kPi * wf.tc_s);
    const double expected = 2.0 * v * wf.f0_hz / kSpeedOfLight;  // 153.4 Hz
    CHECK(expected == doctest::Approx(153.3).epsilon(0.002));
    CHECK(fd == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("zero scatterers render to an all-zero cube") {
    ScattererTracks t;
    t.dt_s = 625e-6;
    const auto cube = render_iq(t, origin_node(), paper_waveform(),
                                std::numeric_limits<double>::infinity());
    CHECK(cube.n_chirps == 0);
    CHECK(cube.data.empty());
}

TEST_CASE("rendering is linear in the scatterer set") {
    const auto wf = paper_waveform();
    auto t1 = static_point(2.0, 16, wf.tc_s);
    auto t2 = static_point(4.5, 16, wf.tc_s);
    t2.parts[0].positions[7] = Vec3{4.4, 0.1, 0.2};  // a little variety
    ScattererTracks both = t1;
    both.parts.push_back(t2.parts[0]);
    const double inf = std::numeric_limits<double>::infinity();
    const auto a = render_iq(t1, origin_node(), wf, inf);
    const auto b = render_iq(t2, origin_node(), wf, inf);
    const auto ab = render_iq(both, origin_node(), wf, inf);
    for (std::size_t i = 0; i < ab.data.size(); ++i) {
        const cfloat want = a.data[i] + b.data[i];
        CHECK(std::abs(std::complex<double>(ab.data[i]) - std::complex<double>(want)) < 2e-5);
    }
}

TEST_CASE("rejects ranges beyond the sampling limit") {
    const auto wf = paper_waveform();
    const double r_max = wf.unambiguous_range_m();
    const auto tracks = static_point(r_max + 1.0, 4, wf.tc_s);
    CHECK_THROWS_WITH_AS(
        render_iq(tracks, origin_node(), wf, std::numeric_limits<double>::infinity()),
        doctest::Contains("range exceeds sampling limit"), PipelineError);
}

TEST_CASE("trial noise hits the requested power") {
    const auto wf = paper_waveform();
    auto cube = render_iq(static_point(3.0, 400, wf.tc_s), origin_node(), wf,
                          std::numeric_limits<double>::infinity());
    double sig_power = 0.0;
    for (const auto& v : cube.data) sig_power += std::norm(std::complex<double>(v));
    sig_power /= double(cube.data.size());

    auto noisy = cube;
    apply_trial_noise(noisy, 20.0, 99);
    double noise_power = 0.0;
    for (std::size_t i = 0; i < cube.data.size(); ++i)
        noise_power += std::norm(std::complex<double>(noisy.data[i]) -
                                 std::complex<double>(cube.data[i]));
    noise_power /= double(cube.data.size());
    CHECK(noise_power == doctest::Approx(sig_power * 0.01).epsilon(0.12));

    auto zero_db = cube;
    apply_trial_noise(zero_db, 0.0, 7);
    double noise0 = 0.0;
    for (std::size_t i = 0; i < cube.data.size(); ++i)
        noise0 += std::norm(std::complex<double>(zero_db.data[i]) -
                            std::complex<double>(cube.data[i]));
    noise0 /= double(cube.data.size());
    CHECK(noise0 == doctest::Approx(sig_power).epsilon(0.12));

    sim::IqCube empty;
    CHECK(apply_trial_noise(empty, 10.0) == 0.0);
    CHECK(empty.data.empty());
}
