#include "gaitrad/events/detect.hpp"

#include <algorithm>
#include <cmath>

#include "gaitrad/kernels/fft.hpp"
#include "gaitrad/kernels/kernels.hpp"

namespace gaitrad::events {

namespace {

constexpr double kTorsoBandLow = 0.15;   // m/s, search band for the body ridge
constexpr double kTorsoBandHigh = 2.8;

// Linear interpolation across invalid runs, nearest-valid at the edges.
std::vector<double> fill_invalid(const std::vector<double>& v, const std::vector<bool>& valid) {
    const std::size_t n = v.size();
    std::vector<double> out(v);
    std::size_t first_valid = n;
    for (std::size_t i = 0; i < n; ++i)
        if (valid[i]) {
            first_valid = i;
            break;
        }
    if (first_valid == n) return std::vector<double>(n, 0.0);
    for (std::size_t i = 0; i < first_valid; ++i) out[i] = v[first_valid];
    std::size_t last = first_valid;
    for (std::size_t i = first_valid + 1; i < n; ++i) {
        if (!valid[i]) continue;
        if (i > last + 1) {
            const double step = (v[i] - v[last]) / double(i - last);
            for (std::size_t j = last + 1; j < i; ++j)
                out[j] = v[last] + step * double(j - last);
        }
        last = i;
    }
    for (std::size_t i = last + 1; i < n; ++i) out[i] = v[last];
    return out;
}

double frame_median(const float* p, std::size_t n, std::vector<double>& scratch) {
    scratch.assign(p, p + n);
    auto mid = scratch.begin() + long(n / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    return *mid;
}

struct FrameRange {
    std::size_t first = 0;
    std::size_t last = 0;  // exclusive
    bool empty() const { return first >= last; }
};

FrameRange segment_frames(const VelocitySeries& s, const GaitSegment& seg) {
    if (s.v_mps.empty()) return {};
    const double fr = s.frame_rate_hz;
    const long a = std::lround((seg.start_s - s.t0_s) * fr);
    const long b = std::lround((seg.end_s - s.t0_s) * fr);
    FrameRange r;
    r.first = std::size_t(std::clamp<long>(a, 0, long(s.v_mps.size())));
    r.last = std::size_t(std::clamp<long>(b + 1, 0, long(s.v_mps.size())));
    return r;
}

// Dominant oscillation frequency of the demeaned series, in [lo, hi] Hz.
double dominant_frequency(const std::vector<double>& x, double fr, double lo, double hi) {
    std::size_t nfft = 1024;
    while (nfft < x.size()) nfft <<= 1;
    nfft = std::min<std::size_t>(nfft, 65536);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(x.size());
    std::vector<cdouble> buf(nfft, cdouble(0.0, 0.0));
    const std::size_t used = std::min(x.size(), nfft);
    for (std::size_t i = 0; i < used; ++i) buf[i] = cdouble(x[i] - mean, 0.0);
    kernels::Fft fft(nfft);
    std::vector<cdouble> spec(nfft);
    fft.forward(buf.data(), spec.data());
    const double df = fr / double(nfft);
    std::size_t b_lo = std::max<std::size_t>(1, std::size_t(lo / df));
    std::size_t b_hi = std::min(nfft / 2, std::size_t(hi / df));
    std::size_t best = b_lo;
    double best_p = 0.0;
    for (std::size_t b = b_lo; b <= b_hi; ++b) {
        const double pw = std::norm(spec[b]);
        if (pw > best_p) {
            best_p = pw;
            best = b;
        }
    }
    return double(best) * df;
}

}  // namespace

std::vector<double> lowpass(const std::vector<double>& x, double frame_rate_hz,
                            double cutoff_hz) {
    if (x.empty() || cutoff_hz <= 0.0) return x;
    std::size_t taps = std::size_t(std::llround(3.3 * frame_rate_hz / (2.0 * cutoff_hz)));
    if (taps % 2 == 0) ++taps;
    if (taps < 5) return x;
    if (taps >= x.size()) {
        taps = x.size() | 1;
        if (taps >= x.size()) taps = x.size() >= 2 ? ((x.size() - 1) | 1) : 1;
        if (taps < 5) return x;
    }
    const std::size_t half = taps / 2;
    std::vector<double> h(taps);
    const double fc = cutoff_hz / frame_rate_hz;
    for (std::size_t i = 0; i < taps; ++i) {
        const double k = double(i) - double(half);
        const double sinc = k == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * k) / (kPi * k);
        h[i] = sinc * (0.54 - 0.46 * std::cos(2.0 * kPi * double(i) / double(taps - 1)));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t hw = std::min({half, i, x.size() - 1 - i});
        double acc = 0.0, wsum = 0.0;
        for (std::size_t j = half - hw; j <= half + hw; ++j) {
            acc += h[j] * x[i + j - half];
            wsum += h[j];
        }
        out[i] = wsum != 0.0 ? acc / wsum : x[i];
    }
    return out;
}

VelocitySeries extract_torso_velocity(const dsp::DopplerTimeMatrix& dtm, const EventParams& p) {
    VelocitySeries s;
    s.frame_rate_hz = dtm.frame_rate_hz;
    s.t0_s = dtm.t0_s;
    s.v_mps.assign(dtm.n_frames, 0.0);
    s.valid.assign(dtm.n_frames, false);

    const double thr = db_to_linear(p.torso_threshold_db);
    std::vector<double> vel(dtm.n_bins);
    for (std::size_t b = 0; b < dtm.n_bins; ++b)
        vel[b] = dsp::doppler_to_velocity(dtm.doppler_of_bin(b), dtm.f0_hz);

    std::vector<double> scratch;
    for (std::size_t f = 0; f < dtm.n_frames; ++f) {
        const float* row = dtm.frame(f);
        const double cut = frame_median(row, dtm.n_bins, scratch) * thr;
        std::size_t peak = dtm.n_bins;
        double peak_p = cut;
        for (std::size_t b = 0; b < dtm.n_bins; ++b) {
            const double av = std::abs(vel[b]);
            if (av < kTorsoBandLow || av > kTorsoBandHigh) continue;
            if (row[b] > peak_p) {
                peak_p = row[b];
                peak = b;
            }
        }
        if (peak == dtm.n_bins) continue;
        double wsum = 0.0, vsum = 0.0;
        for (std::size_t b = 0; b < dtm.n_bins; ++b) {
            if (std::abs(vel[b] - vel[peak]) > p.torso_notch_mps) continue;
            if (row[b] <= cut) continue;
            wsum += row[b];
            vsum += row[b] * vel[b];
        }
        if (wsum <= 0.0) continue;
        s.v_mps[f] = vsum / wsum;
        s.valid[f] = true;
    }
    return s;
}

VelocitySeries extract_feet_envelope(const dsp::DopplerTimeMatrix& dtm,
                                     const std::vector<double>& frame_snr_db,
                                     const EventParams& p) {
    if (frame_snr_db.size() != dtm.n_frames)
        throw PipelineError("frame SNR trace does not match the matrix");

    VelocitySeries torso = extract_torso_velocity(dtm, p);
    std::vector<double> center =
        moving_average(fill_invalid(torso.v_mps, torso.valid),
                       std::size_t(0.1 * dtm.frame_rate_hz));

    VelocitySeries env;
    env.frame_rate_hz = dtm.frame_rate_hz;
    env.t0_s = dtm.t0_s;
    env.v_mps.assign(dtm.n_frames, 0.0);
    env.valid.assign(dtm.n_frames, false);

    const double thr = db_to_linear(p.feet_threshold_db);
    std::vector<double> vel(dtm.n_bins);
    for (std::size_t b = 0; b < dtm.n_bins; ++b)
        vel[b] = dsp::doppler_to_velocity(dtm.doppler_of_bin(b), dtm.f0_hz);

    std::vector<double> scratch;
    for (std::size_t f = 0; f < dtm.n_frames; ++f) {
        if (frame_snr_db[f] < p.min_frame_snr_db || !torso.valid[f]) continue;
        const float* row = dtm.frame(f);
        const double cut = frame_median(row, dtm.n_bins, scratch) * thr;
        const double c = center[f];
        const double dir = c >= 0.0 ? 1.0 : -1.0;
        double best = 0.0;
        for (std::size_t b = 0; b < dtm.n_bins; ++b) {
            const double v = vel[b];
            if (v * dir <= p.near_zero_mps) continue;  // wrong side or near zero
            if (std::abs(std::abs(v) - std::abs(c)) <= p.torso_notch_mps) continue;
            if (row[b] > cut) best = std::max(best, std::abs(v));
        }
        env.v_mps[f] = best;
        env.valid[f] = true;
    }

    // median filter kills single-frame threshold pokes without edge lag
    const std::size_t half = std::size_t(0.5 * p.envelope_median_s * dtm.frame_rate_hz);
    std::vector<double> filtered = median_filter(env.v_mps, half);
    env.v_mps = std::move(filtered);
    return env;
}

std::vector<GaitSegment> segment_gait(const VelocitySeries& torso_velocity,
                                      const EventParams& p) {
    std::vector<GaitSegment> segments;
    if (torso_velocity.v_mps.empty()) return segments;
    const double fr = torso_velocity.frame_rate_hz;
    std::vector<double> v = moving_average(
        fill_invalid(torso_velocity.v_mps, torso_velocity.valid),
        std::size_t(0.5 * p.segment_smooth_s * fr));

    const std::size_t min_len = std::size_t(p.min_segment_s * fr);
    std::size_t i = 0;
    const std::size_t n = v.size();
    while (i < n) {
        if (std::abs(v[i]) <= p.walk_threshold_mps) {
            ++i;
            continue;
        }
        std::size_t j = i;
        const bool positive = v[i] > 0.0;
        while (j < n && std::abs(v[j]) > p.walk_threshold_mps && (v[j] > 0.0) == positive) ++j;
        if (j - i >= min_len) {
            GaitSegment seg;
            seg.start_s = torso_velocity.time_of(i);
            seg.end_s = torso_velocity.time_of(j - 1);
            seg.direction = positive ? WalkDirection::TowardNode1 : WalkDirection::TowardNode2;
            segments.push_back(seg);
        }
        i = j;
    }
    return segments;
}

namespace {

struct QuietRun {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive
};

std::vector<GaitEvent> quiet_run_events(const VelocitySeries& env, const FrameRange& range,
                                        const GaitSegment& seg, const EventParams& p,
                                        EventSource source) {
    std::vector<GaitEvent> out;
    const double fr = env.frame_rate_hz;
    const std::size_t min_quiet = std::max<std::size_t>(1, std::size_t(p.min_quiet_s * fr));
    const std::size_t guard = std::size_t(p.activity_window_s * fr);

    std::vector<QuietRun> runs;
    std::size_t i = range.first;
    while (i < range.last) {
        if (!(env.valid[i] && env.v_mps[i] < p.near_zero_mps)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < range.last && env.valid[j] && env.v_mps[j] < p.near_zero_mps) ++j;
        if (j - i >= min_quiet) runs.push_back({i, j - 1});
        i = j;
    }

    auto max_env = [&](std::size_t a, std::size_t b) {  // [a, b)
        double m = 0.0;
        for (std::size_t k = a; k < b; ++k)
            if (env.valid[k]) m = std::max(m, env.v_mps[k]);
        return m;
    };

    for (const auto& run : runs) {
        const bool starts_inside = run.first > range.first;
        const bool ends_inside = run.last + 1 < range.last;
        if (starts_inside &&
            max_env(run.first - std::min(guard, run.first - range.first), run.first) >=
                p.activity_guard_mps) {
            GaitEvent hs;
            hs.kind = EventKind::HeelStrike;
            hs.time_s = env.time_of(run.first);
            hs.source = source;
            if (seg.contains(hs.time_s)) out.push_back(hs);
        }
        if (ends_inside &&
            max_env(run.last + 1, std::min(range.last, run.last + 1 + guard)) >=
                p.activity_guard_mps) {
            GaitEvent to;
            to.kind = EventKind::ToeOff;
            to.time_s = env.time_of(run.last + 1);
            to.source = source;
            if (seg.contains(to.time_s)) out.push_back(to);
        }
    }
    return out;
}

}  // namespace

DetectionResult detect_events_feet(const dsp::DopplerTimeMatrix& fused_feet,
                                   const std::vector<GaitSegment>& segments,
                                   const EventParams& p) {
    DetectionResult result;
    const std::vector<double> snr = dsp::estimate_frame_snr(fused_feet);
    const VelocitySeries env = extract_feet_envelope(fused_feet, snr, p);

    for (std::size_t si = 0; si < segments.size(); ++si) {
        const FrameRange range = segment_frames(env, segments[si]);
        if (range.empty()) {
            result.low_snr_segments.push_back(si);
            continue;
        }
        std::size_t n_valid = 0;
        for (std::size_t f = range.first; f < range.last; ++f)
            if (env.valid[f]) ++n_valid;
        if (double(n_valid) < p.min_valid_fraction * double(range.last - range.first)) {
            result.low_snr_segments.push_back(si);
            continue;
        }
        auto ev = quiet_run_events(env, range, segments[si], p, EventSource::FeetAlg);
        result.events.insert(result.events.end(), ev.begin(), ev.end());
    }
    std::sort(result.events.begin(), result.events.end(),
              [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; });
    return result;
}

DetectionResult detect_events_torso(const dsp::DopplerTimeMatrix& torso_dtm,
                                    const std::vector<GaitSegment>& segments,
                                    const EventParams& p) {
    DetectionResult result;
    const VelocitySeries torso = extract_torso_velocity(torso_dtm, p);
    std::vector<double> speed = fill_invalid(torso.v_mps, torso.valid);
    for (double& v : speed) v = std::abs(v);
    speed = lowpass(speed, torso.frame_rate_hz, p.torso_lowpass_hz);

    const double fr = torso.frame_rate_hz;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const FrameRange range = segment_frames(torso, segments[si]);
        if (range.empty()) {
            result.low_snr_segments.push_back(si);
            continue;
        }
        std::size_t n_valid = 0;
        for (std::size_t f = range.first; f < range.last; ++f)
            if (torso.valid[f]) ++n_valid;
        if (double(n_valid) < p.min_valid_fraction * double(range.last - range.first)) {
            result.low_snr_segments.push_back(si);
            continue;
        }

        std::vector<double> seg_speed(speed.begin() + long(range.first),
                                      speed.begin() + long(range.last));
        const double step_rate = dominant_frequency(seg_speed, fr, 0.5, 4.0);
        const std::size_t min_spacing = std::size_t(0.4 * fr / step_rate);

        // prominence-gated local maxima, strongest first
        std::vector<std::size_t> peaks;
        for (std::size_t k = 1; k + 1 < seg_speed.size(); ++k) {
            if (seg_speed[k] >= seg_speed[k - 1] && seg_speed[k] > seg_speed[k + 1]) {
                const std::size_t a = k > min_spacing ? k - min_spacing : 0;
                const std::size_t b = std::min(seg_speed.size(), k + min_spacing);
                double lo = seg_speed[k];
                for (std::size_t q = a; q < b; ++q) lo = std::min(lo, seg_speed[q]);
                if (seg_speed[k] - lo >= p.torso_peak_prominence_mps) peaks.push_back(k);
            }
        }
        std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
            return seg_speed[a] > seg_speed[b];
        });
        std::vector<std::size_t> accepted;
        for (std::size_t k : peaks) {
            bool ok = true;
            for (std::size_t q : accepted)
                if ((k > q ? k - q : q - k) < min_spacing) {
                    ok = false;
                    break;
                }
            if (ok) accepted.push_back(k);
        }
        std::sort(accepted.begin(), accepted.end());

        for (std::size_t k : accepted) {
            GaitEvent hs;
            hs.kind = EventKind::HeelStrike;
            hs.time_s = torso.time_of(range.first + k);
            hs.source = EventSource::TorsoAlg;
            result.events.push_back(hs);
        }
        // toe-off at the acceleration peak between consecutive heel strikes
        for (std::size_t e = 0; e + 1 < accepted.size(); ++e) {
            std::size_t best = 0;
            double best_a = -1e300;
            for (std::size_t k = accepted[e] + 1; k + 1 < accepted[e + 1]; ++k) {
                const double acc = 0.5 * (seg_speed[k + 1] - seg_speed[k - 1]) * fr;
                if (acc > best_a) {
                    best_a = acc;
                    best = k;
                }
            }
            if (best_a > 0.0) {
                GaitEvent to;
                to.kind = EventKind::ToeOff;
                to.time_s = torso.time_of(range.first + best);
                to.source = EventSource::TorsoAlg;
                result.events.push_back(to);
            }
        }
    }
    std::sort(result.events.begin(), result.events.end(),
              [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; });
    return result;
}

std::optional<double> median_step_time(const std::vector<GaitEvent>& events) {
    std::vector<double> hs;
    for (const auto& e : events)
        if (e.kind == EventKind::HeelStrike) hs.push_back(e.time_s);
    std::sort(hs.begin(), hs.end());
    std::vector<double> diffs;
    for (std::size_t i = 1; i < hs.size(); ++i) {
        const double d = hs[i] - hs[i - 1];
        if (d > 0.1 && d < 2.0) diffs.push_back(d);
    }
    if (diffs.empty()) return std::nullopt;
    return median(diffs);
}

std::vector<GaitEvent> assign_feet(std::vector<GaitEvent> events,
                                   const std::vector<GaitSegment>& segments,
                                   const EventParams& p) {
    std::sort(events.begin(), events.end(),
              [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; });
    for (auto& e : events) e.foot = Foot::Unknown;

    const auto step = median_step_time(events);
    std::vector<GaitEvent> out;
    std::vector<char> used(events.size(), 0);

    for (const auto& seg : segments) {
        std::vector<std::size_t> hs_idx;
        for (std::size_t i = 0; i < events.size(); ++i)
            if (!used[i] && events[i].kind == EventKind::HeelStrike &&
                seg.contains(events[i].time_s))
                hs_idx.push_back(i);

        // drop later duplicates closer than a quarter step
        std::vector<std::size_t> kept;
        for (std::size_t i : hs_idx) {
            if (!kept.empty() && step &&
                events[i].time_s - events[kept.back()].time_s < p.duplicate_window_steps * *step) {
                used[i] = 1;  // consumed, not emitted
                continue;
            }
            kept.push_back(i);
        }

        if (kept.size() >= 2) {
            Foot foot = Foot::Left;
            events[kept[0]].foot = foot;
            for (std::size_t k = 1; k < kept.size(); ++k) {
                std::size_t flips = 1;
                if (step) {
                    const double gap = events[kept[k]].time_s - events[kept[k - 1]].time_s;
                    const long missed = std::lround(gap / *step) - 1;
                    if (missed > 0) flips += std::size_t(missed);
                }
                if (flips % 2 == 1) foot = opposite(foot);
                events[kept[k]].foot = foot;
            }
        }

        // toe-off ends the stance of the foot opposite the run-opening strike
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (used[i] || events[i].kind != EventKind::ToeOff || !seg.contains(events[i].time_s))
                continue;
            const GaitEvent* prev_hs = nullptr;
            for (std::size_t j : kept) {
                if (events[j].time_s < events[i].time_s) prev_hs = &events[j];
                else break;
            }
            if (prev_hs != nullptr && prev_hs->foot != Foot::Unknown)
                events[i].foot = opposite(prev_hs->foot);
        }
    }

    for (std::size_t i = 0; i < events.size(); ++i)
        if (!used[i]) out.push_back(events[i]);
    return out;
}

MatchReport match_events(const std::vector<GaitEvent>& detected,
                         const std::vector<GaitEvent>& truth,
                         const std::vector<GaitSegment>& segments, const EventParams& p) {
    MatchReport report;

    // Truth heel strikes that survive the boundary-cycle discard: per segment
    // and foot, drop the first and the last strike.
    std::vector<GaitEvent> counted_hs;
    std::vector<GaitEvent> counted_to;
    for (const auto& seg : segments) {
        for (Foot f : {Foot::Left, Foot::Right}) {
            std::vector<GaitEvent> hs, to;
            for (const auto& e : truth) {
                if (!seg.contains(e.time_s) || e.foot != f) continue;
                (e.kind == EventKind::HeelStrike ? hs : to).push_back(e);
            }
            if (hs.size() >= 3)
                counted_hs.insert(counted_hs.end(), hs.begin() + 1, hs.end() - 1);
            if (to.size() >= 3)
                counted_to.insert(counted_to.end(), to.begin() + 1, to.end() - 1);
        }
    }
    auto by_time = [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; };
    std::sort(counted_hs.begin(), counted_hs.end(), by_time);
    std::sort(counted_to.begin(), counted_to.end(), by_time);
    report.truth_hs_count = counted_hs.size();

    const auto step = median_step_time(truth);
    if (!step || counted_hs.empty()) return report;
    const double window = p.match_window_steps * *step;

    auto greedy = [&](const std::vector<GaitEvent>& tr, EventKind kind) {
        struct Cand {
            double adt;
            std::size_t ti, di;
        };
        std::vector<const GaitEvent*> det;
        for (const auto& e : detected)
            if (e.kind == kind) det.push_back(&e);
        std::vector<Cand> cands;
        for (std::size_t ti = 0; ti < tr.size(); ++ti)
            for (std::size_t di = 0; di < det.size(); ++di) {
                const double adt = std::abs(det[di]->time_s - tr[ti].time_s);
                if (adt < window) cands.push_back({adt, ti, di});
            }
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& a, const Cand& b) { return a.adt < b.adt; });
        std::vector<char> t_used(tr.size(), 0), d_used(det.size(), 0);
        for (const auto& c : cands) {
            if (t_used[c.ti] || d_used[c.di]) continue;
            t_used[c.ti] = d_used[c.di] = 1;
            report.matched.push_back({tr[c.ti], *det[c.di], det[c.di]->time_s - tr[c.ti].time_s});
        }
        if (kind == EventKind::HeelStrike) {
            for (std::size_t ti = 0; ti < tr.size(); ++ti)
                if (!t_used[ti]) report.missed.push_back(tr[ti]);
            const double lo = counted_hs.front().time_s - window;
            const double hi = counted_hs.back().time_s + window;
            for (std::size_t di = 0; di < det.size(); ++di)
                if (!d_used[di] && det[di]->time_s >= lo && det[di]->time_s <= hi)
                    report.false_detections.push_back(*det[di]);
        }
        return std::count_if(t_used.begin(), t_used.end(), [](char c) { return c != 0; });
    };

    const auto hs_matched = greedy(counted_hs, EventKind::HeelStrike);
    greedy(counted_to, EventKind::ToeOff);

    report.hs_detection_ratio = double(hs_matched) / double(counted_hs.size());
    double acc = 0.0;
    std::size_t n_hs_pairs = 0;
    for (const auto& m : report.matched)
        if (m.truth.kind == EventKind::HeelStrike) {
            acc += std::abs(m.dt_s);
            ++n_hs_pairs;
        }
    report.mean_abs_dt_s = n_hs_pairs > 0 ? acc / double(n_hs_pairs) : 0.0;
    return report;
}

}  // namespace gaitrad::events
