#include "gaitrad/params/extract.hpp"

#include <algorithm>
#include <cmath>

namespace gaitrad::params {

ConfigRequirements requirements(RadarConfiguration c) {
    switch (c) {
        case RadarConfiguration::C1: return {1, 0};
        case RadarConfiguration::C2: return {0, 1};
        case RadarConfiguration::C3: return {2, 0};
        case RadarConfiguration::C4: return {0, 2};
        case RadarConfiguration::C5: return {1, 2};
        default: return {2, 2};
    }
}

RadarConfiguration parse_configuration(const std::string& name) {
    if (name == "C1") return RadarConfiguration::C1;
    if (name == "C2") return RadarConfiguration::C2;
    if (name == "C3") return RadarConfiguration::C3;
    if (name == "C4") return RadarConfiguration::C4;
    if (name == "C5") return RadarConfiguration::C5;
    if (name == "C6") return RadarConfiguration::C6;
    throw std::invalid_argument("unknown configuration: " + name);
}

const char* to_string(RadarConfiguration c) {
    switch (c) {
        case RadarConfiguration::C1: return "C1";
        case RadarConfiguration::C2: return "C2";
        case RadarConfiguration::C3: return "C3";
        case RadarConfiguration::C4: return "C4";
        case RadarConfiguration::C5: return "C5";
        default: return "C6";
    }
}

RangeTrack range_track(const dsp::RangeTimeMatrix& rtm, const dsp::TargetMask& mask,
                       double median_smooth_s) {
    if (mask.spans.size() != rtm.n_frames)
        throw PipelineError("mask frame count does not match the matrix");
    RangeTrack track;
    track.frame_rate_hz = rtm.frame_rate_hz;
    track.t0_s = rtm.t0_s;
    track.range_m.assign(rtm.n_frames, 0.0);
    track.valid.assign(rtm.n_frames, false);

    std::vector<double> power(rtm.n_bins);
    for (std::size_t f = 0; f < rtm.n_frames; ++f) {
        const auto& span = mask.spans[f];
        if (span.empty()) continue;
        const cdouble* row = rtm.frame(f);
        double wsum = 0.0, rsum = 0.0;
        for (std::uint32_t b = span.first; b <= span.last; ++b) {
            const double pw = std::norm(row[b]);
            wsum += pw;
            rsum += pw * rtm.range_of_bin(b);
        }
        if (wsum <= 0.0) continue;
        track.range_m[f] = rsum / wsum;
        track.valid[f] = true;
    }

    // median smoothing over the valid samples only
    const std::size_t half = std::size_t(0.5 * median_smooth_s * rtm.frame_rate_hz);
    if (half > 0) {
        std::vector<double> smoothed = track.range_m;
        std::vector<double> win;
        for (std::size_t f = 0; f < track.range_m.size(); ++f) {
            if (!track.valid[f]) continue;
            const std::size_t a = f >= half ? f - half : 0;
            const std::size_t b = std::min(track.range_m.size() - 1, f + half);
            win.clear();
            for (std::size_t j = a; j <= b; ++j)
                if (track.valid[j]) win.push_back(track.range_m[j]);
            auto mid = win.begin() + long(win.size() / 2);
            std::nth_element(win.begin(), mid, win.end());
            smoothed[f] = *mid;
        }
        track.range_m = std::move(smoothed);
    }
    return track;
}

namespace {

std::string method_name(EventSource s) {
    switch (s) {
        case EventSource::FeetAlg: return "feet";
        case EventSource::TorsoAlg: return "torso";
        default: return "truth";
    }
}

}  // namespace

std::vector<StrideRecord> temporal_params(const std::vector<GaitEvent>& labeled_events,
                                          const std::vector<GaitSegment>& segments) {
    std::vector<GaitEvent> events(labeled_events);
    std::sort(events.begin(), events.end(),
              [](const GaitEvent& a, const GaitEvent& b) { return a.time_s < b.time_s; });

    std::vector<StrideRecord> records;
    for (const auto& seg : segments) {
        for (Foot f : {Foot::Left, Foot::Right}) {
            std::vector<const GaitEvent*> hs;
            for (const auto& e : events)
                if (e.kind == EventKind::HeelStrike && e.foot == f && seg.contains(e.time_s))
                    hs.push_back(&e);
            for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
                const double t1 = hs[k]->time_s;
                const double t2 = hs[k + 1]->time_s;
                const GaitEvent* to_f = nullptr;
                const GaitEvent* hs_other = nullptr;
                for (const auto& e : events) {
                    if (e.time_s <= t1) continue;
                    if (e.time_s >= t2) break;
                    if (e.kind == EventKind::ToeOff && e.foot == f && to_f == nullptr)
                        to_f = &e;
                    if (e.kind == EventKind::HeelStrike && e.foot == opposite(f) &&
                        hs_other == nullptr)
                        hs_other = &e;
                }
                if (to_f == nullptr || hs_other == nullptr) continue;  // incomplete cycle

                StrideRecord r;
                r.foot = f;
                r.cycle_start_s = t1;
                r.cycle_end_s = t2;
                r.stride_time_s = t2 - t1;
                r.step_time_s = hs_other->time_s - t1;
                r.stance_time_s = to_f->time_s - t1;
                r.swing_time_s = t2 - to_f->time_s;
                const double ds = to_f->time_s - hs_other->time_s;
                if (ds > 0.0) r.double_support_time_s = ds;
                r.cadence_spm = 60.0 / *r.step_time_s;
                r.temporal_method = method_name(hs[k]->source);
                records.push_back(r);
            }
        }
    }
    std::sort(records.begin(), records.end(), [](const StrideRecord& a, const StrideRecord& b) {
        return a.cycle_start_s < b.cycle_start_s;
    });
    return records;
}

void spatial_from_torso_velocity(std::vector<StrideRecord>& records,
                                 const dsp::DopplerTimeMatrix& torso_dtm,
                                 const events::EventParams& p) {
    const events::VelocitySeries torso = events::extract_torso_velocity(torso_dtm, p);
    auto window_mean = [&](double ta, double tb) -> std::optional<double> {
        const std::size_t a = torso.index_of(ta);
        const std::size_t b = torso.index_of(tb);
        if (b <= a) return std::nullopt;
        double acc = 0.0;
        std::size_t n = 0, bad = 0;
        for (std::size_t i = a; i <= b; ++i) {
            if (!torso.valid[i]) {
                ++bad;
                continue;
            }
            acc += std::abs(torso.v_mps[i]);
            ++n;
        }
        if (n == 0 || double(bad) > 0.2 * double(b - a + 1)) return std::nullopt;
        return acc / double(n);
    };

    for (auto& r : records) {
        if (const auto v = window_mean(r.cycle_start_s, r.cycle_end_s); v && r.stride_time_s) {
            r.stride_velocity_mps = *v;
            r.stride_distance_m = *v * *r.stride_time_s;
            r.spatial_method = "torso_velocity";
        }
        if (r.step_time_s) {
            if (const auto v = window_mean(r.cycle_start_s, r.cycle_start_s + *r.step_time_s)) {
                r.step_velocity_mps = *v;
                r.step_distance_m = *v * *r.step_time_s;
            }
        }
    }
}

void spatial_from_range(std::vector<StrideRecord>& records, const RangeTrack& track) {
    auto window_distance = [&](double ta, double tb) -> std::optional<double> {
        const std::size_t a = track.index_of(ta);
        const std::size_t b = track.index_of(tb);
        if (b <= a || !track.valid[a] || !track.valid[b]) return std::nullopt;
        std::size_t bad = 0;
        for (std::size_t i = a; i <= b; ++i)
            if (!track.valid[i]) ++bad;
        if (double(bad) > 0.1 * double(b - a + 1)) return std::nullopt;  // gap in the track
        return std::abs(track.range_m[b] - track.range_m[a]);
    };

    for (auto& r : records) {
        if (r.stride_time_s) {
            if (const auto d = window_distance(r.cycle_start_s, r.cycle_end_s)) {
                r.stride_distance_m = *d;
                r.stride_velocity_mps = *d / *r.stride_time_s;
                r.spatial_method = "range_track";
            }
        }
        if (r.step_time_s) {
            if (const auto d = window_distance(r.cycle_start_s, r.cycle_start_s + *r.step_time_s)) {
                r.step_distance_m = *d;
                r.step_velocity_mps = *d / *r.step_time_s;
            }
        }
    }
}

void foot_max_velocity(std::vector<StrideRecord>& records,
                       const dsp::DopplerTimeMatrix& fused_feet, const events::EventParams& p) {
    const std::vector<double> snr = dsp::estimate_frame_snr(fused_feet);
    const events::VelocitySeries env = events::extract_feet_envelope(fused_feet, snr, p);
    for (auto& r : records) {
        if (!r.stance_time_s) continue;
        const double swing_start = r.cycle_start_s + *r.stance_time_s;
        const std::size_t a = env.index_of(swing_start);
        const std::size_t b = env.index_of(r.cycle_end_s);
        if (b <= a) continue;
        double best = 0.0;
        std::size_t n_valid = 0;
        for (std::size_t i = a; i <= b; ++i) {
            if (!env.valid[i]) continue;
            best = std::max(best, env.v_mps[i]);
            ++n_valid;
        }
        if (n_valid < (b - a + 1) / 2 || best <= 0.0) continue;
        r.foot_max_velocity_mps = best;
    }
}

ExtractionResult extract_all(const TrialMatrices& nodes, RadarConfiguration config,
                             const events::EventParams& p) {
    const ConfigRequirements req = requirements(config);
    if (int(nodes.torso_nodes.size()) != req.torso_nodes ||
        int(nodes.feet_nodes.size()) != req.feet_nodes)
        throw PipelineError(std::string("configuration ") + to_string(config) + " requires " +
                            std::to_string(req.torso_nodes) + " torso node(s) and " +
                            std::to_string(req.feet_nodes) + " feet node(s)");

    const bool feet_based = req.feet_nodes > 0;
    const bool torso_based = req.torso_nodes > 0;

    // Fuse same-height pairs; single nodes pass through by reference.
    dsp::DopplerTimeMatrix fused_feet_dtm;
    std::vector<std::uint8_t> feet_prov;
    const dsp::DopplerTimeMatrix* feet_ptr = nullptr;
    ExtractionResult result;
    if (feet_based) {
        if (req.feet_nodes == 2) {
            auto fused = fusion::combine(nodes.feet_nodes[0].dtm, nodes.feet_nodes[1].dtm,
                                         nodes.feet_nodes[0].snr_db, nodes.feet_nodes[1].snr_db);
            result.fusion_switches = fused.switch_count();
            feet_prov = std::move(fused.provenance);
            fused_feet_dtm = std::move(fused.matrix);
            feet_ptr = &fused_feet_dtm;
        } else {
            feet_ptr = &nodes.feet_nodes[0].dtm;
        }
    }
    dsp::DopplerTimeMatrix fused_torso_dtm;
    const dsp::DopplerTimeMatrix* torso_ptr = nullptr;
    if (torso_based) {
        if (req.torso_nodes == 2) {
            auto fused = fusion::combine(nodes.torso_nodes[0].dtm, nodes.torso_nodes[1].dtm,
                                         nodes.torso_nodes[0].snr_db, nodes.torso_nodes[1].snr_db);
            fused_torso_dtm = std::move(fused.matrix);
            torso_ptr = &fused_torso_dtm;
        } else {
            torso_ptr = &nodes.torso_nodes[0].dtm;
        }
    }
    const dsp::DopplerTimeMatrix& feet_dtm = feet_ptr != nullptr ? *feet_ptr : fused_feet_dtm;
    const dsp::DopplerTimeMatrix& torso_dtm = torso_ptr != nullptr ? *torso_ptr : fused_torso_dtm;

    // Segmentation from the body ridge of the best available matrix.
    const dsp::DopplerTimeMatrix& seg_src = torso_based ? torso_dtm : feet_dtm;
    result.segments = events::segment_gait(events::extract_torso_velocity(seg_src, p), p);

    // Event detection per configuration family.
    events::DetectionResult det;
    const bool use_feet_detector = feet_based;  // C2/C4/C5/C6
    if (use_feet_detector)
        det = events::detect_events_feet(feet_dtm, result.segments, p);
    else
        det = events::detect_events_torso(torso_dtm, result.segments, p);
    result.low_snr_segments = det.low_snr_segments;
    result.events = events::assign_feet(det.events, result.segments, p);

    result.records = temporal_params(result.events, result.segments);

    // Spatial parameters: torso velocity where a torso node exists, range
    // tracking otherwise (C2/C4).
    if (torso_based) {
        spatial_from_torso_velocity(result.records, torso_dtm, p);
    } else {
        if (req.feet_nodes == 2) {
            // per-cycle majority provenance decides which node's track to use
            std::vector<StrideRecord> from_near = result.records;
            std::vector<StrideRecord> from_far = result.records;
            spatial_from_range(from_near, nodes.feet_nodes[0].track);
            spatial_from_range(from_far, nodes.feet_nodes[1].track);
            const auto& m = feet_dtm;
            for (std::size_t i = 0; i < result.records.size(); ++i) {
                const auto& r = result.records[i];
                const std::size_t a = std::min(
                    m.n_frames - 1,
                    std::size_t(std::max(0.0, (r.cycle_start_s - m.t0_s) * m.frame_rate_hz)));
                const std::size_t b = std::min(
                    m.n_frames - 1,
                    std::size_t(std::max(0.0, (r.cycle_end_s - m.t0_s) * m.frame_rate_hz)));
                std::size_t far_votes = 0;
                for (std::size_t f = a; f <= b; ++f) far_votes += feet_prov[f];
                result.records[i] =
                    2 * far_votes > (b - a + 1) ? from_far[i] : from_near[i];
            }
        } else {
            spatial_from_range(result.records, nodes.feet_nodes[0].track);
        }
    }

    if (feet_based) foot_max_velocity(result.records, feet_dtm, p);
    return result;
}

}  // namespace gaitrad::params
