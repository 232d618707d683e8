#pragma once

#include <optional>
#include <vector>

#include "gaitrad/dsp/pipeline.hpp"
#include "gaitrad/gait_types.hpp"

namespace gaitrad::events {

// Signed velocity series extracted from a Doppler-time matrix.
struct VelocitySeries {
    std::vector<double> v_mps;          // NaN where extraction failed
    std::vector<bool> valid;
    double frame_rate_hz = 0.0;
    double t0_s = 0.0;

    double time_of(std::size_t i) const { return t0_s + double(i) / frame_rate_hz; }
    std::size_t index_of(double t) const {
        const double f = (t - t0_s) * frame_rate_hz;
        return f <= 0.0 ? 0 : std::min(std::size_t(f + 0.5), v_mps.size() - 1);
    }
};

struct EventParams {
    // segmentation
    double walk_threshold_mps = 0.25;
    double min_segment_s = 1.0;
    double segment_smooth_s = 0.25;
    // feet detector
    double feet_threshold_db = 10.0;   // envelope power over the frame median
    double torso_threshold_db = 8.0;   // torso ridge power over the frame median
    double near_zero_mps = 0.15;       // quiet band
    double min_quiet_s = 0.08;
    double envelope_median_s = 0.025;
    double torso_notch_mps = 0.35;     // half-width around the torso ridge
    double activity_guard_mps = 0.6;   // swing evidence required next to a quiet run
    double activity_window_s = 0.30;
    double min_valid_fraction = 0.5;   // else the segment is flagged low-SNR
    double min_frame_snr_db = 5.0;
    // torso detector
    double torso_lowpass_hz = 5.0;
    double torso_peak_prominence_mps = 0.04;
    // matching / labeling
    double match_window_steps = 0.5;   // fraction of the median step time
    double duplicate_window_steps = 0.25;
};

struct MatchedPair {
    GaitEvent truth;
    GaitEvent detected;
    double dt_s = 0.0;  // detected - truth
};

struct MatchReport {
    std::vector<MatchedPair> matched;
    std::vector<GaitEvent> missed;           // truth HS with no detection
    std::vector<GaitEvent> false_detections; // detections with no truth partner
    std::size_t truth_hs_count = 0;
    double hs_detection_ratio = 0.0;
    double mean_abs_dt_s = 0.0;
};

struct DetectionResult {
    std::vector<GaitEvent> events;
    std::vector<std::size_t> low_snr_segments;  // indices into the segment list
};

// Power-weighted centroid of the dominant body ridge, low-velocity band.
// Works on torso-node matrices and on feet-node matrices (where the torso is
// still the strongest return).
VelocitySeries extract_torso_velocity(const dsp::DopplerTimeMatrix& dtm,
                                      const EventParams& p = {});

// Upper envelope of the feet contribution: the highest-|velocity| bin above
// the power threshold outside the torso notch. Zero when nothing clears the
// threshold (feet at rest), NaN where the frame SNR is too low to tell.
VelocitySeries extract_feet_envelope(const dsp::DopplerTimeMatrix& dtm,
                                     const std::vector<double>& frame_snr_db,
                                     const EventParams& p = {});

// Straight walking bouts: |smoothed v| above threshold for at least
// min_segment_s, split where the velocity sign reverses.
std::vector<GaitSegment> segment_gait(const VelocitySeries& torso_velocity,
                                      const EventParams& p = {});

// Heel strikes at the collapses of the feet envelope into the quiet band,
// toe-offs where it climbs back out.
DetectionResult detect_events_feet(const dsp::DopplerTimeMatrix& fused_feet,
                                   const std::vector<GaitSegment>& segments,
                                   const EventParams& p = {});

// Heel strikes at torso-speed maxima, toe-offs at torso-acceleration maxima.
DetectionResult detect_events_torso(const dsp::DopplerTimeMatrix& torso_dtm,
                                    const std::vector<GaitSegment>& segments,
                                    const EventParams& p = {});

// Alternating L/R heel-strike labels per segment (duplicates dropped,
// dropouts resynchronized); each toe-off inherits the foot whose stance it
// ends. Events outside any segment keep Foot::Unknown.
std::vector<GaitEvent> assign_feet(std::vector<GaitEvent> events,
                                   const std::vector<GaitSegment>& segments,
                                   const EventParams& p = {});

// Greedy nearest-in-time matching of heel strikes within half the median
// truth step time. The first and last gait cycle of each foot in each
// segment is excluded from the ratio denominator.
MatchReport match_events(const std::vector<GaitEvent>& detected,
                         const std::vector<GaitEvent>& truth,
                         const std::vector<GaitSegment>& segments,
                         const EventParams& p = {});

// Median interval between consecutive heel strikes (any foot).
std::optional<double> median_step_time(const std::vector<GaitEvent>& events);

// Linear-phase low-pass smoothing used by the torso detector.
std::vector<double> lowpass(const std::vector<double>& x, double frame_rate_hz, double cutoff_hz);

}  // namespace gaitrad::events
