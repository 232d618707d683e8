#pragma once

#include <string>
#include <vector>

#include "gaitrad/events/detect.hpp"
#include "gaitrad/fusion/fusion.hpp"

namespace gaitrad::params {

enum class RadarConfiguration { C1, C2, C3, C4, C5, C6 };

struct ConfigRequirements {
    int torso_nodes = 0;
    int feet_nodes = 0;
};

ConfigRequirements requirements(RadarConfiguration c);
RadarConfiguration parse_configuration(const std::string& name);
const char* to_string(RadarConfiguration c);

// Smoothed per-frame target range (power-weighted centroid of the masked bins).
struct RangeTrack {
    std::vector<double> range_m;
    std::vector<bool> valid;
    double frame_rate_hz = 0.0;
    double t0_s = 0.0;

    std::size_t index_of(double t) const {
        const double f = (t - t0_s) * frame_rate_hz;
        return f <= 0.0 ? 0 : std::min(std::size_t(f + 0.5), range_m.size() - 1);
    }
};

RangeTrack range_track(const dsp::RangeTimeMatrix& rtm, const dsp::TargetMask& mask,
                       double median_smooth_s = 0.25);

// One node after the per-node DSP chain. Far-end nodes carry their matrix
// already flipped into the reference Doppler sign convention.
struct ProcessedNode {
    std::uint32_t node_id = 0;
    dsp::DopplerTimeMatrix dtm;
    std::vector<double> snr_db;
    RangeTrack track;
    bool flipped = false;
};

struct TrialMatrices {
    std::vector<ProcessedNode> torso_nodes;
    std::vector<ProcessedNode> feet_nodes;
};

struct ExtractionResult {
    std::vector<GaitSegment> segments;
    std::vector<GaitEvent> events;  // foot-labeled
    std::vector<StrideRecord> records;
    std::vector<std::size_t> low_snr_segments;
    std::size_t fusion_switches = 0;  // feet pair, when fused
};

// Temporal parameters of every complete cycle inside the segments:
// stride HSf->HSf, step HSf->HSother, stance HSf->TOf, swing TOf->HSf,
// double support HSother->TOf, cadence = 60/step. Cycles missing their
// toe-off or opposite strike are omitted.
std::vector<StrideRecord> temporal_params(const std::vector<GaitEvent>& labeled_events,
                                          const std::vector<GaitSegment>& segments);

// Mean |torso velocity| over each cycle/step window; distance = velocity * time.
void spatial_from_torso_velocity(std::vector<StrideRecord>& records,
                                 const dsp::DopplerTimeMatrix& torso_dtm,
                                 const events::EventParams& p = {});

// |R(end) - R(start)| over each window from the range track; velocity =
// distance / time. Windows with track gaps stay unset.
void spatial_from_range(std::vector<StrideRecord>& records, const RangeTrack& track);

// Max |feet envelope| inside each swing phase.
void foot_max_velocity(std::vector<StrideRecord>& records,
                       const dsp::DopplerTimeMatrix& fused_feet,
                       const events::EventParams& p = {});

// Full configuration dispatch (Table-style C1..C6 node layouts). Node counts
// must match the configuration exactly.
ExtractionResult extract_all(const TrialMatrices& nodes, RadarConfiguration config,
                             const events::EventParams& p = {});

}  // namespace gaitrad::params
