#pragma once

#include <cstdint>
#include <vector>

#include "gaitrad/common.hpp"
#include "gaitrad/gait_types.hpp"

namespace gaitrad::sim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

struct WalkerProfile {
    double stride_time_s = 1.1;
    double stride_length_m = 1.2;
    double duty_factor = 0.6;           // fraction of the cycle in stance
    double torso_height_m = 0.95;
    double foot_peak_velocity_mps = 3.0;
    double torso_velocity_modulation = 0.12;  // two-per-stride speed oscillation
    double asymmetry = 1.0;             // left/right ratio of swing aggressiveness
    double torso_jitter = 0.0;          // per-stride modulation irregularity (PD-like)
    double limb_clutter = 0.0;          // reflectivity of mid-height clutter scatterers
};

enum class Protocol { Tug, ContinuousWalk };
enum class Pace { Slow, Normal, Quick };

struct TrialScript {
    Protocol protocol = Protocol::ContinuousWalk;
    double path_length_m = 3.0;
    int repetitions = 1;  // legs for continuous walk, full out-and-back cycles for TUG
    Pace pace = Pace::Normal;
    double duration_cap_s = 0.0;  // 0 = uncapped
    double turn_time_s = 2.0;
    double pause_time_s = 2.0;  // stand-up/sit-down dwell (TUG)
    double path_start_x_m = 1.0;
};

enum class PartKind { Torso, FootLeft, FootRight, Limb };

struct ScattererPart {
    PartKind kind = PartKind::Torso;
    double reflectivity = 1.0;
    std::vector<Vec3> positions;  // sampled at the chirp rate
};

struct ScattererTracks {
    double dt_s = 0.0;  // chirp period
    std::vector<ScattererPart> parts;

    std::size_t samples() const { return parts.empty() ? 0 : parts.front().positions.size(); }
    double duration() const { return double(samples()) * dt_s; }
    const ScattererPart* find(PartKind k) const {
        for (const auto& p : parts)
            if (p.kind == k) return &p;
        return nullptr;
    }
};

struct GroundTruth {
    std::vector<GaitEvent> events;        // HS/TO with foot labels, walking bouts only
    std::vector<StrideRecord> records;    // one per complete gait cycle
    std::vector<GaitSegment> segments;    // straight bouts; turns/pauses excluded
    double mean_speed_mps = 0.0;
    double trial_duration_s = 0.0;
};

struct WalkerOutput {
    ScattererTracks tracks;
    GroundTruth truth;
};

// Builds the scatterer trajectories and the exact event/parameter ground
// truth for one trial. Feet are pinned (exactly zero velocity) during
// stance; swing speed follows a raised-cosine ramp/plateau profile peaking
// at the profile's foot peak velocity; torso speed carries the two-per-stride
// modulation with maxima at the heel strikes. `torso_jitter` randomizes the
// per-stride modulation amplitude/phase, which blurs the torso peaks without
// touching the feet.
WalkerOutput synthesize_walker(const WalkerProfile& profile, const TrialScript& script,
                               double chirp_rate_hz, std::uint64_t seed = 0);

// Pace multiplier applied to the stride time.
double pace_time_factor(Pace pace);

}  // namespace gaitrad::sim
