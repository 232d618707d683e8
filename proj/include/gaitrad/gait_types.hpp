#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gaitrad {

enum class EventKind { HeelStrike, ToeOff };
enum class Foot { Left, Right, Unknown };
enum class EventSource { FeetAlg, TorsoAlg, Truth };

struct GaitEvent {
    EventKind kind = EventKind::HeelStrike;
    Foot foot = Foot::Unknown;
    double time_s = 0.0;
    EventSource source = EventSource::Truth;
};

enum class WalkDirection { TowardNode1, TowardNode2 };

// One straight walking bout; turning/standing/sitting falls between segments.
struct GaitSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    WalkDirection direction = WalkDirection::TowardNode1;

    bool contains(double t) const { return t >= start_s && t <= end_s; }
    double duration() const { return end_s - start_s; }
};

// The ten spatiotemporal parameters of one gait cycle, plus cadence.
// Fields measured by an unavailable method stay unset.
struct StrideRecord {
    Foot foot = Foot::Unknown;
    double cycle_start_s = 0.0;
    double cycle_end_s = 0.0;

    std::optional<double> stride_time_s;
    std::optional<double> step_time_s;
    std::optional<double> stance_time_s;
    std::optional<double> swing_time_s;
    std::optional<double> double_support_time_s;
    std::optional<double> stride_velocity_mps;
    std::optional<double> step_velocity_mps;
    std::optional<double> stride_distance_m;
    std::optional<double> step_distance_m;
    std::optional<double> foot_max_velocity_mps;
    std::optional<double> cadence_spm;

    std::string temporal_method;  // "feet" | "torso" | "truth"
    std::string spatial_method;   // "torso_velocity" | "range_track" | "truth" | ""
};

const char* to_string(EventKind k);
const char* to_string(Foot f);
const char* to_string(EventSource s);
Foot opposite(Foot f);

// Names of the ten parameters in report order.
const std::vector<std::string>& parameter_names();

// Reads the named parameter field from a record (empty when unset).
std::optional<double> parameter_value(const StrideRecord& r, const std::string& name);

}  // namespace gaitrad
