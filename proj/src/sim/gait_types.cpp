#include "gaitrad/gait_types.hpp"

namespace gaitrad {

const char* to_string(EventKind k) { return k == EventKind::HeelStrike ? "HS" : "TO"; }

const char* to_string(Foot f) {
    switch (f) {
        case Foot::Left: return "L";
        case Foot::Right: return "R";
        default: return "U";
    }
}

const char* to_string(EventSource s) {
    switch (s) {
        case EventSource::FeetAlg: return "feet_alg";
        case EventSource::TorsoAlg: return "torso_alg";
        default: return "truth";
    }
}

Foot opposite(Foot f) {
    if (f == Foot::Left) return Foot::Right;
    if (f == Foot::Right) return Foot::Left;
    return Foot::Unknown;
}

const std::vector<std::string>& parameter_names() {
    static const std::vector<std::string> names = {
        "stride_time",         "step_time",     "stance_time",     "swing_time",
        "double_support_time", "stride_velocity", "step_velocity", "stride_distance",
        "step_distance",       "foot_max_velocity"};
    return names;
}

std::optional<double> parameter_value(const StrideRecord& r, const std::string& name) {
    if (name == "stride_time") return r.stride_time_s;
    if (name == "step_time") return r.step_time_s;
    if (name == "stance_time") return r.stance_time_s;
    if (name == "swing_time") return r.swing_time_s;
    if (name == "double_support_time") return r.double_support_time_s;
    if (name == "stride_velocity") return r.stride_velocity_mps;
    if (name == "step_velocity") return r.step_velocity_mps;
    if (name == "stride_distance") return r.stride_distance_m;
    if (name == "step_distance") return r.step_distance_m;
    if (name == "foot_max_velocity") return r.foot_max_velocity_mps;
    if (name == "cadence") return r.cadence_spm;
    return std::nullopt;
}

}  // namespace gaitrad
