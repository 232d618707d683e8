#include "gaitrad/sim/walker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gaitrad::sim {

namespace {

// Normalized swing speed profile: raised-cosine ramps of fraction r at both
// ends with a flat top in between. Peak value is 1 and the integral is 1-r,
// so the ramp fraction falls directly out of the required mean/peak ratio.
// Integral of the shape over [0, u]:
double swing_shape_integral(double u, double r) {
    u = std::clamp(u, 0.0, 1.0);
    if (r <= 0.0) return u;
    if (u < r) return 0.5 * (u - (r / kPi) * std::sin(kPi * u / r));
    if (u <= 1.0 - r) return 0.5 * r + (u - r);
    const double tail = 1.0 - u;  // in [0, r]
    const double full = 1.0 - r;  // integral up to u = 1 would be 1-r
    return full - (0.5 * tail - (r / (2.0 * kPi)) * std::sin(kPi * tail / r));
}

struct FootTiming {
    double stance = 0.0;
    double swing = 0.0;
    double peak_v = 0.0;
};

struct Leg {
    double t0 = 0.0;
    double t_end = 0.0;  // end of the walking bout (turn starts here)
    int n_strides = 0;
    double dir = 1.0;     // +1 walks toward +x
    double x0 = 0.0;      // position of both feet at leg start
    double t_off = 0.0;   // left-to-right heel-strike offset
    std::vector<double> mod_amp;    // per stride
    std::vector<double> mod_phase;  // per stride
};

struct WalkPlan {
    double stride_t = 0.0;
    double stride_len = 0.0;
    double mean_v = 0.0;
    double ramp = 0.0;  // swing-shape ramp fraction
    FootTiming left, right;
    double step_lr = 0.0;  // first-step (and L->R heel spacing) length
    std::vector<Leg> legs;
    double total_duration = 0.0;
    double torso_z = 0.0;
};

// Exact torso displacement from leg start to local time u in [0, n*T].
double torso_displacement(const Leg& leg, const WalkPlan& plan, double u) {
    const double T = plan.stride_t;
    const int k = std::min<int>(int(u / T), leg.n_strides - 1);
    // whole strides displace exactly stride_len each
    double x = double(k) * plan.stride_len;
    const double du = u - double(k) * T;
    const double m = leg.mod_amp[std::size_t(k)];
    const double ph = leg.mod_phase[std::size_t(k)];
    x += plan.mean_v *
         (du + m * T / (4.0 * kPi) * (std::sin(4.0 * kPi * du / T + ph) - std::sin(ph)));
    return x;
}

double torso_x(const WalkPlan& plan, const Leg& leg, double t) {
    if (t <= leg.t0) return leg.x0;
    if (t >= leg.t_end) return leg.x0 + leg.dir * double(leg.n_strides) * plan.stride_len;
    return leg.x0 + leg.dir * torso_displacement(leg, plan, t - leg.t0);
}

// Position of one foot given its heel-strike grid inside a leg. Swings are
// amplitude-scaled copies of the common shape, so partial steps keep the
// same duration and ramp fraction.
struct SwingSpec {
    double t_start = 0.0;
    double duration = 0.0;
    double from_x = 0.0;
    double dist = 0.0;  // signed
};

double eval_foot(const std::vector<SwingSpec>& swings, double rest_x, double ramp, double t) {
    double x = rest_x;
    for (const auto& s : swings) {
        if (t >= s.t_start + s.duration) {
            x = s.from_x + s.dist;
        } else if (t > s.t_start) {
            const double u = (t - s.t_start) / s.duration;
            return s.from_x + s.dist * swing_shape_integral(u, ramp) / (1.0 - ramp);
        } else {
            break;
        }
    }
    return x;
}

}  // namespace

double pace_time_factor(Pace pace) {
    switch (pace) {
        case Pace::Slow: return 1.25;
        case Pace::Quick: return 0.8;
        default: return 1.0;
    }
}

WalkerOutput synthesize_walker(const WalkerProfile& profile, const TrialScript& script,
                               double chirp_rate_hz, std::uint64_t seed) {
    if (profile.stride_time_s <= 0.0) throw std::invalid_argument("stride_time must be positive");
    if (profile.duty_factor < 0.4 || profile.duty_factor >= 1.0)
        throw std::invalid_argument("duty_factor outside [0.4, 1)");
    if (profile.asymmetry <= 0.0) throw std::invalid_argument("asymmetry must be positive");
    if (profile.stride_length_m <= 0.0) throw std::invalid_argument("stride_length must be positive");
    if (profile.foot_peak_velocity_mps * profile.stride_time_s <= profile.stride_length_m)
        throw std::invalid_argument("foot peak velocity must exceed the mean walking speed");
    if (script.path_length_m <= 0.0) throw std::invalid_argument("path_length must be positive");
    if (script.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (chirp_rate_hz <= 0.0) throw std::invalid_argument("chirp rate must be positive");

    WalkPlan plan;
    plan.stride_t = profile.stride_time_s * pace_time_factor(script.pace);
    plan.stride_len = profile.stride_length_m;
    plan.mean_v = plan.stride_len / plan.stride_t;
    plan.torso_z = profile.torso_height_m;

    const double T = plan.stride_t;
    const double a = profile.asymmetry;
    const double swing_total = (1.0 - profile.duty_factor) * T;
    plan.left.swing = swing_total * 2.0 / (1.0 + a);
    plan.right.swing = swing_total * 2.0 * a / (1.0 + a);
    plan.left.stance = T - plan.left.swing;
    plan.right.stance = T - plan.right.swing;
    plan.left.peak_v = profile.foot_peak_velocity_mps;
    plan.right.peak_v = profile.foot_peak_velocity_mps / a;

    const double mean_peak_ratio = plan.stride_len / (plan.left.peak_v * plan.left.swing);
    if (mean_peak_ratio >= 1.0)
        throw std::invalid_argument("foot peak velocity too small for the stride length");
    plan.ramp = 1.0 - mean_peak_ratio;

    plan.step_lr = plan.stride_len * a / (1.0 + a);
    const double t_off = T * a / (1.0 + a);

    const int n_strides = int(std::floor(script.path_length_m / plan.stride_len));
    if (n_strides < 1) throw PipelineError("path too short");

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto make_leg = [&](double t0, double x0, double dir) {
        Leg leg;
        leg.t0 = t0;
        leg.n_strides = n_strides;
        leg.t_end = t0 + double(n_strides) * T;
        leg.dir = dir;
        leg.x0 = x0;
        leg.t_off = t_off;
        for (int k = 0; k < n_strides; ++k) {
            double m = profile.torso_velocity_modulation;
            double ph = 0.0;
            if (profile.torso_jitter > 0.0) {
                m *= std::max(0.0, 1.0 + profile.torso_jitter * gauss(rng));
                ph = profile.torso_jitter * gauss(rng) * (kPi / 2.0);
            }
            leg.mod_amp.push_back(std::min(m, 0.95));
            leg.mod_phase.push_back(ph);
        }
        return leg;
    };

    // Timeline: alternating legs separated by turns, with lead-in/out dwell.
    const double leg_duration = double(n_strides) * T;
    const bool tug = script.protocol == Protocol::Tug;
    const double lead = tug ? script.pause_time_s : 1.0;
    double cursor = lead;
    double x = script.path_start_x_m;
    double dir = 1.0;
    const int max_legs = tug ? 2 * script.repetitions : script.repetitions;
    for (int i = 0; i < max_legs; ++i) {
        const bool rep_boundary = tug && (i % 2 == 0) && i > 0;
        const double dwell = rep_boundary ? script.pause_time_s : 0.0;
        const double t_next = cursor + dwell + leg_duration + script.turn_time_s;
        if (script.duration_cap_s > 0.0 && !plan.legs.empty() &&
            t_next > script.duration_cap_s)
            break;
        cursor += dwell;
        plan.legs.push_back(make_leg(cursor, x, dir));
        cursor += leg_duration + script.turn_time_s;
        x += dir * double(n_strides) * plan.stride_len;
        dir = -dir;
    }
    plan.total_duration = cursor + (tug ? script.pause_time_s : 1.0);

    // Ground truth events and per-cycle records.
    GroundTruth truth;
    truth.mean_speed_mps = plan.mean_v;
    truth.trial_duration_s = plan.total_duration;
    for (const auto& leg : plan.legs) {
        GaitSegment seg;
        seg.start_s = leg.t0;
        seg.end_s = leg.t_end;
        seg.direction = leg.dir > 0 ? WalkDirection::TowardNode2 : WalkDirection::TowardNode1;
        truth.segments.push_back(seg);

        auto push = [&](EventKind k, Foot f, double t) {
            truth.events.push_back({k, f, t, EventSource::Truth});
        };
        for (int k = 0; k <= leg.n_strides; ++k)
            push(EventKind::HeelStrike, Foot::Left, leg.t0 + double(k) * T);
        for (int k = 0; k < leg.n_strides; ++k) {
            push(EventKind::ToeOff, Foot::Left, leg.t0 + double(k + 1) * T - plan.left.swing);
            push(EventKind::HeelStrike, Foot::Right, leg.t0 + leg.t_off + double(k) * T);
            push(EventKind::ToeOff, Foot::Right, leg.t0 + leg.t_off + double(k) * T - plan.right.swing);
        }

        auto displacement = [&](double ta, double tb) {
            return torso_displacement(leg, plan, tb - leg.t0) -
                   torso_displacement(leg, plan, ta - leg.t0);
        };
        auto make_record = [&](Foot f, double start, double step_t, const FootTiming& ft,
                               double ds) {
            StrideRecord r;
            r.foot = f;
            r.cycle_start_s = start;
            r.cycle_end_s = start + T;
            r.stride_time_s = T;
            r.step_time_s = step_t;
            r.stance_time_s = ft.stance;
            r.swing_time_s = ft.swing;
            r.double_support_time_s = ds;
            r.stride_distance_m = displacement(start, start + T);
            r.stride_velocity_mps = *r.stride_distance_m / T;
            r.step_distance_m = displacement(start, start + step_t);
            r.step_velocity_mps = *r.step_distance_m / step_t;
            r.foot_max_velocity_mps = ft.peak_v;
            r.cadence_spm = 60.0 / step_t;
            r.temporal_method = "truth";
            r.spatial_method = "truth";
            truth.records.push_back(r);
        };
        const double ds = plan.left.stance - leg.t_off;  // TO(one foot) - HS(other)
        for (int k = 0; k < leg.n_strides; ++k)
            make_record(Foot::Left, leg.t0 + double(k) * T, leg.t_off, plan.left, ds);
        const double ds_r = leg.t_off - plan.right.swing;
        for (int k = 0; k + 1 < leg.n_strides; ++k)
            make_record(Foot::Right, leg.t0 + leg.t_off + double(k) * T, T - leg.t_off,
                        plan.right, ds_r);
    }
    std::sort(truth.events.begin(), truth.events.end(),
              [](const GaitEvent& l, const GaitEvent& r) { return l.time_s < r.time_s; });

    // Per-foot swing tables for trajectory evaluation, including the short
    // first step of the right foot and its closing step during the turn.
    std::vector<SwingSpec> swings_l, swings_r;
    for (const auto& leg : plan.legs) {
        for (int k = 0; k < leg.n_strides; ++k) {
            SwingSpec s;
            s.t_start = leg.t0 + double(k + 1) * T - plan.left.swing;
            s.duration = plan.left.swing;
            s.from_x = leg.x0 + leg.dir * double(k) * plan.stride_len;
            s.dist = leg.dir * plan.stride_len;
            swings_l.push_back(s);
        }
        for (int k = 0; k < leg.n_strides; ++k) {
            SwingSpec s;
            s.t_start = leg.t0 + leg.t_off + double(k) * T - plan.right.swing;
            s.duration = plan.right.swing;
            if (k == 0) {
                s.from_x = leg.x0;
                s.dist = leg.dir * plan.step_lr;
            } else {
                s.from_x = leg.x0 + leg.dir * (plan.step_lr + double(k - 1) * plan.stride_len);
                s.dist = leg.dir * plan.stride_len;
            }
            swings_r.push_back(s);
        }
        // closing step: right foot joins the left during the turn
        SwingSpec close;
        close.t_start = leg.t_end + (leg.t_off - plan.right.swing);
        close.duration = plan.right.swing;
        close.from_x = leg.x0 + leg.dir * (plan.step_lr + double(leg.n_strides - 1) * plan.stride_len);
        close.dist = leg.dir * (plan.stride_len - plan.step_lr);
        swings_r.push_back(close);
    }

    // Sample the tracks at the chirp rate.
    const double dt = 1.0 / chirp_rate_hz;
    const std::size_t n_samples = std::size_t(std::ceil(plan.total_duration / dt));
    ScattererTracks tracks;
    tracks.dt_s = dt;

    ScattererPart torso{PartKind::Torso, 1.0, {}};
    ScattererPart foot_l{PartKind::FootLeft, 0.3, {}};
    ScattererPart foot_r{PartKind::FootRight, 0.3, {}};
    torso.positions.reserve(n_samples);
    foot_l.positions.reserve(n_samples);
    foot_r.positions.reserve(n_samples);

    const double x_start = script.path_start_x_m;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = double(i) * dt;
        const Leg* active = nullptr;
        const Leg* last_done = nullptr;
        for (const auto& leg : plan.legs) {
            if (t >= leg.t0 && t < leg.t_end) {
                active = &leg;
                break;
            }
            if (t >= leg.t_end) last_done = &leg;
        }
        double xt;
        if (active != nullptr) {
            xt = torso_x(plan, *active, t);
        } else if (last_done != nullptr) {
            xt = torso_x(plan, *last_done, t);
        } else {
            xt = x_start;
        }
        torso.positions.push_back({xt, 0.0, plan.torso_z});
        foot_l.positions.push_back({eval_foot(swings_l, x_start, plan.ramp, t), 0.0, 0.05});
        foot_r.positions.push_back({eval_foot(swings_r, x_start, plan.ramp, t), 0.0, 0.05});
    }
    tracks.parts.push_back(std::move(torso));
    tracks.parts.push_back(std::move(foot_l));
    tracks.parts.push_back(std::move(foot_r));

    if (profile.limb_clutter > 0.0) {
        ScattererPart limb{PartKind::Limb, profile.limb_clutter, {}};
        limb.positions.reserve(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const double t = double(i) * dt;
            const Vec3 base = tracks.parts[0].positions[i];
            double osc = 0.0;
            for (const auto& leg : plan.legs) {
                if (t >= leg.t0 && t < leg.t_end) {
                    const double gate = std::min(
                        1.0, std::min((t - leg.t0) / T, (leg.t_end - t) / T));
                    osc = 0.2 * gate * std::sin(2.0 * kPi * (t - leg.t0) / T);
                    break;
                }
            }
            limb.positions.push_back({base.x + osc, 0.15, 0.55});
        }
        tracks.parts.push_back(std::move(limb));
    }

    return {std::move(tracks), std::move(truth)};
}

}  // namespace gaitrad::sim
