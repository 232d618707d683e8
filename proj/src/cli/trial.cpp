#include "gaitrad/cli/trial.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "gaitrad/io/iq_file.hpp"
#include "gaitrad/io/svg.hpp"

namespace gaitrad::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kFeetNodeHeight = 0.25;
constexpr double kTorsoNodeHeight = 1.2;

double get_num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw PipelineError("config: " + key + " must be a number");
    return j.at(key).get<double>();
}

sim::WalkerProfile parse_walker(const json& j) {
    sim::WalkerProfile w;
    w.stride_time_s = get_num(j, "stride_time_s", w.stride_time_s);
    w.stride_length_m = get_num(j, "stride_length_m", w.stride_length_m);
    w.duty_factor = get_num(j, "duty_factor", w.duty_factor);
    w.torso_height_m = get_num(j, "torso_height_m", w.torso_height_m);
    w.foot_peak_velocity_mps = get_num(j, "foot_peak_velocity_mps", w.foot_peak_velocity_mps);
    w.torso_velocity_modulation =
        get_num(j, "torso_velocity_modulation", w.torso_velocity_modulation);
    w.asymmetry = get_num(j, "asymmetry", w.asymmetry);
    w.torso_jitter = get_num(j, "torso_jitter", w.torso_jitter);
    w.limb_clutter = get_num(j, "limb_clutter", w.limb_clutter);
    return w;
}

sim::TrialScript parse_script(const json& j) {
    sim::TrialScript s;
    const std::string protocol = j.value("protocol", "continuous_walk");
    if (protocol == "TUG" || protocol == "tug")
        s.protocol = sim::Protocol::Tug;
    else if (protocol == "continuous_walk")
        s.protocol = sim::Protocol::ContinuousWalk;
    else
        throw PipelineError("config: protocol must be TUG or continuous_walk, got " + protocol);
    s.path_length_m = get_num(j, "path_length_m", s.path_length_m);
    s.repetitions = int(get_num(j, "repetitions", s.repetitions));
    const std::string pace = j.value("pace", "normal");
    if (pace == "slow")
        s.pace = sim::Pace::Slow;
    else if (pace == "quick")
        s.pace = sim::Pace::Quick;
    else if (pace == "normal")
        s.pace = sim::Pace::Normal;
    else
        throw PipelineError("config: pace must be slow, normal or quick, got " + pace);
    s.duration_cap_s = get_num(j, "duration_cap_s", s.duration_cap_s);
    s.turn_time_s = get_num(j, "turn_time_s", s.turn_time_s);
    s.pause_time_s = get_num(j, "pause_time_s", s.pause_time_s);
    s.path_start_x_m = get_num(j, "path_start_x_m", s.path_start_x_m);
    return s;
}

sim::NodeGeometry parse_node(const json& j, std::uint32_t index) {
    sim::NodeGeometry n;
    n.id = std::uint32_t(get_num(j, "id", index));
    const std::string focus = j.value("focus", "torso");
    if (focus == "feet")
        n.focus = sim::NodeFocus::Feet;
    else if (focus == "torso")
        n.focus = sim::NodeFocus::Torso;
    else
        throw PipelineError("config: node focus must be torso or feet");
    if (j.contains("position_m")) {
        const auto& p = j.at("position_m");
        if (!p.is_array() || p.size() != 3)
            throw PipelineError("config: node position_m must be [x, y, z]");
        n.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    }
    if (j.contains("boresight")) {
        const auto& b = j.at("boresight");
        if (!b.is_array() || b.size() != 3)
            throw PipelineError("config: node boresight must be [x, y, z]");
        n.boresight = sim::Vec3{b[0].get<double>(), b[1].get<double>(), b[2].get<double>()}
                          .normalized();
    }
    n.beamwidth_deg = get_num(j, "beamwidth_deg", n.beamwidth_deg);
    return n;
}

}  // namespace

std::vector<sim::NodeGeometry> default_node_layout(int torso_nodes, int feet_nodes,
                                                   double path_start_m, double path_span_m) {
    const double near_x = path_start_m - 1.0;
    const double far_x = path_start_m + path_span_m + 1.0;
    std::vector<sim::NodeGeometry> nodes;
    std::uint32_t id = 0;
    for (int i = 0; i < torso_nodes; ++i) {
        sim::NodeGeometry n;
        n.id = id++;
        n.focus = sim::NodeFocus::Torso;
        n.position = {i == 0 ? near_x : far_x, 0.0, kTorsoNodeHeight};
        n.boresight = {i == 0 ? 1.0 : -1.0, 0.0, 0.0};
        nodes.push_back(n);
    }
    for (int i = 0; i < feet_nodes; ++i) {
        sim::NodeGeometry n;
        n.id = id++;
        n.focus = sim::NodeFocus::Feet;
        n.position = {i == 0 ? near_x : far_x, 0.0, kFeetNodeHeight};
        n.boresight = {i == 0 ? 1.0 : -1.0, 0.0, 0.0};
        nodes.push_back(n);
    }
    return nodes;
}

TrialConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw PipelineError(std::string("config: invalid JSON: ") + e.what());
    }

    TrialConfig cfg;
    if (j.contains("configurations")) {
        for (const auto& c : j.at("configurations"))
            cfg.configurations.push_back(params::parse_configuration(c.get<std::string>()));
    } else if (j.contains("configuration")) {
        cfg.configurations.push_back(
            params::parse_configuration(j.at("configuration").get<std::string>()));
    } else {
        throw PipelineError("config: missing configuration");
    }

    if (j.contains("waveform")) {
        const auto& w = j.at("waveform");
        cfg.waveform.f0_hz = get_num(w, "f0_ghz", cfg.waveform.f0_hz / 1e9) * 1e9;
        cfg.waveform.b_hz = get_num(w, "b_ghz", cfg.waveform.b_hz / 1e9) * 1e9;
        cfg.waveform.tc_s = get_num(w, "tc_us", cfg.waveform.tc_s * 1e6) / 1e6;
        cfg.waveform.fs_hz = get_num(w, "fs_ksps", cfg.waveform.fs_hz / 1e3) * 1e3;
    }
    cfg.waveform.validate();

    cfg.seed = std::uint64_t(get_num(j, "seed", 1));
    cfg.snr_db = get_num(j, "snr_db", cfg.snr_db);
    cfg.output_dir = j.value("output_dir", "");
    cfg.write_iq = j.value("write_iq", false);
    cfg.plots = j.value("plots", true);

    if (j.contains("nodes")) {
        std::uint32_t index = 0;
        for (const auto& n : j.at("nodes")) cfg.nodes.push_back(parse_node(n, index++));
    }
    if (j.contains("trials")) {
        for (const auto& t : j.at("trials")) {
            TrialSpec spec;
            spec.label = t.value("label", "trial" + std::to_string(cfg.trials.size() + 1));
            spec.group = t.value("group", "G1");
            spec.script = parse_script(t);
            if (t.contains("walker")) spec.walker = parse_walker(t.at("walker"));
            cfg.trials.push_back(spec);
        }
    }
    if (j.contains("iq_inputs"))
        for (const auto& p : j.at("iq_inputs")) cfg.iq_inputs.push_back(p.get<std::string>());

    if (cfg.trials.empty()) throw PipelineError("config: at least one trial is required");
    return cfg;
}

TrialConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot read config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

params::ProcessedNode process_node(const sim::IqCube& cube, const sim::RadarWaveform& wf,
                                   bool flip, const dsp::DspParams& dp) {
    params::ProcessedNode out;
    out.node_id = cube.node_id;
    dsp::RangeTimeMatrix rtm = dsp::range_transform(cube, wf);
    rtm = dsp::clutter_filter(rtm, dp);
    const dsp::TargetMask mask = dsp::select_target_bins(rtm, dp);
    out.track = params::range_track(rtm, mask);
    const dsp::SlowTimeSeries series = dsp::integrate_bins(rtm, mask);
    rtm = dsp::RangeTimeMatrix{};  // release before the STFT allocates
    dsp::DopplerTimeMatrix dtm = dsp::doppler_transform(series, wf.f0_hz, dp);
    if (flip) dtm = fusion::doppler_flip(dtm);
    out.flipped = flip;
    out.snr_db = dsp::estimate_frame_snr(dtm, dp);
    out.dtm = std::move(dtm);
    return out;
}

namespace {

std::uint64_t node_seed(std::uint64_t trial_seed, std::uint32_t node_id) {
    return trial_seed * 0x100000001b3ull + 0x9e3779b97f4a7c15ull * (node_id + 1);
}

// Pair each surviving truth cycle with the radar record bounded by the
// detected strikes matched to the cycle's own strikes.
std::vector<std::pair<const StrideRecord*, const StrideRecord*>> pair_records(
    const events::MatchReport& match, const std::vector<StrideRecord>& truth_records,
    const std::vector<StrideRecord>& radar_records) {
    auto detected_time = [&](double truth_time) -> std::optional<double> {
        for (const auto& m : match.matched)
            if (m.truth.kind == EventKind::HeelStrike &&
                std::abs(m.truth.time_s - truth_time) < 1e-6)
                return m.detected.time_s;
        return std::nullopt;
    };
    std::vector<std::pair<const StrideRecord*, const StrideRecord*>> pairs;
    for (const auto& tr : truth_records) {
        const auto t1 = detected_time(tr.cycle_start_s);
        const auto t2 = detected_time(tr.cycle_end_s);
        if (!t1 || !t2) continue;
        for (const auto& rr : radar_records) {
            if (std::abs(rr.cycle_start_s - *t1) < 1e-6 && std::abs(rr.cycle_end_s - *t2) < 1e-6) {
                pairs.emplace_back(&tr, &rr);
                break;
            }
        }
    }
    return pairs;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw PipelineError("cannot write: " + path);
    out << text;
}

}  // namespace

std::string report_to_json(const TrialReport& report) {
    json j;
    j["schema_version"] = report.schema_version;
    j["tool_version"] = report.tool_version;
    j["seed"] = report.seed;
    j["snr_db"] = report.snr_db;
    j["config_hash"] = report.config_hash;
    json configs = json::object();
    for (const auto& [name, cr] : report.configurations) {
        json c;
        c["hs_detection_ratio"] = cr.hs_ratio;
        c["hs_ratio_per_test"] = cr.hs_ratio_per_test;
        c["truth_hs"] = cr.truth_hs;
        c["matched_hs"] = cr.matched_hs;
        c["mean_abs_dt_s"] = cr.mean_abs_dt_s;
        c["fusion_switches"] = cr.fusion_switches;
        c["low_snr_segments"] = cr.low_snr_segments;
        c["record_count"] = cr.record_count;
        json params_j = json::object();
        for (const auto& [p, s] : cr.parameters) {
            params_j[p] = {{"mean_abs_err", s.mean_abs_err},
                           {"mean_rel_err", s.mean_rel_err},
                           {"n", s.n}};
        }
        c["parameters"] = params_j;
        json agree = json::object();
        for (const auto& [p, a] : cr.agreement) {
            json aj = {{"mean_difference", a.mean_difference},
                       {"loa_low", a.loa_low},
                       {"loa_high", a.loa_high},
                       {"n", a.n}};
            if (a.pearson_r) aj["pearson_r"] = *a.pearson_r;
            if (a.pearson_p) aj["pearson_p"] = *a.pearson_p;
            agree[p] = aj;
        }
        c["agreement"] = agree;
        c["p_g"] = cr.p_g;
        configs[name] = c;
    }
    j["configurations"] = configs;
    j["p_c"] = report.p_c;
    return j.dump(2) + "\n";
}

std::vector<std::string> emit_plots(const TrialReport& report,
                                    const std::vector<stats::ErrorRecord>& cycle_errors,
                                    const std::string& dir) {
    fs::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& name : parameter_names()) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& e : cycle_errors)
            if (e.parameter == name) pairs.emplace_back(e.truth, e.estimate);
        if (pairs.size() < 2) {
            std::cerr << "plot skipped (no records): " << name << "\n";
            continue;
        }
        std::string r_label;
        for (const auto& [cname, cr] : report.configurations) {
            const auto it = cr.agreement.find(name);
            if (it != cr.agreement.end() && it->second.pearson_r) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%s r = %.3f", cname.c_str(),
                              *it->second.pearson_r);
                r_label = buf;
                break;
            }
        }
        const std::string corr = dir + "/corr_" + name + ".svg";
        io::write_correlation_svg(corr, name, pairs, r_label);
        written.push_back(corr);

        const auto summary = stats::bland_altman(pairs);
        const std::string ba = dir + "/ba_" + name + ".svg";
        io::write_bland_altman_svg(ba, name, pairs, summary.mean_difference, summary.loa_low,
                                   summary.loa_high);
        written.push_back(ba);
    }
    return written;
}

TrialOutput run_trial(const TrialConfig& config) {
    if (config.configurations.empty()) throw PipelineError("config: no configurations requested");

    // node layout
    int need_torso = 0, need_feet = 0;
    for (const auto c : config.configurations) {
        const auto req = params::requirements(c);
        need_torso = std::max(need_torso, req.torso_nodes);
        need_feet = std::max(need_feet, req.feet_nodes);
    }
    std::vector<sim::NodeGeometry> nodes = config.nodes;
    if (nodes.empty()) {
        double span = 0.0, start = 1e300;
        for (const auto& t : config.trials) {
            const int strides =
                int(std::floor(t.script.path_length_m / t.walker.stride_length_m));
            span = std::max(span, double(strides) * t.walker.stride_length_m);
            start = std::min(start, t.script.path_start_x_m);
        }
        nodes = default_node_layout(need_torso, need_feet, start, span);
    }
    std::vector<sim::NodeGeometry> torso_nodes, feet_nodes;
    for (const auto& n : nodes)
        (n.focus == sim::NodeFocus::Torso ? torso_nodes : feet_nodes).push_back(n);
    auto by_x = [](const sim::NodeGeometry& a, const sim::NodeGeometry& b) {
        return a.position.x < b.position.x;
    };
    std::sort(torso_nodes.begin(), torso_nodes.end(), by_x);
    std::sort(feet_nodes.begin(), feet_nodes.end(), by_x);
    for (const auto c : config.configurations) {
        const auto req = params::requirements(c);
        if (int(torso_nodes.size()) < req.torso_nodes || int(feet_nodes.size()) < req.feet_nodes)
            throw PipelineError(std::string("configuration ") + params::to_string(c) +
                                " requires " + std::to_string(req.torso_nodes) +
                                " torso node(s) and " + std::to_string(req.feet_nodes) +
                                " feet node(s)");
    }
    if (!config.iq_inputs.empty() && config.trials.size() != 1)
        throw PipelineError("config: IQ ingestion supports exactly one trial");

    const std::string outdir = config.output_dir;
    if (!outdir.empty()) fs::create_directories(outdir);

    TrialOutput output;
    TrialReport& report = output.report;
    report.tool_version = kToolVersion;
    report.seed = config.seed;
    report.snr_db = config.snr_db;

    struct PerConfig {
        std::vector<stats::ErrorRecord> errors;
        std::vector<StrideRecord> records;
        std::vector<GaitEvent> events;
        std::size_t matched = 0, counted = 0;
        double dt_acc = 0.0;
        std::size_t dt_n = 0;
        std::map<std::string, std::array<std::size_t, 2>> per_test;  // matched, counted
        std::size_t fusion_switches = 0, low_snr = 0;
    };
    std::map<std::string, PerConfig> agg;
    for (const auto c : config.configurations) agg[params::to_string(c)];

    for (std::size_t ti = 0; ti < config.trials.size(); ++ti) {
        const TrialSpec& spec = config.trials[ti];
        const std::uint64_t trial_seed = config.seed * 0x100000001b3ull + ti;
        auto walked =
            sim::synthesize_walker(spec.walker, spec.script, config.waveform.chirp_rate_hz(),
                                   trial_seed);

        params::TrialMatrices matrices;
        auto render_or_load = [&](const sim::NodeGeometry& geom,
                                  std::size_t node_index) -> params::ProcessedNode {
            sim::IqCube cube;
            if (!config.iq_inputs.empty()) {
                if (node_index >= config.iq_inputs.size())
                    throw PipelineError("config: not enough iq_inputs for the node layout");
                auto rec = io::read_iq(config.iq_inputs[node_index]);
                cube = std::move(rec.cube);
            } else {
                cube = sim::render_iq(walked.tracks, geom, config.waveform, config.snr_db,
                                      node_seed(trial_seed, geom.id));
            }
            if (!outdir.empty() && config.write_iq) {
                io::write_iq(outdir + "/node" + std::to_string(geom.id) + "_trial" +
                                 std::to_string(ti) + ".gwiq",
                             cube, config.waveform);
            }
            const bool far_node = geom.boresight.x < 0.0;
            return process_node(cube, config.waveform, far_node, config.dsp);
        };
        std::size_t node_index = 0;
        for (const auto& g : torso_nodes)
            matrices.torso_nodes.push_back(render_or_load(g, node_index++));
        for (const auto& g : feet_nodes)
            matrices.feet_nodes.push_back(render_or_load(g, node_index++));

        output.truth_events.insert(output.truth_events.end(), walked.truth.events.begin(),
                                   walked.truth.events.end());
        output.truth_records.insert(output.truth_records.end(), walked.truth.records.begin(),
                                    walked.truth.records.end());

        for (const auto c : config.configurations) {
            const auto req = params::requirements(c);
            params::TrialMatrices slice;
            slice.torso_nodes.assign(matrices.torso_nodes.begin(),
                                     matrices.torso_nodes.begin() + req.torso_nodes);
            slice.feet_nodes.assign(matrices.feet_nodes.begin(),
                                    matrices.feet_nodes.begin() + req.feet_nodes);
            auto result = params::extract_all(slice, c, config.events);

            const auto match = events::match_events(result.events, walked.truth.events,
                                                    walked.truth.segments, config.events);
            PerConfig& pc = agg.at(params::to_string(c));
            std::size_t hs_matched = 0;
            for (const auto& m : match.matched)
                if (m.truth.kind == EventKind::HeelStrike) ++hs_matched;
            pc.matched += hs_matched;
            pc.counted += match.truth_hs_count;
            auto& per_test = pc.per_test[spec.label];
            per_test[0] += hs_matched;
            per_test[1] += match.truth_hs_count;
            for (const auto& m : match.matched)
                if (m.truth.kind == EventKind::HeelStrike) {
                    pc.dt_acc += std::abs(m.dt_s);
                    ++pc.dt_n;
                }
            pc.fusion_switches += result.fusion_switches;
            pc.low_snr += result.low_snr_segments.size();

            const auto pairs = pair_records(match, walked.truth.records, result.records);
            for (const auto& [tr, rr] : pairs) {
                for (const auto& name : parameter_names()) {
                    const auto tv = parameter_value(*tr, name);
                    const auto rv = parameter_value(*rr, name);
                    if (!tv || !rv) continue;
                    auto er = stats::error_metrics(*tv, *rv);
                    er.parameter = name;
                    er.group = spec.group;
                    er.configuration = params::to_string(c);
                    pc.errors.push_back(er);
                }
            }
            pc.records.insert(pc.records.end(), result.records.begin(), result.records.end());
            pc.events.insert(pc.events.end(), result.events.begin(), result.events.end());
        }
    }

    // aggregate summaries
    for (auto& [cname, pc] : agg) {
        ConfigurationReport cr;
        cr.truth_hs = pc.counted;
        cr.matched_hs = pc.matched;
        cr.hs_ratio = pc.counted > 0 ? double(pc.matched) / double(pc.counted) : 0.0;
        cr.mean_abs_dt_s = pc.dt_n > 0 ? pc.dt_acc / double(pc.dt_n) : 0.0;
        for (const auto& [label, mc] : pc.per_test)
            cr.hs_ratio_per_test[label] = mc[1] > 0 ? double(mc[0]) / double(mc[1]) : 0.0;
        cr.fusion_switches = pc.fusion_switches;
        cr.low_snr_segments = pc.low_snr;
        cr.record_count = pc.records.size();

        for (const auto& name : parameter_names()) {
            std::vector<double> abs_errs, rel_errs;
            std::vector<std::pair<double, double>> pairs;
            std::map<std::string, std::vector<double>> by_group;
            for (const auto& e : pc.errors) {
                if (e.parameter != name) continue;
                abs_errs.push_back(e.abs_err);
                if (e.rel_err) {
                    rel_errs.push_back(*e.rel_err);
                    by_group[e.group].push_back(*e.rel_err);
                }
                pairs.emplace_back(e.truth, e.estimate);
            }
            if (abs_errs.empty()) continue;
            ParameterSummary ps;
            ps.mean_abs_err = stats::mean(abs_errs);
            ps.mean_rel_err = rel_errs.empty() ? 0.0 : stats::mean(rel_errs);
            ps.n = abs_errs.size();
            cr.parameters[name] = ps;
            if (pairs.size() >= 2) cr.agreement[name] = stats::bland_altman(pairs);
            if (by_group.size() >= 2) {
                std::vector<std::vector<double>> groups;
                for (const auto& [g, v] : by_group) groups.push_back(v);
                cr.p_g[name] = stats::kruskal_wallis(groups).p_value;
            }
        }
        report.configurations[cname] = cr;
    }
    if (config.configurations.size() >= 2) {
        for (const auto& name : parameter_names()) {
            std::vector<std::vector<double>> groups;
            for (const auto& [cname, pc] : agg) {
                std::vector<double> v;
                for (const auto& e : pc.errors)
                    if (e.parameter == name && e.rel_err) v.push_back(*e.rel_err);
                if (!v.empty()) groups.push_back(v);
            }
            if (groups.size() >= 2) report.p_c[name] = stats::kruskal_wallis(groups).p_value;
        }
    }

    // configuration hash over the canonical inputs
    {
        json c;
        c["seed"] = config.seed;
        c["snr_db"] = config.snr_db;
        c["waveform"] = {config.waveform.f0_hz, config.waveform.b_hz, config.waveform.tc_s,
                         config.waveform.fs_hz};
        for (const auto cc : config.configurations) c["configurations"].push_back(params::to_string(cc));
        c["trials"] = config.trials.size();
        const std::string text = c.dump();
        report.config_hash = std::uint32_t(
            ::crc32(0L, reinterpret_cast<const Bytef*>(text.data()), uInt(text.size())));
    }

    for (auto& [cname, pc] : agg) {
        output.detected_events[cname] = std::move(pc.events);
        output.radar_records[cname] = std::move(pc.records);
        output.cycle_errors[cname] = std::move(pc.errors);
    }

    if (!outdir.empty()) {
        write_text(outdir + "/report.json", report_to_json(report));
        io::write_events_csv(outdir + "/truth_events.csv", output.truth_events);
        io::write_records_csv(outdir + "/truth_records.csv", output.truth_records);
        for (const auto& [cname, ev] : output.detected_events)
            io::write_events_csv(outdir + "/events_" + cname + ".csv", ev);
        for (const auto& [cname, rec] : output.radar_records)
            io::write_records_csv(outdir + "/records_" + cname + ".csv", rec);
        for (const auto& [cname, err] : output.cycle_errors)
            io::write_errors_csv(outdir + "/errors_" + cname + ".csv", err);
        if (config.plots && !output.cycle_errors.empty())
            emit_plots(report, output.cycle_errors.begin()->second, outdir + "/plots");
    }
    return output;
}

}  // namespace gaitrad::cli
