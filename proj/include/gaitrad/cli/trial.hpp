#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gaitrad/io/csv.hpp"
#include "gaitrad/params/extract.hpp"
#include "gaitrad/sim/walker.hpp"

namespace gaitrad::cli {

struct TrialSpec {
    std::string label = "trial";
    std::string group = "G1";
    sim::WalkerProfile walker;
    sim::TrialScript script;
};

struct TrialConfig {
    std::vector<params::RadarConfiguration> configurations;
    sim::RadarWaveform waveform;
    std::vector<sim::NodeGeometry> nodes;  // empty = default layout
    std::vector<TrialSpec> trials;
    std::uint64_t seed = 1;
    double snr_db = 20.0;
    std::string output_dir;
    std::vector<std::string> iq_inputs;  // process recorded cubes instead of rendering
    bool write_iq = false;
    bool plots = true;
    dsp::DspParams dsp;
    events::EventParams events;
};

TrialConfig load_config(const std::string& path);
TrialConfig parse_config(const std::string& json_text);

// Per-node chain: range FFT, clutter filter, target mask, range track,
// coherent integration, STFT, optional flip into the reference Doppler
// convention, frame SNR. The range-time matrix is released as soon as the
// track and the integrated series exist.
params::ProcessedNode process_node(const sim::IqCube& cube, const sim::RadarWaveform& wf,
                                   bool flip, const dsp::DspParams& dp = {});

// Builds the facing-tripods layout for the given path extent: feet nodes at
// 0.25 m, torso nodes at 1.2 m, one tripod 1 m before the path and one 1 m
// past it.
std::vector<sim::NodeGeometry> default_node_layout(int torso_nodes, int feet_nodes,
                                                   double path_start_m, double path_span_m);

struct ParameterSummary {
    double mean_abs_err = 0.0;
    double mean_rel_err = 0.0;
    std::size_t n = 0;
};

struct ConfigurationReport {
    std::map<std::string, double> hs_ratio_per_test;
    double hs_ratio = 0.0;
    std::size_t truth_hs = 0;
    std::size_t matched_hs = 0;
    double mean_abs_dt_s = 0.0;
    std::map<std::string, ParameterSummary> parameters;
    std::map<std::string, stats::AgreementSummary> agreement;
    std::map<std::string, double> p_g;  // Kruskal-Wallis across subject groups
    std::size_t fusion_switches = 0;
    std::size_t low_snr_segments = 0;
    std::size_t record_count = 0;
};

struct TrialReport {
    int schema_version = 1;
    std::string tool_version;
    std::uint64_t seed = 0;
    double snr_db = 0.0;
    std::uint32_t config_hash = 0;
    std::map<std::string, ConfigurationReport> configurations;
    std::map<std::string, double> p_c;  // Kruskal-Wallis across configurations
};

struct TrialOutput {
    TrialReport report;
    std::vector<GaitEvent> truth_events;
    std::vector<StrideRecord> truth_records;
    std::map<std::string, std::vector<GaitEvent>> detected_events;      // per configuration
    std::map<std::string, std::vector<StrideRecord>> radar_records;     // per configuration
    std::map<std::string, std::vector<stats::ErrorRecord>> cycle_errors;
};

// Runs simulation (or IQ ingestion), per-node DSP, fusion, extraction and
// validation for every requested configuration. Writes report.json, CSVs,
// optional IQ recordings and SVG plots into output_dir when it is set.
TrialOutput run_trial(const TrialConfig& config);

std::string report_to_json(const TrialReport& report);

// One correlation scatter and one Bland-Altman panel per parameter with data;
// returns the paths written. Parameters without records are skipped with a
// notice on stderr.
std::vector<std::string> emit_plots(const TrialReport& report,
                                    const std::vector<stats::ErrorRecord>& cycle_errors,
                                    const std::string& dir);

}  // namespace gaitrad::cli
