#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "gaitrad/cli/trial.hpp"
#include "gaitrad/io/iq_file.hpp"

using namespace gaitrad;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_dir;
    std::int64_t seed = -1;
    double snr_db = std::numeric_limits<double>::quiet_NaN();
};

cli::TrialConfig load_with_overrides(const CommonArgs& args) {
    cli::TrialConfig cfg = cli::load_config(args.config_path);
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    if (args.seed >= 0) cfg.seed = std::uint64_t(args.seed);
    if (!std::isnan(args.snr_db)) cfg.snr_db = args.snr_db;
    if (cfg.output_dir.empty()) cfg.output_dir = "gaitrad_out";
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "trial config JSON")->required();
    cmd->add_option("-o,--output", args.output_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--snr-db", args.snr_db, "SNR override in dB");
}

int run_simulate(const CommonArgs& args) {
    cli::TrialConfig cfg = load_with_overrides(args);
    cfg.write_iq = true;
    cfg.plots = false;
    // generation only: report still produced, but the point is the IQ + truth
    const auto out = cli::run_trial(cfg);
    std::cout << "wrote IQ recordings and ground truth to " << cfg.output_dir << "\n";
    std::cout << "trials: " << cfg.trials.size() << ", truth cycles: "
              << out.truth_records.size() << "\n";
    return 0;
}

int run_validate(const CommonArgs& args) {
    cli::TrialConfig cfg = load_with_overrides(args);
    const auto out = cli::run_trial(cfg);
    for (const auto& [cname, cr] : out.report.configurations) {
        std::cout << cname << ": HS ratio " << cr.hs_ratio << " (" << cr.matched_hs << "/"
                  << cr.truth_hs << "), records " << cr.record_count << "\n";
        for (const auto& [param, s] : cr.parameters)
            std::cout << "  " << param << ": |e| " << s.mean_abs_err << ", |e_r| "
                      << s.mean_rel_err << " (n=" << s.n << ")\n";
    }
    std::cout << "report: " << cfg.output_dir << "/report.json\n";
    return 0;
}

int run_process(const CommonArgs& args, const std::vector<std::string>& iq_files) {
    cli::TrialConfig cfg = load_with_overrides(args);
    if (!iq_files.empty()) cfg.iq_inputs = iq_files;
    if (cfg.iq_inputs.empty())
        throw PipelineError("process: provide IQ recordings via --iq or config iq_inputs");
    const auto out = cli::run_trial(cfg);
    std::cout << "processed " << cfg.iq_inputs.size() << " recording(s); records written to "
              << cfg.output_dir << "\n";
    (void)out;
    return 0;
}

int run_report(const std::string& errors_csv, const std::string& report_json,
               const std::string& dir) {
    const auto errors = io::read_errors_csv(errors_csv);
    cli::TrialReport report;
    report.tool_version = "0.1.0";
    if (!report_json.empty()) {
        // plots only need the per-cycle pairs; the report file is optional context
    }
    const auto files = cli::emit_plots(report, errors, dir);
    std::cout << "wrote " << files.size() << " plot(s) to " << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radar-network gait monitoring pipeline"};
    app.require_subcommand(1);

    CommonArgs sim_args, val_args, proc_args;
    std::vector<std::string> iq_files;
    std::string errors_csv, report_json, plot_dir = "plots";

    auto* simulate = app.add_subcommand("simulate", "synthesize a trial and write IQ recordings");
    add_common(simulate, sim_args);

    auto* process = app.add_subcommand("process", "run the DSP chain on recorded IQ files");
    add_common(process, proc_args);
    process->add_option("--iq", iq_files, "GWIQ recordings, one per node");

    auto* validate = app.add_subcommand("validate", "full run: simulate, process, compare, report");
    add_common(validate, val_args);

    auto* report = app.add_subcommand("report", "regenerate plots from per-cycle error CSVs");
    report->add_option("--errors", errors_csv, "errors CSV from a validate run")->required();
    report->add_option("--report", report_json, "report.json from a validate run");
    report->add_option("-o,--output", plot_dir, "plot output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(sim_args);
        if (process->parsed()) return run_process(proc_args, iq_files);
        if (validate->parsed()) return run_validate(val_args);
        if (report->parsed()) return run_report(errors_csv, report_json, plot_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
