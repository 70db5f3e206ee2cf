#include <iostream>

#include <CLI11.hpp>

#include "beamsurfer_cli/commands.hpp"

namespace cli = beamsurfer::cli;

int main(int argc, char** argv)
{
  CLI::App app{"BeamSurfer beam-management simulator"};
  app.require_subcommand(1);

  cli::RunOptions run;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write traces plus a summary");
  run_cmd->add_option("--config", run.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Override the config seed");
  run_cmd->add_option("--out", run.out_dir, "Output directory")->capture_default_str();

  cli::SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the cross-product of axis values and trials");
  sweep_cmd->add_option("--config", sweep.config, "Template scenario JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", sweep.axes, "Dotted config path and values, e.g. motion.speed_mps=0.67,1.4");
  sweep_cmd->add_option("--trials", sweep.trials, "Seeds per cell")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent cells")->check(CLI::PositiveNumber)->capture_default_str();
  std::string sweep_out;
  auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "Write the batch report as JSON");

  cli::HeatmapOptions heat;
  int heat_tx = 0;
  double heat_step = 0.0;
  double heat_duration = 0.0;
  auto* heat_cmd = app.add_subcommand("heatmap", "RSS per receive beam over time as CSV");
  heat_cmd->add_option("--config", heat.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  heat_cmd->add_option("--out", heat.out, "CSV path")->capture_default_str();
  auto* tx_opt = heat_cmd->add_option("--tx-beam", heat_tx, "Fixed transmit beam (default: best at t = 0)");
  auto* step_opt = heat_cmd->add_option("--step-ms", heat_step, "Column spacing");
  auto* dur_opt = heat_cmd->add_option("--duration-ms", heat_duration, "Time span");

  cli::ReportOptions report;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Recompute the summary from a trace directory");
  report_cmd->add_option("--traces", report.traces, "Directory written by run")->required()->check(CLI::ExistingDirectory);
  auto* report_out_opt = report_cmd->add_option("--out", report_out, "Write the summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  if (*run_cmd) {
    if (*seed_opt)
      run.seed = run_seed;
    return cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    if (*sweep_out_opt)
      sweep.out = sweep_out;
    return cli::cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*heat_cmd) {
    if (*tx_opt)
      heat.tx_beam = heat_tx;
    if (*step_opt)
      heat.step_ms = heat_step;
    if (*dur_opt)
      heat.duration_ms = heat_duration;
    return cli::cmd_heatmap(heat, std::cout, std::cerr);
  }
  if (*report_out_opt)
    report.out = report_out;
  return cli::cmd_report(report, std::cout, std::cerr);
}
