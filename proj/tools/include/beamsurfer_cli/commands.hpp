#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beamsurfer::cli {

enum ExitCode : int
{
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kAuditFailure = 3,
  kAcquisitionFailure = 4,
};

struct RunOptions
{
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
};

struct SweepOptions
{
  std::filesystem::path config;
  std::vector<std::string> axes; // "name=v1,v2,..."
  int trials = 1;
  int jobs = 1;
  std::optional<std::filesystem::path> out; // batch JSON; stdout table either way
};

struct HeatmapOptions
{
  std::filesystem::path config;
  std::filesystem::path out = "heatmap.csv";
  std::optional<int> tx_beam;
  std::optional<double> step_ms;
  std::optional<double> duration_ms;
};

struct ReportOptions
{
  std::filesystem::path traces;
  std::optional<std::filesystem::path> out;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_heatmap(const HeatmapOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

} // namespace beamsurfer::cli
