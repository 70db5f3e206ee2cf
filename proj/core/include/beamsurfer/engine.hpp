#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beamsurfer/baselines.hpp"
#include "beamsurfer/beam_model.hpp"
#include "beamsurfer/channel.hpp"
#include "beamsurfer/geometry.hpp"
#include "beamsurfer/protocol.hpp"

namespace beamsurfer {

enum class Policy
{
  beamsurfer,
  oracle,
  exhaustive,
  fixed, // "static": never adapts after the initial alignment
};

const char* to_string(Policy policy) noexcept;
std::optional<Policy> parse_policy(std::string_view name) noexcept;

struct McsStep
{
  double snr_db = 0.0;
  double rate_bps = 0.0;
};

// 5/8/11/13/15 dB -> 0.25/0.5/1.0/1.4/2.0 Gbps.
std::vector<McsStep> default_mcs_ladder();

struct ScenarioConfig
{
  Environment env;
  MotionModel motion;
  BeamCodebook tx_codebook = BeamCodebook::narrow();
  BeamCodebook rx_codebook = BeamCodebook::wide();
  LinkBudget budget;
  bool calibrate_tx_power = true;
  double target_rss_dbm = kOperatingRssDbm;
  ProtocolConfig protocol;
  // Derive protocol.nlos_guard_beams from the receive beamwidth.
  bool auto_nlos_guard = true;
  double duration_ms = 10000.0;
  double decision_epoch_ms = 100.0;
  double slot_us = 100.0;
  double frame_ms = 10.0;
  std::uint64_t seed = 1;
  std::vector<Policy> policies{Policy::beamsurfer, Policy::oracle};
  double measurement_noise_db = 0.0;
  SsbSchedule ssb;
  double control_min_snr_db = 0.0;
  std::vector<McsStep> ladder = default_mcs_ladder();

  // Throws ConfigError naming the first problem found.
  void validate() const;
};

struct TraceRecord
{
  double t_ms = 0.0;
  Policy policy = Policy::beamsurfer;
  ProtocolState state = ProtocolState::NOp;
  int tx_beam = 0;
  int rx_beam = 0;
  std::optional<double> rss_dbm; // empty while the mobile has no link
  std::optional<double> snr_db;
  double oracle_rss_dbm = kNoSignalDbm;
  int probes_this_epoch = 0;
  int neighbor_probes = 0;
  double throughput_bps = 0.0;
  bool blockage_active = false;
  std::optional<int> event_id;
};

struct AuditReport
{
  std::size_t records = 0;
  std::size_t envelope_violations = 0;
  std::size_t transition_violations = 0;
  std::size_t time_violations = 0;

  bool passed() const noexcept
  {
    return envelope_violations == 0 && transition_violations == 0 && time_violations == 0;
  }
};

struct SimulationTrace
{
  std::vector<TraceRecord> records; // epoch-major, policies in configured order
  std::vector<TransitionRecord> transitions;
  AuditReport audit;
  int acquisition_failures = 0;
  double tx_power_dbm = 0.0;

  std::vector<TraceRecord> for_policy(Policy policy) const;
};

// Runs every configured policy over the scenario. Deterministic in (config).
// Throws ConfigError when the configuration does not validate.
SimulationTrace run(const ScenarioConfig& config);

} // namespace beamsurfer
