#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamsurfer/beam_model.hpp"
#include "beamsurfer/geometry.hpp"

namespace beamsurfer {

inline constexpr double kOperatingRssDbm = -51.0;
// Stand-in for "no signal" in dB arithmetic.
inline constexpr double kNoSignalDbm = -300.0;

struct LinkBudget
{
  double tx_power_dbm = 0.0;
  double noise_floor_dbm = -74.0;
  double carrier_hz = 60e9;
  double bandwidth_hz = 2e9;
};

enum class PathKind
{
  none,
  los,
  reflected,
};

const char* to_string(PathKind kind) noexcept;

struct PropagationPath
{
  PathKind kind = PathKind::los;
  int wall_id = -1;
  double departure_deg = 0.0; // world bearing leaving the transmitter
  double arrival_deg = 0.0;   // world bearing from the mobile toward the incoming wave
  double length_m = 0.0;
  double blockage_db = 0.0;
  double loss_db = 0.0; // fspl + reflection + blockage
};

// LoS plus every first-order reflection between the transmitter and `rx`.
std::vector<PropagationPath> trace_paths(const Environment& env, const LinkBudget& budget, Vec2 rx, double t_ms);

struct RssSample
{
  double t_ms = 0.0;
  int tx_beam = 0;
  int rx_beam = 0;
  double rss_dbm = kNoSignalDbm;
  double snr_db = 0.0;
  PathKind path = PathKind::none;
  int wall_id = -1;
};

// Channel frozen at one instant: paths are traced once and every beam pair is
// evaluated against them. Gains are cached per (path, beam).
class ChannelSnapshot
{
public:
  ChannelSnapshot(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                  const BeamCodebook& rx_codebook, const MobileState& mobile, double t_ms);

  RssSample sample(int tx_beam, int rx_beam) const;
  double rss(int tx_beam, int rx_beam) const;

  // Power of a single path through the given pair, dBm.
  double path_power(std::size_t path, int tx_beam, int rx_beam) const;

  const std::vector<PropagationPath>& paths() const noexcept { return paths_; }
  const LinkBudget& budget() const noexcept { return budget_; }
  int tx_count() const noexcept { return tx_count_; }
  int rx_count() const noexcept { return rx_count_; }
  double t_ms() const noexcept { return t_ms_; }

private:
  LinkBudget budget_;
  std::vector<PropagationPath> paths_;
  int tx_count_;
  int rx_count_;
  double t_ms_;
  std::vector<double> tx_gain_; // [path * tx_count + beam]
  std::vector<double> rx_gain_; // [path * rx_count + beam]
};

RssSample compute_rss(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                      const BeamCodebook& rx_codebook, int tx_beam, int rx_beam, const MobileState& mobile,
                      double t_ms);

struct ScanResult
{
  std::vector<RssSample> samples;
  double duration_us = 0.0;
  int probes = 0;

  int best_index() const; // argmax rss, lowest index on ties
};

// One sample per receive beam against `tx_beam`; one slot per beam.
ScanResult scan_rx_beams(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                         const BeamCodebook& rx_codebook, int tx_beam, const MobileState& mobile, double t_ms,
                         double slot_us = 100.0);
ScanResult scan_rx_beams(const ChannelSnapshot& snapshot, int tx_beam, double slot_us = 100.0);

// Transmit power that puts the boresight-aligned LoS pair at `target_rss_dbm`
// at the scene's nominal distance.
double calibrate_tx_power(const LinkBudget& budget, const BeamCodebook& tx_codebook,
                          const BeamCodebook& rx_codebook, double nominal_distance_m,
                          double target_rss_dbm = kOperatingRssDbm);

// Linear-domain power sum of dBm values.
double power_sum_dbm(std::span<const double> powers_dbm) noexcept;

// RSS per receive beam over time for one fixed transmit beam.
struct Heatmap
{
  std::vector<double> times_ms;
  int tx_beam = 0;
  std::vector<std::vector<double>> rss_dbm; // [rx_beam][column]

  int argmax_beam(std::size_t column) const;
};

Heatmap build_heatmap(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                      const BeamCodebook& rx_codebook, const MotionModel& motion, int tx_beam,
                      double duration_ms, double step_ms);

// Rows are receive beams, columns are sample times; header row carries times.
void write_heatmap_csv(const Heatmap& heatmap, const BeamCodebook& rx_codebook, std::ostream& out);

} // namespace beamsurfer
