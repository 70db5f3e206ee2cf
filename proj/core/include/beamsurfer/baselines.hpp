#pragma once

#include <functional>
#include <optional>

#include "beamsurfer/channel.hpp"

namespace beamsurfer {

struct BeamPair
{
  int tx_beam = 0;
  int rx_beam = 0;
  double rss_dbm = kNoSignalDbm;
  int evaluations = 0;
};

// Exhaustive argmax over all pairs; ties go to the lowest (tx, rx).
BeamPair oracle_best_pair(const ChannelSnapshot& snapshot);
BeamPair oracle_best_pair(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                          const BeamCodebook& rx_codebook, const MobileState& mobile, double t_ms);

// Best transmit beam for a fixed receive beam.
BeamPair best_tx_for_rx(const ChannelSnapshot& snapshot, int rx_beam);

struct SsbSchedule
{
  double period_ms = 20.0;
  double connected_period_ms = 5.0;
  // Receive beam the unsynchronised mobile dwells on first.
  int first_rx_beam = 0;
};

struct AcquisitionResult
{
  double acquired_at_ms = 0.0;
  double delay_ms = 0.0;
  int tx_beam = 0;
  int rx_beam = 0;
  int dwells = 0;
};

// Returns the base-station beam decodable on `rx_beam` at `t_ms`, if any.
using DecodeFn = std::function<std::optional<int>(double t_ms, int rx_beam)>;

// NR-style initial search: the base station sweeps all its beams every SSB
// period and the mobile dwells one full period on each receive beam, cycling
// once through the codebook from `first_rx_beam`. Delay is at most
// rx_beam_count * period. nullopt means acquisition failed.
std::optional<AcquisitionResult> acquisition_sweep(double t_start_ms, const SsbSchedule& schedule, int rx_beam_count,
                                                   const DecodeFn& decodable);

// Decode rule used for SSB and control traffic: SNR >= threshold on the best
// base-station beam.
std::optional<int> decodable_tx_beam(const ChannelSnapshot& snapshot, int rx_beam, double min_snr_db = 0.0);

// Maximum measurement counts per realignment, used only in comparison reports.
struct ReferenceMeasurementCount
{
  const char* scheme;
  int measurements;
};
inline constexpr ReferenceMeasurementCount kReferenceMeasurementCounts[] = {
    {"BeamSurfer", 8}, {"Beam-forecast", 40}, {"HBA", 63},   {"Swift Link", 70},
    {"FALP", 70},      {"Agile Link", 110},   {"Exhaustive Search", 1024},
};

} // namespace beamsurfer
