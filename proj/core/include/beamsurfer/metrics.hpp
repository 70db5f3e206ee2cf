#pragma once

#include <optional>
#include <span>
#include <vector>

#include "beamsurfer/engine.hpp"

namespace beamsurfer {

struct TimedRss
{
  double t_ms = 0.0;
  double rss_dbm = 0.0;
};

// Beam coherence time: from the series maximum to the first later point more
// than 3 dB below it, linearly interpolated at the crossing. nullopt when the
// series never drops that far. Throws std::invalid_argument on an empty or
// unsorted series.
std::optional<double> compute_bct(std::span<const TimedRss> series, double drop_db = 3.0);

struct DeviationStats
{
  double mean_db = 0.0;
  double std_db = 0.0;
  double fraction_within_3db = 0.0;
  std::size_t epochs = 0;
  std::size_t outages = 0; // epochs without a usable link; counted as outside 3 dB
};

// Per-epoch oracle_rss - rss. Mean and standard deviation cover epochs with
// a link. Throws std::invalid_argument on an empty trace or missing oracle.
DeviationStats oracle_deviation(std::span<const TraceRecord> trace);

struct BlockageEvent
{
  double start_ms = 0.0;
  double end_ms = 0.0; // last record with the LoS blocked
};

// Maximal runs of records with blockage_active set.
std::vector<BlockageEvent> blockage_events(std::span<const TraceRecord> trace);

struct RecoveryOutcome
{
  BlockageEvent event;
  bool failed = false;
  std::optional<double> recovery_ms;
  std::optional<double> los_rss_dbm;  // last record before the event
  std::optional<double> nlos_rss_dbm; // first recovered record
};

struct RecoveryStats
{
  double failure_rate = 0.0;
  int events = 0;
  int failures = 0;
  int recoveries = 0;
  double mean_recovery_ms = 0.0;
  std::vector<RecoveryOutcome> outcomes;
};

// A blockage event fails when it runs into A/R or leaves the mobile without a
// control-capable path (SNR below `control_min_snr_db`) before it clears.
// Throws std::invalid_argument when the batch holds no blockage event.
RecoveryStats recovery_stats(std::span<const std::vector<TraceRecord>> traces, double control_min_snr_db = 0.0);

// Highest rate whose threshold is <= snr; 0 below the lowest step.
// Throws std::invalid_argument for an empty or decreasing ladder.
double throughput_bps(double snr_db, std::span<const McsStep> ladder);

struct CdfPoint
{
  double value = 0.0;
  double quantile = 0.0;
};

std::vector<CdfPoint> empirical_cdf(std::span<const double> values);
double median(std::span<const double> values);

struct ProbeStats
{
  int events = 0;
  int rx_only_events = 0;
  int tx_rx_events = 0;
  int max_rx_only = 0;
  int max_tx_rx = 0;
  int violations = 0; // rx-only > 2 or any event > 8
  long scan_probes = 0;
};

ProbeStats probe_stats(std::span<const TransitionRecord> transitions, int rx_only_bound = 2, int event_bound = 8);

} // namespace beamsurfer
