#include "beamsurfer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beamsurfer {

std::optional<double> compute_bct(std::span<const TimedRss> series, double drop_db)
{
  if (series.empty())
    throw std::invalid_argument("compute_bct: empty series");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].t_ms < series[i - 1].t_ms)
      throw std::invalid_argument("compute_bct: series is not time-sorted");

  std::size_t peak = 0;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].rss_dbm > series[peak].rss_dbm)
      peak = i;
  const double threshold = series[peak].rss_dbm - drop_db;
  for (std::size_t j = peak + 1; j < series.size(); ++j) {
    if (series[j].rss_dbm >= threshold)
      continue;
    const TimedRss& a = series[j - 1];
    const TimedRss& b = series[j];
    const double frac = (a.rss_dbm - threshold) / (a.rss_dbm - b.rss_dbm);
    return a.t_ms + frac * (b.t_ms - a.t_ms) - series[peak].t_ms;
  }
  return std::nullopt;
}

DeviationStats oracle_deviation(std::span<const TraceRecord> trace)
{
  if (trace.empty())
    throw std::invalid_argument("oracle_deviation: empty trace");
  DeviationStats s;
  std::vector<double> dev;
  std::size_t within = 0;
  for (const TraceRecord& r : trace) {
    if (!std::isfinite(r.oracle_rss_dbm))
      throw std::invalid_argument("oracle_deviation: record without oracle RSS");
    ++s.epochs;
    if (!r.rss_dbm) {
      ++s.outages;
      continue;
    }
    const double d = r.oracle_rss_dbm - *r.rss_dbm;
    dev.push_back(d);
    if (d <= 3.0)
      ++within;
  }
  if (!dev.empty()) {
    double sum = 0.0;
    for (double d : dev)
      sum += d;
    s.mean_db = sum / static_cast<double>(dev.size());
    double var = 0.0;
    for (double d : dev)
      var += (d - s.mean_db) * (d - s.mean_db);
    s.std_db = std::sqrt(var / static_cast<double>(dev.size()));
  }
  s.fraction_within_3db = static_cast<double>(within) / static_cast<double>(s.epochs);
  return s;
}

std::vector<BlockageEvent> blockage_events(std::span<const TraceRecord> trace)
{
  std::vector<BlockageEvent> out;
  bool open = false;
  for (const TraceRecord& r : trace) {
    if (r.blockage_active) {
      if (!open)
        out.push_back({r.t_ms, r.t_ms});
      out.back().end_ms = r.t_ms;
      open = true;
    } else {
      open = false;
    }
  }
  return out;
}

RecoveryStats recovery_stats(std::span<const std::vector<TraceRecord>> traces, double control_min_snr_db)
{
  RecoveryStats stats;
  double recovery_sum = 0.0;
  for (const std::vector<TraceRecord>& trace : traces) {
    for (const BlockageEvent& ev : blockage_events(trace)) {
      RecoveryOutcome o;
      o.event = ev;
      const TraceRecord* last = nullptr;
      for (const TraceRecord& r : trace) {
        if (r.t_ms < ev.start_ms) {
          if (r.rss_dbm && !r.blockage_active)
            o.los_rss_dbm = r.rss_dbm;
          continue;
        }
        if (r.t_ms > ev.end_ms)
          break;
        last = &r;
        if (r.state == ProtocolState::AR)
          o.failed = true;
        if (!o.recovery_ms && r.state == ProtocolState::NLoSBO && r.snr_db && *r.snr_db >= control_min_snr_db) {
          o.recovery_ms = r.t_ms - ev.start_ms;
          o.nlos_rss_dbm = r.rss_dbm;
        }
      }
      if (!last || !last->snr_db || *last->snr_db < control_min_snr_db)
        o.failed = true;
      ++stats.events;
      if (o.failed) {
        ++stats.failures;
      } else if (o.recovery_ms) {
        ++stats.recoveries;
        recovery_sum += *o.recovery_ms;
      }
      stats.outcomes.push_back(o);
    }
  }
  if (stats.events == 0)
    throw std::invalid_argument("recovery_stats: no blockage events in the batch");
  stats.failure_rate = static_cast<double>(stats.failures) / stats.events;
  stats.mean_recovery_ms = stats.recoveries > 0 ? recovery_sum / stats.recoveries : 0.0;
  return stats;
}

double throughput_bps(double snr_db, std::span<const McsStep> ladder)
{
  if (ladder.empty())
    throw std::invalid_argument("throughput: empty MCS ladder");
  double rate = 0.0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (i > 0 && ladder[i].snr_db < ladder[i - 1].snr_db)
      throw std::invalid_argument("throughput: MCS ladder thresholds must be non-decreasing");
    if (snr_db >= ladder[i].snr_db)
      rate = std::max(rate, ladder[i].rate_bps);
  }
  return rate;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> values)
{
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<CdfPoint> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back({v[i], static_cast<double>(i + 1) / static_cast<double>(v.size())});
  return out;
}

double median(std::span<const double> values)
{
  if (values.empty())
    throw std::invalid_argument("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ProbeStats probe_stats(std::span<const TransitionRecord> transitions, int rx_only_bound, int event_bound)
{
  ProbeStats s;
  for (const TransitionRecord& r : transitions)
    s.scan_probes += r.scan_probes;
  for (const RealignmentEvent& e : realignment_events(transitions)) {
    const int probes = probe_budget(transitions, e);
    ++s.events;
    if (e.kind == RealignmentKind::rx_only) {
      ++s.rx_only_events;
      s.max_rx_only = std::max(s.max_rx_only, probes);
      if (probes > rx_only_bound)
        ++s.violations;
    } else {
      if (e.kind == RealignmentKind::tx_rx)
        ++s.tx_rx_events;
      s.max_tx_rx = std::max(s.max_tx_rx, probes);
    }
    if (probes > event_bound && !(e.kind == RealignmentKind::rx_only && probes > rx_only_bound))
      ++s.violations;
  }
  return s;
}

} // namespace beamsurfer
