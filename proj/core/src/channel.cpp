#include "beamsurfer/channel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace beamsurfer {

const char* to_string(PathKind kind) noexcept
{
  switch (kind) {
  case PathKind::none:
    return "none";
  case PathKind::los:
    return "los";
  case PathKind::reflected:
    return "reflected";
  }
  return "none";
}

std::vector<PropagationPath> trace_paths(const Environment& env, const LinkBudget& budget, Vec2 rx, double t_ms)
{
  const Vec2 tx = env.tx_position;
  if (tx == rx)
    throw std::invalid_argument("mobile is co-located with the transmitter");

  std::vector<PropagationPath> paths;
  PropagationPath los;
  los.kind = PathKind::los;
  los.departure_deg = bearing_deg(tx, rx);
  los.arrival_deg = bearing_deg(rx, tx);
  los.length_m = distance(tx, rx);
  los.blockage_db = blockage_attenuation(env, tx, rx, t_ms);
  los.loss_db = fspl_db(los.length_m, budget.carrier_hz) + los.blockage_db;
  paths.push_back(los);

  for (const ReflectedPath& r : reflected_paths(env, tx, rx)) {
    PropagationPath p;
    p.kind = PathKind::reflected;
    p.wall_id = r.wall_id;
    p.departure_deg = r.departure_deg;
    p.arrival_deg = r.arrival_deg;
    p.length_m = r.total_length_m;
    p.blockage_db = blockage_attenuation(env, tx, r.reflection_point, t_ms) +
                    blockage_attenuation(env, r.reflection_point, rx, t_ms);
    p.loss_db = fspl_db(p.length_m, budget.carrier_hz) + r.reflection_loss_db + p.blockage_db;
    paths.push_back(p);
  }
  return paths;
}

ChannelSnapshot::ChannelSnapshot(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                                 const BeamCodebook& rx_codebook, const MobileState& mobile, double t_ms)
    : budget_(budget), paths_(trace_paths(env, budget, mobile.position, t_ms)), tx_count_(tx_codebook.size()),
      rx_count_(rx_codebook.size()), t_ms_(t_ms)
{
  tx_gain_.reserve(paths_.size() * static_cast<std::size_t>(tx_count_));
  rx_gain_.reserve(paths_.size() * static_cast<std::size_t>(rx_count_));
  for (const PropagationPath& p : paths_) {
    for (int b = 0; b < tx_count_; ++b)
      tx_gain_.push_back(tx_codebook.gain(b, p.departure_deg - env.tx_boresight_deg));
    for (int b = 0; b < rx_count_; ++b)
      rx_gain_.push_back(rx_codebook.gain(b, p.arrival_deg - mobile.orientation_deg));
  }
}

double ChannelSnapshot::path_power(std::size_t path, int tx_beam, int rx_beam) const
{
  if (path >= paths_.size())
    throw std::out_of_range("path index out of range");
  if (tx_beam < 0 || tx_beam >= tx_count_ || rx_beam < 0 || rx_beam >= rx_count_)
    throw std::out_of_range("beam index out of range");
  return budget_.tx_power_dbm + tx_gain_[path * tx_count_ + tx_beam] + rx_gain_[path * rx_count_ + rx_beam] -
         paths_[path].loss_db;
}

RssSample ChannelSnapshot::sample(int tx_beam, int rx_beam) const
{
  RssSample s;
  s.t_ms = t_ms_;
  s.tx_beam = tx_beam;
  s.rx_beam = rx_beam;
  double linear = 0.0;
  double strongest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    const double p = path_power(i, tx_beam, rx_beam);
    linear += std::pow(10.0, p / 10.0);
    if (p > strongest) {
      strongest = p;
      s.path = paths_[i].kind;
      s.wall_id = paths_[i].wall_id;
    }
  }
  s.rss_dbm = linear > 0.0 ? 10.0 * std::log10(linear) : kNoSignalDbm;
  s.snr_db = s.rss_dbm - budget_.noise_floor_dbm;
  return s;
}

double ChannelSnapshot::rss(int tx_beam, int rx_beam) const { return sample(tx_beam, rx_beam).rss_dbm; }

RssSample compute_rss(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                      const BeamCodebook& rx_codebook, int tx_beam, int rx_beam, const MobileState& mobile,
                      double t_ms)
{
  return ChannelSnapshot(env, budget, tx_codebook, rx_codebook, mobile, t_ms).sample(tx_beam, rx_beam);
}

int ScanResult::best_index() const
{
  if (samples.empty())
    throw std::logic_error("empty scan");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].rss_dbm > samples[best].rss_dbm)
      best = i;
  return static_cast<int>(best);
}

ScanResult scan_rx_beams(const ChannelSnapshot& snapshot, int tx_beam, double slot_us)
{
  ScanResult r;
  r.samples.reserve(static_cast<std::size_t>(snapshot.rx_count()));
  for (int k = 0; k < snapshot.rx_count(); ++k)
    r.samples.push_back(snapshot.sample(tx_beam, k));
  r.probes = snapshot.rx_count();
  r.duration_us = slot_us * r.probes;
  return r;
}

ScanResult scan_rx_beams(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                         const BeamCodebook& rx_codebook, int tx_beam, const MobileState& mobile, double t_ms,
                         double slot_us)
{
  return scan_rx_beams(ChannelSnapshot(env, budget, tx_codebook, rx_codebook, mobile, t_ms), tx_beam, slot_us);
}

double calibrate_tx_power(const LinkBudget& budget, const BeamCodebook& tx_codebook, const BeamCodebook& rx_codebook,
                          double nominal_distance_m, double target_rss_dbm)
{
  const double g_tx = tx_codebook.gain(tx_codebook.closest_beam(0.0), 0.0);
  const double g_rx = rx_codebook.gain(rx_codebook.closest_beam(0.0), 0.0);
  return target_rss_dbm - g_tx - g_rx + fspl_db(nominal_distance_m, budget.carrier_hz);
}

double power_sum_dbm(std::span<const double> powers_dbm) noexcept
{
  double linear = 0.0;
  for (double p : powers_dbm)
    linear += std::pow(10.0, p / 10.0);
  return linear > 0.0 ? 10.0 * std::log10(linear) : kNoSignalDbm;
}

int Heatmap::argmax_beam(std::size_t column) const
{
  int best = 0;
  for (std::size_t k = 1; k < rss_dbm.size(); ++k)
    if (rss_dbm[k].at(column) > rss_dbm[static_cast<std::size_t>(best)].at(column))
      best = static_cast<int>(k);
  return best;
}

Heatmap build_heatmap(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                      const BeamCodebook& rx_codebook, const MotionModel& motion, int tx_beam, double duration_ms,
                      double step_ms)
{
  if (!(step_ms > 0.0) || !(duration_ms >= 0.0))
    throw std::invalid_argument("heatmap needs a positive step and non-negative duration");
  tx_codebook.at(tx_beam);
  Heatmap h;
  h.tx_beam = tx_beam;
  h.rss_dbm.assign(static_cast<std::size_t>(rx_codebook.size()), {});
  const auto columns = static_cast<std::size_t>(std::floor(duration_ms / step_ms + 1e-9)) + 1;
  for (std::size_t c = 0; c < columns; ++c) {
    const double t = static_cast<double>(c) * step_ms;
    const ChannelSnapshot snap(env, budget, tx_codebook, rx_codebook, sample_state(motion, t), t);
    h.times_ms.push_back(t);
    for (int k = 0; k < rx_codebook.size(); ++k)
      h.rss_dbm[static_cast<std::size_t>(k)].push_back(snap.rss(tx_beam, k));
  }
  return h;
}

void write_heatmap_csv(const Heatmap& heatmap, const BeamCodebook& rx_codebook, std::ostream& out)
{
  out << "rx_beam,boresight_deg";
  for (double t : heatmap.times_ms)
    out << ',' << t;
  out << '\n';
  for (std::size_t k = 0; k < heatmap.rss_dbm.size(); ++k) {
    out << k << ',' << rx_codebook.at(static_cast<int>(k)).boresight_deg;
    for (double v : heatmap.rss_dbm[k])
      out << ',' << v;
    out << '\n';
  }
}

} // namespace beamsurfer
