#include "beamsurfer/baselines.hpp"

#include <stdexcept>

namespace beamsurfer {

BeamPair oracle_best_pair(const ChannelSnapshot& snapshot)
{
  BeamPair best;
  bool have = false;
  for (int tx = 0; tx < snapshot.tx_count(); ++tx) {
    for (int rx = 0; rx < snapshot.rx_count(); ++rx) {
      const double v = snapshot.rss(tx, rx);
      ++best.evaluations;
      if (!have || v > best.rss_dbm) {
        best.tx_beam = tx;
        best.rx_beam = rx;
        best.rss_dbm = v;
        have = true;
      }
    }
  }
  return best;
}

BeamPair oracle_best_pair(const Environment& env, const LinkBudget& budget, const BeamCodebook& tx_codebook,
                          const BeamCodebook& rx_codebook, const MobileState& mobile, double t_ms)
{
  return oracle_best_pair(ChannelSnapshot(env, budget, tx_codebook, rx_codebook, mobile, t_ms));
}

BeamPair best_tx_for_rx(const ChannelSnapshot& snapshot, int rx_beam)
{
  if (rx_beam < 0 || rx_beam >= snapshot.rx_count())
    throw std::out_of_range("receive beam out of range");
  BeamPair best;
  best.rx_beam = rx_beam;
  for (int tx = 0; tx < snapshot.tx_count(); ++tx) {
    const double v = snapshot.rss(tx, rx_beam);
    ++best.evaluations;
    if (tx == 0 || v > best.rss_dbm) {
      best.tx_beam = tx;
      best.rss_dbm = v;
    }
  }
  return best;
}

std::optional<AcquisitionResult> acquisition_sweep(double t_start_ms, const SsbSchedule& schedule, int rx_beam_count,
                                                   const DecodeFn& decodable)
{
  if (rx_beam_count <= 0)
    throw std::invalid_argument("acquisition needs at least one receive beam");
  if (!(schedule.period_ms > 0.0))
    throw std::invalid_argument("SSB period must be positive");
  if (schedule.first_rx_beam < 0 || schedule.first_rx_beam >= rx_beam_count)
    throw std::invalid_argument("first dwell beam outside the codebook");

  for (int i = 0; i < rx_beam_count; ++i) {
    const int rx = (schedule.first_rx_beam + i) % rx_beam_count;
    const double end = t_start_ms + schedule.period_ms * (i + 1);
    if (const std::optional<int> tx = decodable(end, rx))
      return AcquisitionResult{end, end - t_start_ms, *tx, rx, i + 1};
  }
  return std::nullopt;
}

std::optional<int> decodable_tx_beam(const ChannelSnapshot& snapshot, int rx_beam, double min_snr_db)
{
  const BeamPair best = best_tx_for_rx(snapshot, rx_beam);
  if (best.rss_dbm - snapshot.budget().noise_floor_dbm >= min_snr_db)
    return best.tx_beam;
  return std::nullopt;
}

} // namespace beamsurfer
