#include "beamsurfer/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "beamsurfer/errors.hpp"
#include "beamsurfer/metrics.hpp"
#include "beamsurfer/rng.hpp"

namespace beamsurfer {
namespace {

constexpr double kTolerance = 1e-9;

// Radio seen by the protocol: the channel frozen at the decision instant,
// plus the acquisition procedure that runs across epochs.
class EngineLink final : public LinkProbe
{
public:
  EngineLink(const ScenarioConfig& cfg, const Environment& env, const LinkBudget& budget, const BeamCodebook& tx,
             const BeamCodebook& rx, const MotionModel& motion)
      : cfg_(cfg), env_(env), budget_(budget), tx_(tx), rx_(rx), motion_(motion),
        noise_(cfg.seed, Stream::noise), sync_(cfg.seed, Stream::acquisition)
  {
  }

  void bind(const ChannelSnapshot* snapshot, double now_ms)
  {
    snapshot_ = snapshot;
    now_ = now_ms;
  }

  int tx_beam_count() const override { return tx_.size(); }
  int rx_beam_count() const override { return rx_.size(); }

  std::optional<double> measure(int tx_beam, int rx_beam) override
  {
    if (tx_beam < 0 || tx_beam >= tx_.size() || rx_beam < 0 || rx_beam >= rx_.size())
      return std::nullopt;
    double v = snapshot_->rss(tx_beam, rx_beam);
    if (cfg_.measurement_noise_db > 0.0)
      v += cfg_.measurement_noise_db * noise_.normal(noise_counter_++);
    return v;
  }

  std::optional<int> control_exchange(int rx_beam) override
  {
    if (rx_beam < 0 || rx_beam >= rx_.size())
      return std::nullopt;
    return decodable_tx_beam(*snapshot_, rx_beam, cfg_.control_min_snr_db);
  }

  void begin_acquisition() override { start_sweep(now_); }

  std::optional<Acquisition> acquisition() override
  {
    if (!sweep_started_)
      return std::nullopt;
    if (result_)
      return Acquisition{result_->acquired_at_ms, result_->tx_beam, result_->rx_beam};
    const double end = sweep_start_ + cfg_.ssb.period_ms * rx_.size();
    if (now_ + kTolerance >= end) {
      ++failures_;
      start_sweep(now_);
      if (result_)
        return Acquisition{result_->acquired_at_ms, result_->tx_beam, result_->rx_beam};
    }
    return std::nullopt;
  }

  int failures() const noexcept { return failures_; }

private:
  void start_sweep(double t)
  {
    sweep_started_ = true;
    sweep_start_ = t;
    SsbSchedule schedule = cfg_.ssb;
    schedule.first_rx_beam = static_cast<int>(sync_.bits(sweep_counter_++) % static_cast<std::uint64_t>(rx_.size()));
    const DecodeFn decode = [this](double at, int rx_beam) -> std::optional<int> {
      const ChannelSnapshot snap(env_, budget_, tx_, rx_, sample_state(motion_, at), at);
      return decodable_tx_beam(snap, rx_beam, cfg_.control_min_snr_db);
    };
    result_ = acquisition_sweep(t, schedule, rx_.size(), decode);
  }

  const ScenarioConfig& cfg_;
  const Environment& env_;
  const LinkBudget& budget_;
  const BeamCodebook& tx_;
  const BeamCodebook& rx_;
  const MotionModel& motion_;
  RandomStream noise_;
  RandomStream sync_;
  std::uint64_t noise_counter_ = 0;
  std::uint64_t sweep_counter_ = 0;
  const ChannelSnapshot* snapshot_ = nullptr;
  double now_ = 0.0;
  bool sweep_started_ = false;
  double sweep_start_ = 0.0;
  std::optional<AcquisitionResult> result_;
  int failures_ = 0;
};

struct PolicyState
{
  Policy policy;
  int tx = 0;
  int rx = 0;
  ProtocolContext ctx;
};

double rate(const ScenarioConfig& cfg, double snr_db)
{
  return throughput_bps(snr_db, cfg.ladder);
}

} // namespace

const char* to_string(Policy policy) noexcept
{
  switch (policy) {
  case Policy::beamsurfer:
    return "beamsurfer";
  case Policy::oracle:
    return "oracle";
  case Policy::exhaustive:
    return "exhaustive";
  case Policy::fixed:
    return "static";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view name) noexcept
{
  for (Policy p : {Policy::beamsurfer, Policy::oracle, Policy::exhaustive, Policy::fixed})
    if (name == to_string(p))
      return p;
  return std::nullopt;
}

std::vector<McsStep> default_mcs_ladder()
{
  return {{5.0, 0.25e9}, {8.0, 0.5e9}, {11.0, 1.0e9}, {13.0, 1.4e9}, {15.0, 2.0e9}};
}

void ScenarioConfig::validate() const
{
  if (!(duration_ms > 0.0))
    throw ConfigError("duration_ms must be positive");
  if (!(slot_us > 0.0))
    throw ConfigError("slot_us must be positive");
  if (!(decision_epoch_ms > 0.0) || decision_epoch_ms * 1000.0 + kTolerance < slot_us)
    throw ConfigError("decision_epoch_ms must be at least one slot");
  const double slots = decision_epoch_ms * 1000.0 / slot_us;
  if (std::abs(slots - std::round(slots)) > 1e-6)
    throw ConfigError("decision_epoch_ms must be a whole number of slots");
  if (!(frame_ms > 0.0))
    throw ConfigError("frame_ms must be positive");
  if (tx_codebook.empty() || rx_codebook.empty())
    throw ConfigError("codebooks must contain at least one beam");
  if (policies.empty())
    throw ConfigError("at least one policy is required");
  if (std::set<Policy>(policies.begin(), policies.end()).size() != policies.size())
    throw ConfigError("policies must not repeat");
  if (ladder.empty())
    throw ConfigError("MCS ladder is empty");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].snr_db < ladder[i - 1].snr_db || ladder[i].rate_bps < ladder[i - 1].rate_bps)
      throw ConfigError("MCS ladder must be non-decreasing");
  if (!(measurement_noise_db >= 0.0))
    throw ConfigError("measurement_noise_db must be non-negative");
  if (!(ssb.period_ms > 0.0))
    throw ConfigError("ssb period must be positive");
  if (!(budget.carrier_hz > 0.0) || !(budget.bandwidth_hz > 0.0))
    throw ConfigError("carrier and bandwidth must be positive");
  if (protocol.control_patience < 1)
    throw ConfigError("protocol.control_patience must be at least 1");
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  if (motion.start_position == env.tx_position)
    throw ConfigError("mobile starts on top of the transmitter");
}

std::vector<TraceRecord> SimulationTrace::for_policy(Policy policy) const
{
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records)
    if (r.policy == policy)
      out.push_back(r);
  return out;
}

SimulationTrace run(const ScenarioConfig& config)
{
  config.validate();

  BeamCodebook tx_cb = config.tx_codebook;
  BeamCodebook rx_cb = config.rx_codebook;
  for (BeamCodebook* cb : {&tx_cb, &rx_cb}) {
    SidelobeModel s = cb->sidelobe();
    s.seed = config.seed;
    cb->set_sidelobe(s);
  }
  MotionModel motion = config.motion;
  motion.seed = config.seed;
  LinkBudget budget = config.budget;
  if (config.calibrate_tx_power)
    budget.tx_power_dbm =
        calibrate_tx_power(budget, tx_cb, rx_cb, config.env.nominal_distance_m, config.target_rss_dbm);

  ProtocolConfig pcfg = config.protocol;
  pcfg.slot_us = config.slot_us;
  pcfg.frame_ms = config.frame_ms;
  if (config.auto_nlos_guard) {
    double widest = 0.0;
    for (const Beam& b : rx_cb.beams())
      widest = std::max(widest, b.beamwidth_deg);
    pcfg.nlos_guard_beams = static_cast<int>(std::ceil(widest / rx_cb.spacing_deg() - 1e-9));
  }

  SimulationTrace trace;
  trace.tx_power_dbm = budget.tx_power_dbm;
  EngineLink link(config, config.env, budget, tx_cb, rx_cb, motion);

  const double epoch_us = config.decision_epoch_ms * 1000.0;
  const auto epochs = static_cast<std::size_t>(std::floor(config.duration_ms / config.decision_epoch_ms + 1e-9));

  std::vector<PolicyState> states;
  for (Policy p : config.policies)
    states.push_back({p, 0, 0, {}});

  for (std::size_t e = 0; e < epochs; ++e) {
    const double t = static_cast<double>(e) * config.decision_epoch_ms;
    const ChannelSnapshot snap(config.env, budget, tx_cb, rx_cb, sample_state(motion, t), t);
    const BeamPair best = oracle_best_pair(snap);
    const bool blocked = snap.paths().front().blockage_db > kTolerance;
    link.bind(&snap, t);

    for (PolicyState& ps : states) {
      TraceRecord rec;
      rec.t_ms = t;
      rec.policy = ps.policy;
      rec.oracle_rss_dbm = best.rss_dbm;
      rec.blockage_active = blocked;
      double loss_us = 0.0;

      if (e == 0 && ps.policy != Policy::oracle) {
        // Trials start aligned.
        ps.tx = best.tx_beam;
        ps.rx = best.rx_beam;
        ps.ctx = initial_context(best.tx_beam, best.rx_beam, best.rss_dbm, t);
        ps.ctx.last_sample_at_ms = -std::numeric_limits<double>::infinity();
      }

      switch (ps.policy) {
      case Policy::oracle:
        ps.tx = best.tx_beam;
        ps.rx = best.rx_beam;
        break;
      case Policy::exhaustive:
        ps.tx = best.tx_beam;
        ps.rx = best.rx_beam;
        rec.probes_this_epoch = best.evaluations;
        loss_us = std::min(epoch_us, best.evaluations * config.slot_us);
        if (best.evaluations * config.slot_us > epoch_us + kTolerance)
          ++trace.audit.time_violations;
        break;
      case Policy::fixed:
        break;
      case Policy::beamsurfer: {
        StepResult r = step(ps.ctx, t, link, pcfg);
        ps.ctx = r.context;
        ps.tx = ps.ctx.tx_beam;
        ps.rx = ps.ctx.rx_beam;
        rec.state = ps.ctx.state;
        rec.neighbor_probes = r.record.neighbor_probes;
        rec.probes_this_epoch = r.record.neighbor_probes + r.record.scan_probes;
        rec.event_id = r.record.event_id;
        loss_us = r.record.data_loss_us;
        if (r.record.elapsed_us > epoch_us + kTolerance)
          ++trace.audit.time_violations;
        trace.transitions.push_back(std::move(r.record));
        break;
      }
      }

      rec.tx_beam = ps.tx;
      rec.rx_beam = ps.rx;
      if (rec.state != ProtocolState::AR) {
        const RssSample s = snap.sample(ps.tx, ps.rx);
        rec.rss_dbm = s.rss_dbm;
        rec.snr_db = s.snr_db;
        rec.throughput_bps = rate(config, s.snr_db) * (1.0 - loss_us / epoch_us);
        if (s.rss_dbm > best.rss_dbm + kTolerance)
          ++trace.audit.envelope_violations;
      }
      trace.records.push_back(rec);
    }
  }

  trace.audit.records = trace.records.size();
  trace.audit.transition_violations = audit_transitions(trace.transitions).size();
  trace.acquisition_failures = link.failures();
  return trace;
}

} // namespace beamsurfer
