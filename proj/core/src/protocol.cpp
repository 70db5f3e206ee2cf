#include "beamsurfer/protocol.hpp"

#include <algorithm>
#include <map>

namespace beamsurfer {
namespace {

constexpr double kEps = 1e-9;

using PS = ProtocolState;

constexpr double kNoRss = -300.0;

struct Candidate
{
  int tx = 0;
  int rx = 0;
  double rss = kNoRss;
};

class Stepper
{
public:
  Stepper(const ProtocolContext& ctx, double now, LinkProbe& link, const ProtocolConfig& cfg)
      : ctx_(ctx), now_(now), link_(link), cfg_(cfg)
  {
    path_.push_back(ctx.state);
  }

  StepResult run()
  {
    const ProtocolState before = ctx_.state;
    const std::optional<int> event_before = ctx_.event_id;
    switch (ctx_.state) {
    case PS::NOp:
      nop();
      break;
    case PS::RBA:
      rba();
      break;
    case PS::TBA:
      tba_continue();
      break;
    case PS::BR:
      blockage_scan();
      break;
    case PS::NLoSBO:
      nlos_continue();
      break;
    case PS::AR:
      ar_continue();
      break;
    }

    StepResult out;
    out.record.t_ms = now_;
    out.record.state_before = before;
    out.record.state_after = ctx_.state;
    out.record.path = path_;
    out.record.actions = actions_;
    out.record.rss_dbm = ctx_.state == PS::AR ? std::nullopt : current_rss_;
    out.record.tx_beam = ctx_.tx_beam;
    out.record.rx_beam = ctx_.rx_beam;
    out.record.event_id = event_for_record_ ? event_for_record_ : (ctx_.event_id ? ctx_.event_id : event_before);
    for (const Action& a : actions_) {
      if (a.phase == ProbePhase::neighbor)
        out.record.neighbor_probes += a.probes;
      else if (a.phase == ProbePhase::scan)
        out.record.scan_probes += a.probes;
      out.record.elapsed_us += a.cost_us;
      out.record.data_loss_us += a.data_loss_us;
    }
    out.actions = actions_;
    out.context = ctx_;
    return out;
  }

private:
  double slot() const { return cfg_.slot_us; }
  double frame_us() const { return cfg_.frame_ms * 1000.0; }
  double ref() const { return ctx_.rss_current_rb; }

  void enter(ProtocolState s)
  {
    ctx_.state = s;
    path_.push_back(s);
  }

  void start_event(RealignmentKind kind)
  {
    if (!ctx_.event_id) {
      ctx_.event_id = ctx_.next_event_id++;
      ctx_.event_kind = kind;
    } else if (static_cast<int>(kind) > static_cast<int>(ctx_.event_kind)) {
      ctx_.event_kind = kind;
    }
    event_for_record_ = ctx_.event_id;
  }

  double checked(std::optional<double> v, int tx, int rx)
  {
    if (!v)
      throw MeasurementFault("measurement failed for pair (" + std::to_string(tx) + ", " + std::to_string(rx) +
                             ") at t=" + std::to_string(now_) + " ms");
    return *v;
  }

  double sample_current()
  {
    const double v = checked(link_.measure(ctx_.tx_beam, ctx_.rx_beam), ctx_.tx_beam, ctx_.rx_beam);
    actions_.push_back({ActionKind::SampleRss, ctx_.rx_beam, ctx_.tx_beam, slot(), 0.0, 1, ProbePhase::none});
    ctx_.last_sample_at_ms = now_;
    current_rss_ = v;
    return v;
  }

  double probe(int tx, int rx, ProbePhase phase)
  {
    const double v = checked(link_.measure(tx, rx), tx, rx);
    actions_.push_back({ActionKind::ProbeRxBeam, rx, tx, slot(), slot(), 1, phase});
    return v;
  }

  // Full receive scan against `tx`; returns the per-beam RSS.
  std::vector<double> scan(int tx, bool loses_data)
  {
    const int n = link_.rx_beam_count();
    std::vector<double> rss(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      rss[static_cast<std::size_t>(k)] = checked(link_.measure(tx, k), tx, k);
    const double cost = slot() * n;
    actions_.push_back({ActionKind::ScanAllRxBeams, -1, tx, cost, loses_data ? cost : 0.0, n, ProbePhase::scan});
    return rss;
  }

  // Strongest receive beam outside the serving beam's lobe.
  std::optional<int> pick_nlos(const std::vector<double>& rss) const
  {
    std::optional<int> best;
    for (int k = 0; k < static_cast<int>(rss.size()); ++k) {
      if (std::abs(k - ctx_.rx_beam) <= cfg_.nlos_guard_beams)
        continue;
      if (!best || rss[static_cast<std::size_t>(k)] > rss[static_cast<std::size_t>(*best)])
        best = k;
    }
    return best;
  }

  void store(std::optional<int> beam)
  {
    if (!beam)
      return;
    ctx_.stored_nlos_rx_beam = beam;
    ctx_.stored_at_ms = now_;
    actions_.push_back({ActionKind::StoreNlosBeam, *beam, ctx_.tx_beam, 0.0, 0.0, 0, ProbePhase::none});
  }

  void switch_rx(int rx)
  {
    if (rx != ctx_.rx_beam)
      actions_.push_back({ActionKind::SwitchRxBeam, rx, ctx_.tx_beam, 0.0, 0.0, 0, ProbePhase::none});
    ctx_.rx_beam = rx;
  }

  void set_tx(int tx)
  {
    if (tx != ctx_.tx_beam)
      ctx_.last_br_scan_at_ms = -std::numeric_limits<double>::infinity();
    ctx_.tx_beam = tx;
  }

  // Back to normal operation on (tx, rx) with a fresh reference.
  void settle(int tx, int rx, double rss)
  {
    set_tx(tx);
    switch_rx(rx);
    ctx_.rss_current_rb = rss;
    current_rss_ = rss;
    ctx_.tba_entered_at_ms.reset();
    ctx_.below_floor_since_ms.reset();
    ctx_.los_pair.reset();
    ctx_.control_link_up = false;
    enter(PS::NOp);
    event_for_record_ = ctx_.event_id;
    ctx_.event_id.reset();
  }

  void nop()
  {
    if (now_ - ctx_.last_sample_at_ms + kEps < cfg_.br_interval_ms)
      return;
    const double rss = sample_current();
    const double drop = ref() - rss;
    if (drop <= cfg_.rba_drop_db + kEps) {
      if (now_ - ctx_.last_br_scan_at_ms + kEps >= cfg_.br_interval_ms)
        reconnaissance();
      return;
    }
    if (drop <= cfg_.blockage_drop_db + kEps) {
      start_event(RealignmentKind::rx_only);
      enter(PS::RBA);
      rba();
      return;
    }
    start_event(RealignmentKind::blockage);
    ctx_.los_pair = std::make_pair(ctx_.tx_beam, ctx_.rx_beam);
    if (ctx_.stored_beam_fresh(now_, cfg_.stored_beam_max_age_ms)) {
      switch_rx(*ctx_.stored_nlos_rx_beam);
      enter(PS::NLoSBO);
      nlos_enter();
    } else {
      enter(PS::BR);
      blockage_scan();
    }
  }

  // Periodic excursion NOp -> BR -> NOp that keeps a reflected beam on file.
  void reconnaissance()
  {
    path_.push_back(PS::BR);
    store(pick_nlos(scan(ctx_.tx_beam, false)));
    ctx_.last_br_scan_at_ms = now_;
    path_.push_back(PS::NOp);
  }

  void rba()
  {
    if (!current_rss_)
      sample_current();
    std::optional<Candidate> best;
    for (int k : neighbor_rx(ctx_.rx_beam)) {
      const double v = probe(ctx_.tx_beam, k, ProbePhase::neighbor);
      if (!best || v > best->rss)
        best = Candidate{ctx_.tx_beam, k, v};
    }
    if (best && best->rss > ref() - cfg_.rba_drop_db) {
      settle(best->tx, best->rx, best->rss);
      return;
    }
    start_event(RealignmentKind::tx_rx);
    enter(PS::TBA);
    tba_sweep(true);
  }

  std::vector<int> neighbor_rx(int k) const
  {
    std::vector<int> out;
    if (k > 0)
      out.push_back(k - 1);
    if (k + 1 < link_.rx_beam_count())
      out.push_back(k + 1);
    return out;
  }

  std::vector<int> neighbor_tx(int n, bool include_self) const
  {
    std::vector<int> out;
    if (n > 0)
      out.push_back(n - 1);
    if (include_self)
      out.push_back(n);
    if (n + 1 < link_.tx_beam_count())
      out.push_back(n + 1);
    return out;
  }

  void update_floor_timer(double rss)
  {
    if (rss < ref() - cfg_.nlos_floor_db) {
      if (!ctx_.below_floor_since_ms)
        ctx_.below_floor_since_ms = now_;
    } else {
      ctx_.below_floor_since_ms.reset();
    }
  }

  // One transmit-beam sweep. The first sweep after RBA checks the receive
  // neighbourhood {k-1, k, k+1} of each neighbouring transmit beam before any
  // full scan; later sweeps go straight to full scans.
  void tba_sweep(bool first)
  {
    if (!ctx_.tba_entered_at_ms)
      ctx_.tba_entered_at_ms = now_;
    actions_.push_back(
        {ActionKind::RequestTxAdaptation, -1, ctx_.tx_beam, frame_us(), slot(), 0, ProbePhase::none});

    std::optional<Candidate> best;
    const auto consider = [&](Candidate c) {
      if (!best || c.rss > best->rss)
        best = c;
    };
    const int k = ctx_.rx_beam;
    for (int tx : neighbor_tx(ctx_.tx_beam, !first)) {
      actions_.push_back({ActionKind::ProbeTxBeam, tx, tx, 0.0, 0.0, 0, ProbePhase::none});
      std::optional<Candidate> local;
      if (first) {
        for (int rx : {k - 1, k, k + 1}) {
          if (rx < 0 || rx >= link_.rx_beam_count())
            continue;
          const double v = probe(tx, rx, ProbePhase::neighbor);
          if (!local || v > local->rss)
            local = Candidate{tx, rx, v};
        }
      }
      if (!local || local->rss < ref() - cfg_.rba_drop_db) {
        const std::vector<double> rss = scan(tx, true);
        for (int rx = 0; rx < static_cast<int>(rss.size()); ++rx)
          if (!local || rss[static_cast<std::size_t>(rx)] > local->rss)
            local = Candidate{tx, rx, rss[static_cast<std::size_t>(rx)]};
      }
      consider(*local);
    }
    if (!best)
      best = Candidate{ctx_.tx_beam, ctx_.rx_beam, *current_rss_};

    if (best->rss >= ref() - cfg_.rba_drop_db) {
      settle(best->tx, best->rx, best->rss);
      return;
    }
    // Serve on the better pair while the search continues.
    if (best->rss > *current_rss_) {
      set_tx(best->tx);
      switch_rx(best->rx);
      current_rss_ = best->rss;
    }
    update_floor_timer(*current_rss_);
    if (*current_rss_ >= ref() - cfg_.nlos_floor_db)
      return;

    if (ctx_.below_floor_since_ms && now_ - *ctx_.below_floor_since_ms + kEps >= cfg_.tba_timeout_ms) {
      reacquire();
      return;
    }
    start_event(RealignmentKind::blockage);
    if (!ctx_.los_pair)
      ctx_.los_pair = std::make_pair(ctx_.tx_beam, ctx_.rx_beam);
    if (ctx_.stored_beam_fresh(now_, cfg_.stored_beam_max_age_ms)) {
      switch_rx(*ctx_.stored_nlos_rx_beam);
      enter(PS::NLoSBO);
      nlos_enter();
    } else {
      enter(PS::BR);
      blockage_scan();
    }
  }

  void tba_continue()
  {
    const double rss = sample_current();
    if (rss >= ref() - cfg_.rba_drop_db) {
      settle(ctx_.tx_beam, ctx_.rx_beam, rss);
      return;
    }
    tba_sweep(false);
  }

  // BR entered on blockage without a usable stored beam.
  void blockage_scan()
  {
    if (!current_rss_)
      sample_current();
    const std::vector<double> rss = scan(ctx_.tx_beam, true);
    const std::optional<int> beam = pick_nlos(rss);
    store(beam);
    ctx_.last_br_scan_at_ms = now_;
    if (beam) {
      switch_rx(*beam);
      current_rss_ = rss[static_cast<std::size_t>(*beam)];
    }
    if (*current_rss_ >= ref() - cfg_.nlos_floor_db) {
      settle(ctx_.tx_beam, ctx_.rx_beam, *current_rss_);
      return;
    }
    enter(PS::NLoSBO);
    nlos_enter();
  }

  // Uplink request on the reflected receive beam; the base station answers on
  // the beam that heard it, after which the receive side is refined locally.
  bool control_exchange()
  {
    for (int attempt = 0; attempt < cfg_.control_patience; ++attempt) {
      actions_.push_back(
          {ActionKind::SendControlPacket, ctx_.rx_beam, ctx_.tx_beam, frame_us(), slot(), 0, ProbePhase::none});
      if (const std::optional<int> m = link_.control_exchange(ctx_.rx_beam)) {
        set_tx(*m);
        Candidate best{*m, ctx_.rx_beam, kNoRss};
        bool have = false;
        for (int rx : {ctx_.rx_beam - 1, ctx_.rx_beam, ctx_.rx_beam + 1}) {
          if (rx < 0 || rx >= link_.rx_beam_count())
            continue;
          const double v = probe(*m, rx, ProbePhase::scan);
          if (!have || v > best.rss) {
            best = {*m, rx, v};
            have = true;
          }
        }
        switch_rx(best.rx);
        current_rss_ = best.rss;
        ctx_.control_link_up = true;
        return true;
      }
    }
    ctx_.control_link_up = false;
    return false;
  }

  void nlos_enter()
  {
    if (!control_exchange()) {
      reacquire();
      return;
    }
    if (*current_rss_ >= ref() - cfg_.rba_drop_db) {
      settle(ctx_.tx_beam, ctx_.rx_beam, *current_rss_);
      return;
    }
    if (*current_rss_ < ref() - cfg_.nlos_floor_db)
      reacquire();
  }

  void nlos_continue()
  {
    if (ctx_.los_pair) {
      const auto [tx0, rx0] = *ctx_.los_pair;
      std::optional<Candidate> best;
      for (int tx = tx0 - 1; tx <= tx0 + 1; ++tx) {
        if (tx < 0 || tx >= link_.tx_beam_count())
          continue;
        for (int rx = rx0 - 1; rx <= rx0 + 1; ++rx) {
          if (rx < 0 || rx >= link_.rx_beam_count())
            continue;
          const double v = probe(tx, rx, ProbePhase::scan);
          if (!best || v > best->rss)
            best = Candidate{tx, rx, v};
        }
      }
      if (best && best->rss >= ref() - cfg_.rba_drop_db) {
        settle(best->tx, best->rx, best->rss);
        return;
      }
    }
    const double rss = sample_current();
    if (rss >= ref() - cfg_.nlos_floor_db)
      return;
    nlos_enter();
  }

  void reacquire()
  {
    actions_.push_back({ActionKind::EnterReacquisition, -1, -1, 0.0, 0.0, 0, ProbePhase::none});
    enter(PS::AR);
    ctx_.synchronized = false;
    ctx_.control_link_up = false;
    ctx_.stored_nlos_rx_beam.reset();
    ctx_.below_floor_since_ms.reset();
    ctx_.tba_entered_at_ms.reset();
    current_rss_.reset();
    link_.begin_acquisition();
  }

  void ar_continue()
  {
    const std::optional<Acquisition> acq = link_.acquisition();
    if (!acq || acq->acquired_at_ms > now_ + kEps)
      return;
    ctx_.synchronized = true;
    ctx_.tx_beam = acq->tx_beam;
    ctx_.rx_beam = acq->rx_beam;
    const double rss = sample_current();
    ctx_.last_br_scan_at_ms = -std::numeric_limits<double>::infinity();
    settle(acq->tx_beam, acq->rx_beam, rss);
  }

  ProtocolContext ctx_;
  double now_;
  LinkProbe& link_;
  const ProtocolConfig& cfg_;
  std::vector<ProtocolState> path_;
  std::vector<Action> actions_;
  std::optional<double> current_rss_;
  std::optional<int> event_for_record_;
};

} // namespace

const char* to_string(ProtocolState state) noexcept
{
  switch (state) {
  case PS::NOp:
    return "NOp";
  case PS::RBA:
    return "RBA";
  case PS::TBA:
    return "TBA";
  case PS::BR:
    return "BR";
  case PS::NLoSBO:
    return "NLoSBO";
  case PS::AR:
    return "AR";
  }
  return "?";
}

std::optional<ProtocolState> parse_state(std::string_view name) noexcept
{
  for (PS s : {PS::NOp, PS::RBA, PS::TBA, PS::BR, PS::NLoSBO, PS::AR})
    if (name == to_string(s))
      return s;
  return std::nullopt;
}

const std::vector<std::pair<ProtocolState, ProtocolState>>& transition_edges()
{
  static const std::vector<std::pair<PS, PS>> edges{
      {PS::NOp, PS::RBA},    {PS::NOp, PS::BR},     {PS::NOp, PS::NLoSBO}, {PS::RBA, PS::NOp},
      {PS::RBA, PS::TBA},    {PS::TBA, PS::NOp},    {PS::TBA, PS::NLoSBO}, {PS::TBA, PS::BR},
      {PS::TBA, PS::AR},     {PS::BR, PS::NOp},     {PS::BR, PS::NLoSBO},  {PS::NLoSBO, PS::NOp},
      {PS::NLoSBO, PS::AR},  {PS::AR, PS::NOp},
  };
  return edges;
}

bool is_allowed_transition(ProtocolState from, ProtocolState to) noexcept
{
  const auto& edges = transition_edges();
  return std::find(edges.begin(), edges.end(), std::make_pair(from, to)) != edges.end();
}

const char* to_string(ActionKind kind) noexcept
{
  switch (kind) {
  case ActionKind::SampleRss:
    return "SampleRss";
  case ActionKind::ProbeRxBeam:
    return "ProbeRxBeam";
  case ActionKind::SwitchRxBeam:
    return "SwitchRxBeam";
  case ActionKind::RequestTxAdaptation:
    return "RequestTxAdaptation";
  case ActionKind::ProbeTxBeam:
    return "ProbeTxBeam";
  case ActionKind::ScanAllRxBeams:
    return "ScanAllRxBeams";
  case ActionKind::StoreNlosBeam:
    return "StoreNlosBeam";
  case ActionKind::SendControlPacket:
    return "SendControlPacket";
  case ActionKind::EnterReacquisition:
    return "EnterReacquisition";
  case ActionKind::None:
    return "None";
  }
  return "None";
}

const char* to_string(RealignmentKind kind) noexcept
{
  switch (kind) {
  case RealignmentKind::rx_only:
    return "rx_only";
  case RealignmentKind::tx_rx:
    return "tx_rx";
  case RealignmentKind::blockage:
    return "blockage";
  }
  return "rx_only";
}

ProtocolContext initial_context(int tx_beam, int rx_beam, double rss_dbm, double now_ms)
{
  ProtocolContext ctx;
  ctx.state = PS::NOp;
  ctx.tx_beam = tx_beam;
  ctx.rx_beam = rx_beam;
  ctx.rss_current_rb = rss_dbm;
  ctx.last_sample_at_ms = now_ms;
  return ctx;
}

StepResult step(const ProtocolContext& context, double now_ms, LinkProbe& link, const ProtocolConfig& config)
{
  return Stepper(context, now_ms, link, config).run();
}

std::vector<RealignmentEvent> realignment_events(std::span<const TransitionRecord> trace)
{
  std::vector<RealignmentEvent> out;
  std::map<int, std::size_t> index;
  for (const TransitionRecord& r : trace) {
    if (!r.event_id)
      continue;
    auto [it, inserted] = index.try_emplace(*r.event_id, out.size());
    if (inserted)
      out.push_back({*r.event_id, RealignmentKind::rx_only, r.t_ms, r.t_ms, false});
    RealignmentEvent& e = out[it->second];
    e.end_ms = r.t_ms;
    const auto visits = [&](PS s) { return std::find(r.path.begin(), r.path.end(), s) != r.path.end(); };
    // Reconnaissance excursions never carry an event id, so any BR here is blockage handling.
    RealignmentKind kind = RealignmentKind::rx_only;
    if (visits(PS::BR) || visits(PS::NLoSBO) || visits(PS::AR))
      kind = RealignmentKind::blockage;
    else if (visits(PS::TBA))
      kind = RealignmentKind::tx_rx;
    if (static_cast<int>(kind) > static_cast<int>(e.kind))
      e.kind = kind;
    if (r.state_after == PS::NOp)
      e.completed = true;
  }
  return out;
}

int probe_budget(std::span<const TransitionRecord> trace, const RealignmentEvent& event)
{
  int probes = 0;
  bool found = false;
  for (const TransitionRecord& r : trace) {
    if (r.event_id && *r.event_id == event.id) {
      found = true;
      probes += r.neighbor_probes;
    }
  }
  if (!found)
    throw std::invalid_argument("realignment event " + std::to_string(event.id) + " not in trace");
  return probes;
}

int probe_budget(std::span<const TransitionRecord> trace, double from_ms, double to_ms)
{
  int probes = 0;
  for (const TransitionRecord& r : trace)
    if (r.t_ms >= from_ms && r.t_ms <= to_ms && r.event_id)
      probes += r.neighbor_probes;
  return probes;
}

std::vector<std::size_t> audit_transitions(std::span<const TransitionRecord> trace)
{
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TransitionRecord& r = trace[i];
    bool ok = !r.path.empty() && r.path.front() == r.state_before && r.path.back() == r.state_after;
    for (std::size_t j = 1; ok && j < r.path.size(); ++j)
      if (r.path[j] != r.path[j - 1] && !is_allowed_transition(r.path[j - 1], r.path[j]))
        ok = false;
    if (i > 0 && trace[i - 1].state_after != r.state_before)
      ok = false;
    if (!ok)
      bad.push_back(i);
  }
  return bad;
}

} // namespace beamsurfer
