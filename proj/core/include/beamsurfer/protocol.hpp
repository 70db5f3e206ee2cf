#pragma once

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beamsurfer {

enum class ProtocolState
{
  NOp,    // normal operation on the LoS pair
  RBA,    // receive-beam adaptation
  TBA,    // transmit-beam adaptation
  BR,     // receive-beam reconnaissance scan
  NLoSBO, // operation on a reflected path during blockage
  AR,     // acquisition / re-acquisition
};

const char* to_string(ProtocolState state) noexcept;
std::optional<ProtocolState> parse_state(std::string_view name) noexcept;

// The permitted state-machine edges. Staying in a state is not an edge.
const std::vector<std::pair<ProtocolState, ProtocolState>>& transition_edges();
bool is_allowed_transition(ProtocolState from, ProtocolState to) noexcept;

enum class ActionKind
{
  SampleRss,
  ProbeRxBeam,
  SwitchRxBeam,
  RequestTxAdaptation,
  ProbeTxBeam,
  ScanAllRxBeams,
  StoreNlosBeam,
  SendControlPacket,
  EnterReacquisition,
  None,
};

const char* to_string(ActionKind kind) noexcept;

enum class ProbePhase
{
  none,
  neighbor, // counted against the realignment bound
  scan,     // full scans, reconnaissance and recovery sweeps
};

struct Action
{
  ActionKind kind = ActionKind::None;
  int beam = -1;    // receive beam, or transmit beam for ProbeTxBeam
  int tx_beam = -1; // transmit beam a receive probe was taken against
  double cost_us = 0.0;
  double data_loss_us = 0.0;
  int probes = 0;
  ProbePhase phase = ProbePhase::none;
};

struct ProtocolConfig
{
  double rba_drop_db = 3.0;
  double blockage_drop_db = 10.0;
  double nlos_floor_db = 10.0;
  double stored_beam_max_age_ms = 100.0;
  double tba_timeout_ms = 6000.0;
  double br_interval_ms = 100.0;
  int control_patience = 3;
  double slot_us = 100.0;
  double frame_ms = 10.0;
  // Receive beams within this many indices of the serving beam belong to its
  // lobe and are not eligible as the stored reflected beam.
  int nlos_guard_beams = 4;
};

enum class RealignmentKind
{
  rx_only,
  tx_rx,
  blockage,
};

const char* to_string(RealignmentKind kind) noexcept;

struct ProtocolContext
{
  ProtocolState state = ProtocolState::NOp;
  int tx_beam = 0;
  int rx_beam = 0;
  double rss_current_rb = 0.0;
  std::optional<int> stored_nlos_rx_beam;
  double stored_at_ms = 0.0;
  std::optional<double> tba_entered_at_ms;
  std::optional<double> below_floor_since_ms;
  double last_sample_at_ms = -std::numeric_limits<double>::infinity();
  double last_br_scan_at_ms = -std::numeric_limits<double>::infinity();
  bool synchronized = true;

  // Pair in use when blockage began; probed for the return to LoS.
  std::optional<std::pair<int, int>> los_pair;
  bool control_link_up = false;

  int next_event_id = 1;
  std::optional<int> event_id;
  RealignmentKind event_kind = RealignmentKind::rx_only;

  bool stored_beam_fresh(double now_ms, double max_age_ms) const noexcept
  {
    return stored_nlos_rx_beam.has_value() && now_ms - stored_at_ms <= max_age_ms + 1e-9;
  }
};

// Aligned start in NOp, as after the initial alignment of a trial.
ProtocolContext initial_context(int tx_beam, int rx_beam, double rss_dbm, double now_ms);

struct Acquisition
{
  double acquired_at_ms = 0.0;
  int tx_beam = 0;
  int rx_beam = 0;
};

// What the state machine can ask of the radio. All queries refer to the
// current decision instant.
class LinkProbe
{
public:
  virtual ~LinkProbe() = default;

  virtual int tx_beam_count() const = 0;
  virtual int rx_beam_count() const = 0;

  // RSS of a pair in dBm; nullopt when the measurement failed.
  virtual std::optional<double> measure(int tx_beam, int rx_beam) = 0;

  // Uplink request sent on `rx_beam` while the base station listens on all of
  // its beams. Returns the base-station beam that decoded it.
  virtual std::optional<int> control_exchange(int rx_beam) = 0;

  virtual void begin_acquisition() = 0;
  // Completed acquisition, if one is available by now.
  virtual std::optional<Acquisition> acquisition() = 0;
};

class MeasurementFault : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// One step of the state machine, as logged for conformance checks.
struct TransitionRecord
{
  double t_ms = 0.0;
  ProtocolState state_before = ProtocolState::NOp;
  ProtocolState state_after = ProtocolState::NOp;
  std::vector<ProtocolState> path; // every state visited, in order
  std::vector<Action> actions;
  std::optional<double> rss_dbm;
  int tx_beam = 0;
  int rx_beam = 0;
  int neighbor_probes = 0;
  int scan_probes = 0;
  std::optional<int> event_id;
  double elapsed_us = 0.0;
  double data_loss_us = 0.0;
};

struct StepResult
{
  ProtocolContext context;
  std::vector<Action> actions;
  TransitionRecord record;
};

// Throws MeasurementFault if the scheduled sample cannot be taken.
StepResult step(const ProtocolContext& context, double now_ms, LinkProbe& link, const ProtocolConfig& config = {});

struct RealignmentEvent
{
  int id = 0;
  RealignmentKind kind = RealignmentKind::rx_only;
  double start_ms = 0.0;
  double end_ms = 0.0;
  bool completed = false;
};

std::vector<RealignmentEvent> realignment_events(std::span<const TransitionRecord> trace);

// Neighbor-phase probes spent on `event`. Throws std::invalid_argument when
// the event does not appear in the trace.
int probe_budget(std::span<const TransitionRecord> trace, const RealignmentEvent& event);

// Neighbor-phase probes inside [from_ms, to_ms]; 0 when nothing realigned.
int probe_budget(std::span<const TransitionRecord> trace, double from_ms, double to_ms);

// Indices of records containing an edge outside transition_edges().
std::vector<std::size_t> audit_transitions(std::span<const TransitionRecord> trace);

} // namespace beamsurfer
