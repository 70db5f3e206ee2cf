#include "beamsurfer/trace_io.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace beamsurfer {
namespace {

using nlohmann::json;

template <class T>
json optional_json(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& doc, const char* key)
{
  if (!doc.contains(key) || doc.at(key).is_null())
    return std::nullopt;
  return doc.at(key).get<T>();
}

ProtocolState state_from(const json& v)
{
  const auto s = parse_state(v.get<std::string>());
  if (!s)
    throw std::runtime_error("unknown protocol state '" + v.get<std::string>() + "'");
  return *s;
}

const char* phase_name(ProbePhase p)
{
  switch (p) {
  case ProbePhase::neighbor:
    return "neighbor";
  case ProbePhase::scan:
    return "scan";
  case ProbePhase::none:
    break;
  }
  return "none";
}

template <class T, class Parse>
std::vector<T> read_lines(std::istream& in, Parse parse)
{
  std::vector<T> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty())
      continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

} // namespace

nlohmann::json to_json(const TraceRecord& r)
{
  json j{{"t_ms", r.t_ms},
         {"policy", to_string(r.policy)},
         {"tx_beam", r.tx_beam},
         {"rx_beam", r.rx_beam},
         {"rss_dbm", optional_json(r.rss_dbm)},
         {"snr_db", optional_json(r.snr_db)},
         {"oracle_rss_dbm", r.oracle_rss_dbm},
         {"probes", r.probes_this_epoch},
         {"throughput_bps", r.throughput_bps},
         {"blockage_active", r.blockage_active}};
  if (r.policy == Policy::beamsurfer) {
    j["state"] = to_string(r.state);
    j["neighbor_probes"] = r.neighbor_probes;
    j["event_id"] = optional_json(r.event_id);
  }
  return j;
}

TraceRecord trace_record_from_json(const nlohmann::json& doc)
{
  TraceRecord r;
  r.t_ms = doc.at("t_ms").get<double>();
  const auto policy = parse_policy(doc.at("policy").get<std::string>());
  if (!policy)
    throw std::runtime_error("unknown policy '" + doc.at("policy").get<std::string>() + "'");
  r.policy = *policy;
  if (doc.contains("state"))
    r.state = state_from(doc.at("state"));
  r.tx_beam = doc.at("tx_beam").get<int>();
  r.rx_beam = doc.at("rx_beam").get<int>();
  r.rss_dbm = optional_from<double>(doc, "rss_dbm");
  r.snr_db = optional_from<double>(doc, "snr_db");
  r.oracle_rss_dbm = doc.at("oracle_rss_dbm").get<double>();
  r.probes_this_epoch = doc.value("probes", 0);
  r.neighbor_probes = doc.value("neighbor_probes", 0);
  r.throughput_bps = doc.at("throughput_bps").get<double>();
  r.blockage_active = doc.value("blockage_active", false);
  r.event_id = optional_from<int>(doc, "event_id");
  return r;
}

nlohmann::json to_json(const TransitionRecord& r)
{
  json path = json::array();
  for (ProtocolState s : r.path)
    path.push_back(to_string(s));
  json actions = json::array();
  for (const Action& a : r.actions)
    actions.push_back({{"kind", to_string(a.kind)},
                       {"beam", a.beam},
                       {"tx_beam", a.tx_beam},
                       {"cost_us", a.cost_us},
                       {"data_loss_us", a.data_loss_us},
                       {"probes", a.probes},
                       {"phase", phase_name(a.phase)}});
  return {{"t_ms", r.t_ms},
          {"state_before", to_string(r.state_before)},
          {"state_after", to_string(r.state_after)},
          {"path", path},
          {"actions", actions},
          {"rss_dbm", optional_json(r.rss_dbm)},
          {"tx_beam", r.tx_beam},
          {"rx_beam", r.rx_beam},
          {"neighbor_probes", r.neighbor_probes},
          {"scan_probes", r.scan_probes},
          {"event_id", optional_json(r.event_id)},
          {"elapsed_us", r.elapsed_us},
          {"data_loss_us", r.data_loss_us}};
}

TransitionRecord transition_record_from_json(const nlohmann::json& doc)
{
  static const std::map<std::string, ActionKind> kinds = [] {
    std::map<std::string, ActionKind> m;
    for (auto k : {ActionKind::SampleRss, ActionKind::ProbeRxBeam, ActionKind::SwitchRxBeam,
                   ActionKind::RequestTxAdaptation, ActionKind::ProbeTxBeam, ActionKind::ScanAllRxBeams,
                   ActionKind::StoreNlosBeam, ActionKind::SendControlPacket, ActionKind::EnterReacquisition,
                   ActionKind::None})
      m.emplace(to_string(k), k);
    return m;
  }();
  TransitionRecord r;
  r.t_ms = doc.at("t_ms").get<double>();
  r.state_before = state_from(doc.at("state_before"));
  r.state_after = state_from(doc.at("state_after"));
  for (const json& s : doc.at("path"))
    r.path.push_back(state_from(s));
  for (const json& a : doc.value("actions", json::array())) {
    Action act;
    const auto it = kinds.find(a.at("kind").get<std::string>());
    if (it == kinds.end())
      throw std::runtime_error("unknown action '" + a.at("kind").get<std::string>() + "'");
    act.kind = it->second;
    act.beam = a.value("beam", -1);
    act.tx_beam = a.value("tx_beam", -1);
    act.cost_us = a.value("cost_us", 0.0);
    act.data_loss_us = a.value("data_loss_us", 0.0);
    act.probes = a.value("probes", 0);
    const std::string phase = a.value("phase", std::string("none"));
    act.phase = phase == "neighbor" ? ProbePhase::neighbor : (phase == "scan" ? ProbePhase::scan : ProbePhase::none);
    r.actions.push_back(act);
  }
  r.rss_dbm = optional_from<double>(doc, "rss_dbm");
  r.tx_beam = doc.at("tx_beam").get<int>();
  r.rx_beam = doc.at("rx_beam").get<int>();
  r.neighbor_probes = doc.value("neighbor_probes", 0);
  r.scan_probes = doc.value("scan_probes", 0);
  r.event_id = optional_from<int>(doc, "event_id");
  r.elapsed_us = doc.value("elapsed_us", 0.0);
  r.data_loss_us = doc.value("data_loss_us", 0.0);
  return r;
}

void write_trace_jsonl(std::span<const TraceRecord> records, std::ostream& out)
{
  for (const TraceRecord& r : records)
    out << to_json(r).dump() << '\n';
}

void write_transitions_jsonl(std::span<const TransitionRecord> records, std::ostream& out)
{
  for (const TransitionRecord& r : records)
    out << to_json(r).dump() << '\n';
}

void write_trace_csv(std::span<const TraceRecord> records, std::ostream& out)
{
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(12);
  out << "t_ms,policy,state,tx_beam,rx_beam,rss_dbm,snr_db,oracle_rss_dbm,probes,neighbor_probes,throughput_bps,"
         "blockage_active,event_id\n";
  for (const TraceRecord& r : records) {
    const bool protocol = r.policy == Policy::beamsurfer;
    out << r.t_ms << ',' << to_string(r.policy) << ',' << (protocol ? to_string(r.state) : "") << ',' << r.tx_beam
        << ',' << r.rx_beam << ',';
    if (r.rss_dbm)
      out << *r.rss_dbm;
    out << ',';
    if (r.snr_db)
      out << *r.snr_db;
    out << ',' << r.oracle_rss_dbm << ',' << r.probes_this_epoch << ',';
    if (protocol)
      out << r.neighbor_probes;
    out << ',' << r.throughput_bps << ',' << (r.blockage_active ? 1 : 0) << ',';
    if (r.event_id)
      out << *r.event_id;
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

std::vector<TraceRecord> read_trace_jsonl(std::istream& in)
{
  return read_lines<TraceRecord>(in, trace_record_from_json);
}

std::vector<TransitionRecord> read_transitions_jsonl(std::istream& in)
{
  return read_lines<TransitionRecord>(in, transition_record_from_json);
}

void write_cdf_csv(std::span<const CdfPoint> cdf, std::ostream& out)
{
  out << "value,quantile\n";
  for (const CdfPoint& p : cdf)
    out << p.value << ',' << p.quantile << '\n';
}

nlohmann::json summarize(std::span<const TraceRecord> records, std::span<const TransitionRecord> transitions)
{
  std::map<std::string, std::vector<TraceRecord>> by_policy;
  std::size_t envelope_violations = 0;
  for (const TraceRecord& r : records) {
    by_policy[to_string(r.policy)].push_back(r);
    if (r.rss_dbm && *r.rss_dbm > r.oracle_rss_dbm + 1e-9)
      ++envelope_violations;
  }

  json policies = json::object();
  for (const auto& [name, trace] : by_policy) {
    std::vector<double> tput;
    for (const TraceRecord& r : trace)
      tput.push_back(r.throughput_bps);
    json p{{"epochs", trace.size()}, {"median_throughput_bps", median(tput)}};
    double sum = 0.0;
    for (double v : tput)
      sum += v;
    p["mean_throughput_bps"] = sum / static_cast<double>(tput.size());
    if (name != "oracle") {
      const DeviationStats d = oracle_deviation(trace);
      p["deviation"] = {{"mean_db", d.mean_db},
                        {"std_db", d.std_db},
                        {"fraction_within_3db", d.fraction_within_3db},
                        {"outages", d.outages}};
    } else {
      std::vector<double> env;
      for (const TraceRecord& r : trace)
        env.push_back(r.oracle_rss_dbm);
      p["median_envelope_rss_dbm"] = median(env);
    }
    if (name == "beamsurfer" && !blockage_events(trace).empty()) {
      const std::vector<std::vector<TraceRecord>> batch{trace};
      const RecoveryStats rs = recovery_stats(batch);
      p["blockage"] = {{"events", rs.events},
                       {"failures", rs.failures},
                       {"failure_rate", rs.failure_rate},
                       {"recoveries", rs.recoveries},
                       {"mean_recovery_ms", rs.mean_recovery_ms}};
    }
    policies[name] = p;
  }

  json out{{"policies", policies}, {"records", records.size()}};
  json audit{{"envelope_violations", envelope_violations}};
  if (!transitions.empty()) {
    const ProbeStats ps = probe_stats(transitions);
    out["probes"] = {{"realignments", ps.events},
                     {"rx_only", ps.rx_only_events},
                     {"tx_rx", ps.tx_rx_events},
                     {"max_rx_only", ps.max_rx_only},
                     {"max_with_tx", ps.max_tx_rx},
                     {"bound_violations", ps.violations},
                     {"scan_probes", ps.scan_probes}};
    audit["transition_violations"] = audit_transitions(transitions).size();
  }
  out["audit"] = audit;
  return out;
}

} // namespace beamsurfer
