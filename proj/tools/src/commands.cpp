#include "beamsurfer_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "beamsurfer/baselines.hpp"
#include "beamsurfer/config.hpp"
#include "beamsurfer/engine.hpp"
#include "beamsurfer/metrics.hpp"
#include "beamsurfer/trace_io.hpp"

namespace beamsurfer::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(const char* format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct Document
{
  json doc;
  fs::path base_dir;
};

Document load_document(const fs::path& path, std::optional<std::uint64_t> seed)
{
  Document d{read_json_file(path), path.parent_path()};
  if (seed)
    d.doc["seed"] = *seed;
  return d;
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

// One line per policy; everything printed comes from the summary JSON.
void print_headline(const json& summary, std::ostream& out)
{
  for (const auto& [name, p] : summary.at("policies").items()) {
    out << name << ": median throughput " << fmt("%.3f", p.at("median_throughput_bps").get<double>() / 1e9)
        << " Gbps";
    if (p.contains("deviation"))
      out << ", within 3 dB of oracle " << fmt("%.4f", p.at("deviation").at("fraction_within_3db").get<double>());
    out << '\n';
  }
}

json run_summary(const SimulationTrace& trace, const json& doc, std::uint64_t seed)
{
  json s = summarize(trace.records, trace.transitions);
  s["config_hash"] = config_hash(doc);
  s["seed"] = seed;
  s["tx_power_dbm"] = trace.tx_power_dbm;
  s["acquisition_failures"] = trace.acquisition_failures;
  s["engine_audit"] = {{"records", trace.audit.records},
                       {"envelope_violations", trace.audit.envelope_violations},
                       {"transition_violations", trace.audit.transition_violations},
                       {"time_violations", trace.audit.time_violations},
                       {"passed", trace.audit.passed()}};
  return s;
}

struct Axis
{
  std::string name;
  std::vector<json> values;
};

Axis parse_axis(const std::string& spec)
{
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("axis '" + spec + "': expected name=v1,v2,...");
  Axis a{spec.substr(0, eq), {}};
  std::stringstream rest(spec.substr(eq + 1));
  std::string item;
  while (std::getline(rest, item, ','))
    if (!item.empty())
      a.values.push_back(parse_axis_value(item));
  if (a.values.empty())
    throw ConfigError("axis '" + a.name + "' has no values");
  return a;
}

struct Cell
{
  std::vector<json> assignment; // one value per axis
  std::size_t combination = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  json summary;
};

double mean_of(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
  Document d;
  ScenarioConfig scenario;
  try {
    d = load_document(options.config, options.seed);
    scenario = config_from_json(d.doc, d.base_dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const SimulationTrace trace = run(scenario);
    fs::create_directories(options.out_dir);

    std::ostringstream jsonl, csv, transitions;
    write_trace_jsonl(trace.records, jsonl);
    write_trace_csv(trace.records, csv);
    write_transitions_jsonl(trace.transitions, transitions);
    write_file(options.out_dir / "trace.jsonl", jsonl.str());
    write_file(options.out_dir / "trace.csv", csv.str());
    write_file(options.out_dir / "transitions.jsonl", transitions.str());
    write_file(options.out_dir / "config.json", d.doc.dump(2) + "\n");

    for (Policy p : scenario.policies) {
      std::vector<double> tput;
      for (const TraceRecord& r : trace.for_policy(p))
        tput.push_back(r.throughput_bps);
      std::ostringstream cdf;
      write_cdf_csv(empirical_cdf(tput), cdf);
      write_file(options.out_dir / (std::string("throughput_cdf_") + to_string(p) + ".csv"), cdf.str());
    }

    const json summary = run_summary(trace, d.doc, scenario.seed);
    write_file(options.out_dir / "summary.json", summary.dump(2) + "\n");

    out << "config " << summary.at("config_hash").get<std::string>() << " seed " << scenario.seed << '\n';
    print_headline(summary, out);

    if (!trace.audit.passed()) {
      err << "invariant audit failed: " << trace.audit.envelope_violations << " envelope, "
          << trace.audit.transition_violations << " transition, " << trace.audit.time_violations << " timing\n";
      return kAuditFailure;
    }
    if (trace.acquisition_failures > 0) {
      err << "acquisition failed " << trace.acquisition_failures << " time(s)\n";
      return kAcquisitionFailure;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err)
{
  Document d;
  std::vector<Axis> axes;
  try {
    d = load_document(options.config, std::nullopt);
    config_from_json(d.doc, d.base_dir);
    for (const std::string& spec : options.axes)
      axes.push_back(parse_axis(spec));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (options.trials < 1 || options.jobs < 1) {
    err << "config error: trials and jobs must be positive\n";
    return kConfigError;
  }

  // Cross-product of axis values, then trials.
  std::size_t combinations = 1;
  for (const Axis& a : axes)
    combinations *= a.values.size();
  const std::uint64_t base_seed = d.doc.value("seed", std::uint64_t{1});
  std::vector<Cell> cells;
  for (std::size_t c = 0; c < combinations; ++c) {
    std::vector<json> assignment;
    std::size_t rem = c;
    for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
      assignment.push_back(a->values[rem % a->values.size()]);
      rem /= a->values.size();
    }
    std::reverse(assignment.begin(), assignment.end());
    for (int t = 0; t < options.trials; ++t)
      cells.push_back({assignment, c, base_seed + static_cast<std::uint64_t>(t), false, {}, {}});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      try {
        json doc = d.doc;
        for (std::size_t a = 0; a < axes.size(); ++a)
          set_json_path(doc, axes[a].name, cell.assignment[a]);
        doc["seed"] = cell.seed;
        const SimulationTrace trace = run(config_from_json(doc, d.base_dir));
        cell.summary = run_summary(trace, doc, cell.seed);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int jobs = std::min<int>(options.jobs, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j)
    pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool)
    t.join();

  json report;
  report["config_hash"] = config_hash(d.doc);
  report["base_seed"] = base_seed;
  report["trials"] = options.trials;
  json axis_names = json::array();
  for (const Axis& a : axes)
    axis_names.push_back(a.name);
  report["axes"] = axis_names;

  json cell_list = json::array();
  int failed = 0;
  for (const Cell& cell : cells) {
    json j{{"assignment", cell.assignment}, {"seed", cell.seed}, {"ok", cell.ok}};
    if (cell.ok)
      j["summary"] = cell.summary;
    else {
      j["error"] = cell.error;
      ++failed;
    }
    cell_list.push_back(j);
  }
  report["cells"] = cell_list;

  // Table rows: one per (combination, policy), averaged over trials.
  out << "# runs " << cells.size() << ", failed " << failed << '\n';
  for (const Axis& a : axes)
    out << a.name << '\t';
  out << "policy\truns\twithin_3db\tdev_mean_db\tdev_std_db\tmedian_gbps\tprobe_violations\taudit_ok\n";

  json aggregate = json::array();
  for (std::size_t c = 0; c < combinations; ++c) {
    std::map<std::string, std::map<std::string, std::vector<double>>> acc;
    std::map<std::string, bool> audit_ok;
    std::vector<json> assignment;
    int runs = 0, errors = 0;
    for (const Cell& cell : cells) {
      if (cell.combination != c)
        continue;
      assignment = cell.assignment;
      if (!cell.ok) {
        ++errors;
        continue;
      }
      ++runs;
      const int violations = cell.summary.contains("probes") ? cell.summary["probes"]["bound_violations"].get<int>() : 0;
      for (const auto& [name, p] : cell.summary.at("policies").items()) {
        auto& m = acc[name];
        m["median_throughput_bps"].push_back(p.at("median_throughput_bps").get<double>());
        m["mean_throughput_bps"].push_back(p.at("mean_throughput_bps").get<double>());
        if (p.contains("deviation")) {
          m["fraction_within_3db"].push_back(p["deviation"]["fraction_within_3db"].get<double>());
          m["mean_db"].push_back(p["deviation"]["mean_db"].get<double>());
          m["std_db"].push_back(p["deviation"]["std_db"].get<double>());
        }
        if (name == "beamsurfer")
          m["probe_violations"].push_back(violations);
        const bool ok = cell.summary.at("engine_audit").at("passed").get<bool>();
        audit_ok.try_emplace(name, true);
        audit_ok[name] = audit_ok[name] && ok;
      }
    }
    json row{{"assignment", assignment}, {"runs", runs}, {"failed", errors}};
    json policies = json::object();
    for (auto& [name, m] : acc) {
      json p{{"median_throughput_bps", median(m["median_throughput_bps"])},
             {"mean_throughput_bps", mean_of(m["mean_throughput_bps"])},
             {"audit_passed", audit_ok[name]}};
      if (!m["fraction_within_3db"].empty()) {
        p["fraction_within_3db"] = mean_of(m["fraction_within_3db"]);
        p["deviation_mean_db"] = mean_of(m["mean_db"]);
        p["deviation_std_db"] = mean_of(m["std_db"]);
      }
      double violations = 0.0;
      for (double v : m["probe_violations"])
        violations += v;
      if (!m["probe_violations"].empty())
        p["probe_violations"] = static_cast<long>(violations);
      policies[name] = p;

      for (const json& v : assignment)
        out << (v.is_string() ? v.get<std::string>() : v.dump()) << '\t';
      out << name << '\t' << runs << '\t';
      if (p.contains("fraction_within_3db"))
        out << fmt("%.4f", p["fraction_within_3db"].get<double>()) << '\t'
            << fmt("%.3f", p["deviation_mean_db"].get<double>()) << '\t'
            << fmt("%.3f", p["deviation_std_db"].get<double>()) << '\t';
      else
        out << "-\t-\t-\t";
      out << fmt("%.3f", p["median_throughput_bps"].get<double>() / 1e9) << '\t'
          << (p.contains("probe_violations") ? std::to_string(p["probe_violations"].get<long>()) : "-") << '\t'
          << (audit_ok[name] ? "yes" : "no") << '\n';
    }
    row["policies"] = policies;
    aggregate.push_back(row);
  }
  report["aggregate"] = aggregate;

  for (const Cell& cell : cells)
    if (!cell.ok)
      err << "cell seed " << cell.seed << " failed: " << cell.error << '\n';

  if (options.out) {
    try {
      if (options.out->has_parent_path())
        fs::create_directories(options.out->parent_path());
      write_file(*options.out, report.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kFailure;
    }
  }
  return failed == 0 ? kOk : kFailure;
}

int cmd_heatmap(const HeatmapOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    const Document d = load_document(options.config, std::nullopt);
    const ScenarioConfig c = config_from_json(d.doc, d.base_dir);

    double step_ms = 10.0;
    double duration_ms = c.duration_ms;
    std::optional<int> tx_beam;
    if (d.doc.contains("heatmap")) {
      const json& h = d.doc.at("heatmap");
      for (const auto& [key, value] : h.items())
        if (key != "tx_beam" && key != "step_ms" && key != "duration_ms")
          throw ConfigError("heatmap: unknown key '" + key + "'");
      if (h.contains("tx_beam"))
        tx_beam = h.at("tx_beam").get<int>();
      step_ms = h.value("step_ms", step_ms);
      duration_ms = h.value("duration_ms", duration_ms);
    }
    if (options.tx_beam)
      tx_beam = options.tx_beam;
    if (options.step_ms)
      step_ms = *options.step_ms;
    if (options.duration_ms)
      duration_ms = *options.duration_ms;

    BeamCodebook tx_cb = c.tx_codebook;
    BeamCodebook rx_cb = c.rx_codebook;
    for (BeamCodebook* cb : {&tx_cb, &rx_cb}) {
      SidelobeModel s = cb->sidelobe();
      s.seed = c.seed;
      cb->set_sidelobe(s);
    }
    MotionModel motion = c.motion;
    motion.seed = c.seed;
    LinkBudget budget = c.budget;
    if (c.calibrate_tx_power)
      budget.tx_power_dbm = calibrate_tx_power(budget, tx_cb, rx_cb, c.env.nominal_distance_m, c.target_rss_dbm);
    if (!tx_beam)
      tx_beam = oracle_best_pair(c.env, budget, tx_cb, rx_cb, sample_state(motion, 0.0), 0.0).tx_beam;
    if (!tx_cb.contains(*tx_beam))
      throw ConfigError("heatmap: transmit beam " + std::to_string(*tx_beam) + " is outside the codebook");

    const Heatmap h = build_heatmap(c.env, budget, tx_cb, rx_cb, motion, *tx_beam, duration_ms, step_ms);
    std::ostringstream csv;
    write_heatmap_csv(h, rx_cb, csv);
    if (options.out.has_parent_path())
      fs::create_directories(options.out.parent_path());
    write_file(options.out, csv.str());
    out << "heatmap: tx beam " << *tx_beam << ", " << rx_cb.size() << " rx beams x " << h.times_ms.size()
        << " columns -> " << options.out.string() << '\n';
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err)
{
  try {
    std::ifstream trace_in(options.traces / "trace.jsonl");
    if (!trace_in) {
      err << "error: no trace.jsonl in '" << options.traces.string() << "'\n";
      return kFailure;
    }
    const std::vector<TraceRecord> records = read_trace_jsonl(trace_in);
    std::vector<TransitionRecord> transitions;
    if (std::ifstream t(options.traces / "transitions.jsonl"); t)
      transitions = read_transitions_jsonl(t);

    json summary = summarize(records, transitions);
    // Provenance only; no result depends on these.
    if (std::ifstream s(options.traces / "summary.json"); s) {
      const json previous = json::parse(s, nullptr, false);
      if (previous.is_object()) {
        for (const char* key : {"config_hash", "seed"})
          if (previous.contains(key))
            summary[key] = previous[key];
      }
    }

    print_headline(summary, out);
    if (options.out)
      write_file(*options.out, summary.dump(2) + "\n");
    else
      out << summary.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

} // namespace beamsurfer::cli
