// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "beamsurfer/baselines.hpp"
#include "beamsurfer/beam_model.hpp"
#include "beamsurfer/channel.hpp"
#include "beamsurfer/engine.hpp"
#include "beamsurfer/geometry.hpp"
#include "beamsurfer/metrics.hpp"
#include "beamsurfer/rng.hpp"
#include "beamsurfer/scenarios.hpp"
#include "beamsurfer/trace_io.hpp"
#include "reference.hpp"

using namespace beamsurfer;

namespace {

struct Verdict
{
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn)
{
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
        out[i] = fn(i);
    });
  for (auto& t : pool)
    t.join();
  return out;
}

constexpr std::array kMobilities{Mobility::lateral, Mobility::rotational, Mobility::random_walk};
constexpr int kSeeds = 30;

struct MobilityRun
{
  Mobility mobility = Mobility::lateral;
  std::uint64_t seed = 0;
  SimulationTrace trace;
};

std::vector<MobilityRun> mobility_runs()
{
  return parallel_map<MobilityRun>(kMobilities.size() * kSeeds, [](std::size_t i) {
    const Mobility m = kMobilities[i / kSeeds];
    const std::uint64_t seed = 1 + i % kSeeds;
    return MobilityRun{m, seed, run(mobility_scenario(m, seed))};
  });
}

Verdict within_3db(const std::vector<MobilityRun>& runs)
{
  Verdict v;
  for (Mobility m : kMobilities) {
    std::vector<TraceRecord> pooled;
    for (const MobilityRun& r : runs)
      if (r.mobility == m) {
        const auto bs = r.trace.for_policy(Policy::beamsurfer);
        pooled.insert(pooled.end(), bs.begin(), bs.end());
      }
    const double f = oracle_deviation(pooled).fraction_within_3db;
    v.pass = v.pass && f >= 0.95;
    v.detail += fmt("%s %.3f  ", to_string(m), f);
  }
  v.detail += "(need >= 0.95 each)";
  return v;
}

Verdict probe_bound(const std::vector<MobilityRun>& runs)
{
  int violations = 0, events = 0, max_rx = 0, max_all = 0;
  for (const MobilityRun& r : runs) {
    const ProbeStats p = probe_stats(r.trace.transitions);
    violations += p.violations;
    events += p.events;
    max_rx = std::max(max_rx, p.max_rx_only);
    max_all = std::max({max_all, p.max_tx_rx, p.max_rx_only});
  }
  return {violations == 0, fmt("%d realignments, max rx-only %d, max overall %d, violations %d", events, max_rx, max_all,
                               violations)};
}

Verdict bct_ordering()
{
  const std::vector<BctCell> grid = bct_grid();
  std::map<std::tuple<int, double, double, std::string>, std::optional<double>> bct;
  for (const BctCell& c : grid)
    bct[{static_cast<int>(c.kind), c.speed, c.distance_m, c.rx_codebook}] = simulate_bct(c).bct_ms;

  const auto get = [&](BctCell::Kind k, double s, double d, const std::string& cb) {
    return bct.at({static_cast<int>(k), s, d, cb});
  };
  const auto ge = [](std::optional<double> a, std::optional<double> b) { return a && b && *a >= *b; };
  const auto gt = [](std::optional<double> a, std::optional<double> b) { return a && b && *a > *b; };

  int broken = 0;
  std::string out_of_band;
  for (const std::string cb : {"narrow", "wide"})
    for (double d : {5.0, 10.0})
      broken += !gt(get(BctCell::Kind::lateral, 0.67, d, cb), get(BctCell::Kind::lateral, 1.4, d, cb));
  for (const std::string cb : {"narrow", "wide"})
    for (double s : {0.67, 1.4})
      broken += !gt(get(BctCell::Kind::lateral, s, 10.0, cb), get(BctCell::Kind::lateral, s, 5.0, cb));
  for (double s : {0.67, 1.4})
    for (double d : {5.0, 10.0})
      broken += !ge(get(BctCell::Kind::lateral, s, d, "wide"), get(BctCell::Kind::lateral, s, d, "narrow"));
  for (const std::string cb : {"narrow", "wide"}) {
    const std::array w{40.0, 60.0, 120.0, 240.0};
    for (std::size_t i = 1; i < w.size(); ++i)
      broken += !gt(get(BctCell::Kind::rotational, w[i - 1], 5.0, cb), get(BctCell::Kind::rotational, w[i], 5.0, cb));
    broken += !ge(get(BctCell::Kind::rotational, 120.0, 5.0, "wide"), get(BctCell::Kind::rotational, 120.0, 5.0, "narrow"));
  }

  for (const BctCell& c : grid) {
    const auto b = get(c.kind, c.speed, c.distance_m, c.rx_codebook);
    if (!b || *b < 50.0 || *b > 2000.0)
      out_of_band += fmt(" %s/%g/%gm/%s=%s", c.kind == BctCell::Kind::lateral ? "lat" : "rot", c.speed, c.distance_m,
                         c.rx_codebook.c_str(), b ? fmt("%.1f", *b).c_str() : "none");
  }
  return {broken == 0 && out_of_band.empty(),
          fmt("%zu cells, ordering violations %d, outside [50, 2000] ms:%s", grid.size(), broken,
              out_of_band.empty() ? " none" : out_of_band.c_str())};
}

Verdict blockage_recovery()
{
  constexpr std::size_t kTrials = 220;
  const auto traces = parallel_map<std::vector<TraceRecord>>(
      kTrials, [](std::size_t i) { return run(blockage_trial(1000 + i)).for_policy(Policy::beamsurfer); });
  const RecoveryStats s = recovery_stats(traces);
  int gaps_bad = 0, gaps = 0;
  double lo = 1e9, hi = -1e9;
  for (const RecoveryOutcome& o : s.outcomes) {
    if (o.failed || !o.los_rss_dbm || !o.nlos_rss_dbm)
      continue;
    const double gap = *o.los_rss_dbm - *o.nlos_rss_dbm;
    ++gaps;
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
    gaps_bad += gap < 7.0 || gap > 11.0;
  }
  const bool pass = s.events >= 200 && s.failure_rate <= 0.115 && gaps_bad == 0 && gaps > 0;
  return {pass, fmt("%d events, failure rate %.3f (<= 0.115), NLoS gap %.2f..%.2f dB over %d recoveries, %d outside [7, 11]",
                    s.events, s.failure_rate, lo, hi, gaps, gaps_bad)};
}

Verdict throughput(const std::vector<MobilityRun>& runs)
{
  Verdict v;
  std::map<Mobility, double> bs_median;
  double worst_ratio = 1e9;
  bool oracle_exact = true;
  for (Mobility m : kMobilities) {
    std::vector<double> bs, orc;
    for (const MobilityRun& r : runs)
      if (r.mobility == m)
        for (const TraceRecord& rec : r.trace.records)
          (rec.policy == Policy::oracle ? orc : bs).push_back(rec.throughput_bps);
    const double mo = median(orc), mb = median(bs);
    oracle_exact = oracle_exact && mo == 2.0e9;
    bs_median[m] = mb;
    worst_ratio = std::min(worst_ratio, mb / mo);
    v.detail += fmt("%s %.3f/%.3f Gbps  ", to_string(m), mb / 1e9, mo / 1e9);
  }
  const bool order = bs_median[Mobility::lateral] >= bs_median[Mobility::random_walk];
  v.pass = oracle_exact && worst_ratio >= 0.925 && order;
  v.detail += fmt("(beamsurfer/oracle; worst ratio %.3f, lateral >= random walk: %s)", worst_ratio, order ? "yes" : "no");
  return v;
}

Verdict acquisition_delay()
{
  SsbSchedule s;
  s.period_ms = 20.0;
  constexpr int kBeams = 64;
  const auto only = [](int beam) {
    return DecodeFn([beam](double, int rx) { return rx == beam ? std::optional<int>(0) : std::nullopt; });
  };
  s.first_rx_beam = 0;
  const auto worst = acquisition_sweep(0.0, s, kBeams, only(kBeams - 1));

  const RandomStream rng(64, 0u);
  double sum = 0.0;
  constexpr int kDraws = 2000;
  bool all = true;
  for (int i = 0; i < kDraws; ++i) {
    s.first_rx_beam = static_cast<int>(rng.uniform(2 * i, 0.0, kBeams)) % kBeams;
    const auto r = acquisition_sweep(rng.uniform(2 * i + 1, 0.0, 20.0), s, kBeams, only(17));
    all = all && r.has_value();
    sum += r ? r->delay_ms : 0.0;
  }
  const double mean = sum / kDraws;
  const bool pass = worst && worst->delay_ms == 1280.0 && all && mean < worst->delay_ms;
  return {pass, fmt("worst %.1f ms (== 1280), mean over %d random offsets %.1f ms", worst ? worst->delay_ms : -1.0,
                    kDraws, mean)};
}

std::string serialize(const SimulationTrace& t)
{
  std::ostringstream os;
  write_trace_jsonl(t.records, os);
  write_transitions_jsonl(t.transitions, os);
  return os.str();
}

Verdict determinism(const std::vector<MobilityRun>& runs)
{
  std::vector<ScenarioConfig> configs;
  for (Mobility m : kMobilities) {
    ScenarioConfig c = mobility_scenario(m, 3);
    c.policies = {Policy::beamsurfer, Policy::oracle, Policy::exhaustive, Policy::fixed};
    configs.push_back(c);
  }
  configs.push_back(blockage_trial(5));
  configs.push_back(blockage_trial(6, false));
  ScenarioConfig noisy = mobility_scenario(Mobility::random_walk, 9);
  noisy.measurement_noise_db = 1.0;
  configs.push_back(noisy);

  int mismatches = 0;
  std::size_t records = 0, envelope = 0, edges = 0, time = 0;
  const auto tally = [&](const SimulationTrace& t) {
    records += t.audit.records;
    envelope += t.audit.envelope_violations;
    edges += t.audit.transition_violations;
    time += t.audit.time_violations;
  };
  for (const ScenarioConfig& c : configs) {
    const SimulationTrace a = run(c), b = run(c);
    mismatches += serialize(a) != serialize(b);
    tally(a);
  }
  for (const MobilityRun& r : runs)
    tally(r.trace);
  const bool pass = mismatches == 0 && envelope == 0 && edges == 0 && time == 0;
  return {pass, fmt("%zu configs rerun, %d differ; %zu records audited, envelope violations %zu, illegal edges %zu, "
                    "time violations %zu",
                    configs.size(), mismatches, records, envelope, edges, time)};
}

Verdict property_suites()
{
  std::vector<std::string> failed;
  const auto check = [&](bool ok, const char* what) {
    if (!ok)
      failed.push_back(what);
  };

  bool half = true;
  for (const BeamCodebook& cb : {BeamCodebook::narrow(), BeamCodebook::wide(), BeamCodebook::narrow_10deg()})
    for (const Beam& b : cb.beams())
      for (double sign : {-1.0, 1.0})
        half = half && std::abs(beam_gain(b, b.boresight_deg + sign * b.beamwidth_deg / 2.0) - (b.peak_gain_dbi - 3.0)) <
                           1e-12;
  check(half, "half-beamwidth");

  bool doubling = true;
  for (double d = 0.25; d < 200.0; d *= 1.7)
    doubling = doubling && std::abs(fspl_db(2 * d, 60e9) - fspl_db(d, 60e9) - 6.02) <= 0.01;
  check(doubling, "fspl doubling");

  bool image = true;
  const RandomStream rng(8, 1u);
  for (int i = 0; i < 2000; ++i) {
    Environment env;
    const Vec2 a{rng.uniform(6 * i, -10, 10), rng.uniform(6 * i + 1, -10, 10)};
    const Vec2 b{rng.uniform(6 * i + 2, -10, 10), rng.uniform(6 * i + 3, -10, 10)};
    env.walls.push_back({{a, b}, 6.0, 0});
    const Vec2 tx{0.0, 0.0};
    const Vec2 rx{rng.uniform(6 * i + 4, -10, 10), rng.uniform(6 * i + 5, -10, 10)};
    for (const ReflectedPath& p : reflected_paths(env, tx, rx))
      image = image && p.total_length_m >= distance(tx, rx) - 1e-12;
  }
  check(image, "image path length");

  bool hand = true;
  for (const ref::HandScene& s : ref::hand_scenes()) {
    LinkBudget b;
    b.tx_power_dbm = s.tx_power_dbm;
    const RssSample r = compute_rss(s.env, b, s.tx_cb, s.rx_cb, s.tx_beam, s.rx_beam, s.mobile, s.mobile.t_ms);
    hand = hand && std::abs(r.rss_dbm - s.expected_dbm) < 1e-9;
  }
  check(hand, "hand scenes");

  int max_step = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ScenarioConfig c = mobility_scenario(Mobility::lateral, seed);
    LinkBudget budget = c.budget;
    budget.tx_power_dbm = calibrate_tx_power(budget, c.tx_codebook, c.rx_codebook, c.env.nominal_distance_m);
    std::optional<BeamPair> prev;
    for (double t = 0.0; t <= c.duration_ms; t += 10.0) {
      const BeamPair p = oracle_best_pair(c.env, budget, c.tx_codebook, c.rx_codebook, sample_state(c.motion, t), t);
      if (prev)
        max_step = std::max({max_step, std::abs(p.tx_beam - prev->tx_beam), std::abs(p.rx_beam - prev->rx_beam)});
      prev = p;
    }
  }
  check(max_step <= 1, "oracle smoothness");

  std::string which;
  for (const std::string& f : failed)
    which += " " + f;
  return {failed.empty(), fmt("half-beamwidth, FSPL doubling, image length, 5 hand scenes, oracle step (max %d per 10 ms)%s%s",
                              max_step, failed.empty() ? "" : "; failed:", which.c_str())};
}

} // namespace

int main()
{
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<MobilityRun> runs = mobility_runs();
  const double mobility_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  struct Item
  {
    const char* name;
    std::function<Verdict()> fn;
  };
  const std::vector<Item> items{
      {"1 within 3 dB of oracle", [&] {
         Verdict v = within_3db(runs);
         v.detail += fmt(", %d runs in %.1f s", static_cast<int>(runs.size()), mobility_s);
         return v;
       }},
      {"2 probe bound", [&] { return probe_bound(runs); }},
      {"3 BCT ordering and band", bct_ordering},
      {"4 blockage recovery", blockage_recovery},
      {"5 throughput", [&] { return throughput(runs); }},
      {"6 acquisition delay", acquisition_delay},
      {"7 determinism and audit", [&] { return determinism(runs); }},
      {"8 property suites", property_suites},
  };

  int failures = 0;
  for (const Item& item : items) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = item.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s  criterion %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", item.name, v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failures, items.size());
  return failures == 0 ? 0 : 1;
}
