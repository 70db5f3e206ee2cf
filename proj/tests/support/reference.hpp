#pragma once

// Reference models written independently of the library, used as test oracles.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "beamsurfer/channel.hpp"
#include "beamsurfer/geometry.hpp"

namespace ref {

constexpr double kC = 2.998e8;
constexpr double kPi = std::numbers::pi;

inline double deg(double rad) { return rad * 180.0 / kPi; }

inline double wrap(double a)
{
  while (a > 180.0)
    a -= 360.0;
  while (a <= -180.0)
    a += 360.0;
  return a;
}

// Quadratic lobe out to one beamwidth from boresight, flat floor beyond.
inline double gain(double peak, double beamwidth, double boresight, double direction, double floor_db = 20.0)
{
  const double off = std::abs(wrap(direction - boresight));
  if (off > beamwidth)
    return peak - floor_db;
  return peak - 12.0 * (off / beamwidth) * (off / beamwidth);
}

inline double fspl(double d, double f) { return 20.0 * std::log10(d) + 20.0 * std::log10(f) + 20.0 * std::log10(4.0 * kPi / kC); }

inline double bearing(double x0, double y0, double x1, double y1) { return deg(std::atan2(y1 - y0, x1 - x0)); }

inline double dbm_sum(const std::vector<double>& p)
{
  double mw = 0.0;
  for (double v : p)
    mw += std::pow(10.0, v / 10.0);
  return 10.0 * std::log10(mw);
}

struct Reflection
{
  double px = 0.0, py = 0.0, length = 0.0;
};

// Specular point on the horizontal line y = wall_y by similar triangles.
inline Reflection reflect_horizontal(double tx, double ty, double rx, double ry, double wall_y)
{
  const double a = std::abs(ty - wall_y);
  const double b = std::abs(ry - wall_y);
  const double px = tx + (rx - tx) * a / (a + b);
  return {px, wall_y, std::hypot(px - tx, wall_y - ty) + std::hypot(rx - px, ry - wall_y)};
}

// Shortest tx -> wall -> rx detour found by dense sampling of the segment.
inline double brute_force_detour(beamsurfer::Vec2 tx, beamsurfer::Vec2 rx, beamsurfer::Segment wall, int samples = 200000)
{
  double best = 1e300;
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    const double px = wall.a.x + (wall.b.x - wall.a.x) * s;
    const double py = wall.a.y + (wall.b.y - wall.a.y) * s;
    best = std::min(best, std::hypot(px - tx.x, py - tx.y) + std::hypot(rx.x - px, rx.y - py));
  }
  return best;
}

// Fraction of [t - window, t] during which the moving disk overlaps the
// segment, by uniform sampling.
inline double sampled_ramp(const beamsurfer::Blocker& b, const beamsurfer::Segment& seg, double t, int samples = 20000)
{
  if (b.onset_ramp_ms <= 0.0)
    return 0.0;
  int inside = 0;
  for (int i = 0; i < samples; ++i) {
    const double tau = t - b.onset_ramp_ms + b.onset_ramp_ms * (i + 0.5) / samples;
    if (tau < b.appear_ms || tau >= b.vanish_ms)
      continue;
    const beamsurfer::Vec2 c = b.center + b.velocity_mps * ((tau - b.appear_ms) / 1000.0);
    const double vx = seg.b.x - seg.a.x, vy = seg.b.y - seg.a.y;
    double u = ((c.x - seg.a.x) * vx + (c.y - seg.a.y) * vy) / (vx * vx + vy * vy);
    u = std::clamp(u, 0.0, 1.0);
    if (std::hypot(c.x - (seg.a.x + u * vx), c.y - (seg.a.y + u * vy)) <= b.radius_m)
      ++inside;
  }
  return static_cast<double>(inside) / samples;
}

// Hand-evaluated link budgets: each scene states the geometry and the
// expected RSS written out term by term.
struct HandScene
{
  const char* name;
  beamsurfer::Environment env;
  beamsurfer::MobileState mobile;
  beamsurfer::BeamCodebook tx_cb;
  beamsurfer::BeamCodebook rx_cb;
  int tx_beam;
  int rx_beam;
  double tx_power_dbm;
  double expected_dbm;
};

inline std::vector<HandScene> hand_scenes()
{
  using namespace beamsurfer;
  const double peak = 10.0 * std::log10(12.0);
  const double f = 60e9;
  const double pt = 10.0;
  std::vector<HandScene> out;

  Environment open;
  Environment walled;
  walled.walls.push_back({{{-1.0, -2.0}, {12.0, -2.0}}, 8.0, 0});

  // 1: boresight-aligned LoS at 5 m.
  out.push_back({"aligned los", open, {{5.0, 0.0}, 180.0, 0.0}, BeamCodebook::narrow(), BeamCodebook::wide(), 12, 12,
                 pt, pt + peak + peak - fspl(5.0, f)});

  // 2: mobile at (3, 4), facing the AP; tx beam 23 points at 55 deg, LoS leaves at 53.13 deg.
  {
    const double dep = bearing(0, 0, 3, 4);
    const double g_tx = peak - 12.0 * std::pow((55.0 - dep) / 20.0, 2);
    out.push_back({"off-axis los", open, {{3.0, 4.0}, wrap(dep + 180.0), 0.0}, BeamCodebook::narrow(),
                   BeamCodebook::wide(), 23, 12, pt, pt + g_tx + peak - fspl(5.0, f)});
  }

  // 3: LoS plus the wall bounce; both beams see the bounce through the floor.
  {
    const Reflection r = reflect_horizontal(0, 0, 5, 0, -2.0);
    const double los = pt + peak + peak - fspl(5.0, f);
    const double bounce = pt + (peak - 20.0) + (peak - 20.0) - fspl(r.length, f) - 8.0;
    out.push_back({"los plus reflection", walled, {{5.0, 0.0}, 180.0, 0.0}, BeamCodebook::narrow(),
                   BeamCodebook::wide(), 12, 12, pt, dbm_sum({los, bounce})});
  }

  // 4: as 3 with a 20 dB blocker parked on the LoS long before t.
  {
    Environment blocked = walled;
    Blocker b;
    b.center = {2.5, 0.0};
    b.radius_m = 0.25;
    b.attenuation_db = 20.0;
    b.onset_ramp_ms = 30.0;
    b.appear_ms = 0.0;
    blocked.blockers.push_back(b);
    const Reflection r = reflect_horizontal(0, 0, 5, 0, -2.0);
    const double los = pt + peak + peak - fspl(5.0, f) - 20.0;
    const double bounce = pt + (peak - 20.0) + (peak - 20.0) - fspl(r.length, f) - 8.0;
    out.push_back({"blocked los plus reflection", blocked, {{5.0, 0.0}, 180.0, 1000.0}, BeamCodebook::narrow(),
                   BeamCodebook::wide(), 12, 12, pt, dbm_sum({los, bounce})});
  }

  // 5: receive array turned 90 deg away; beam 24 (60 deg) sits 30 deg off a 20 deg lobe.
  out.push_back({"receive sidelobe", open, {{5.0, 0.0}, 90.0, 0.0}, BeamCodebook::narrow(), BeamCodebook::narrow(), 12,
                 24, pt, pt + peak + (peak - 20.0) - fspl(5.0, f)});
  return out;
}

} // namespace ref
