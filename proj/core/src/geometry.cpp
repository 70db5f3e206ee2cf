#include "beamsurfer/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "beamsurfer/beam_model.hpp"
#include "beamsurfer/rng.hpp"

namespace beamsurfer {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Position in [0, length] of a triangle wave that moves at unit speed.
double triangle(double x, double length) noexcept
{
  if (!(length > 0.0))
    return 0.0;
  const double m = std::fmod(x, 2.0 * length);
  return m <= length ? m : 2.0 * length - m;
}

// Reflects x back into [lo, hi] as a billiard ball would.
double fold(double x, double lo, double hi) noexcept
{
  const double w = hi - lo;
  if (!(w > 0.0))
    return lo;
  double r = std::fmod(x - lo, 2.0 * w);
  if (r < 0.0)
    r += 2.0 * w;
  return r <= w ? lo + r : lo + 2.0 * w - r;
}

MobileState sample(const StaticMotion&, const MotionModel& m, double)
{
  return {m.start_position, m.start_orientation_deg, 0.0};
}

MobileState sample(const LateralMotion& k, const MotionModel& m, double t_ms)
{
  const double s = triangle(k.speed_mps * t_ms / 1000.0 + k.start_offset_m, k.path_length_m);
  return {m.start_position + unit_vector(k.heading_deg) * s, m.start_orientation_deg, 0.0};
}

MobileState sample(const RotationalMotion& k, const MotionModel& m, double t_ms)
{
  const double swept = triangle(k.angular_speed_dps * t_ms / 1000.0 + k.start_offset_deg, k.sweep_deg);
  return {m.start_position, wrap_deg(m.start_orientation_deg + swept), 0.0};
}

MobileState sample(const RandomWalkMotion& k, const MotionModel& m, double t_ms)
{
  const RandomStream headings(m.seed, Stream::motion);
  const RandomStream rates = headings.substream(1);

  Vec2 p = m.start_position;
  const double leg_m = k.speed_mps * k.leg_ms / 1000.0;
  const auto full_legs = static_cast<std::uint64_t>(t_ms / k.leg_ms);
  for (std::uint64_t i = 0; i < full_legs; ++i)
    p = p + unit_vector(headings.uniform(i, 0.0, 360.0)) * leg_m;
  const double rest_ms = t_ms - static_cast<double>(full_legs) * k.leg_ms;
  p = p + unit_vector(headings.uniform(full_legs, 0.0, 360.0)) * (k.speed_mps * rest_ms / 1000.0);

  double swing = 0.0;
  const auto full_steps = static_cast<std::uint64_t>(t_ms / k.jitter_step_ms);
  for (std::uint64_t j = 0; j < full_steps; ++j)
    swing += rates.normal(j) * k.orientation_jitter_dps * k.jitter_step_ms / 1000.0;
  const double step_rest = t_ms - static_cast<double>(full_steps) * k.jitter_step_ms;
  swing += rates.normal(full_steps) * k.orientation_jitter_dps * step_rest / 1000.0;
  swing = fold(swing, -k.orientation_limit_deg, k.orientation_limit_deg);

  return {{fold(p.x, k.bounds_min.x, k.bounds_max.x), fold(p.y, k.bounds_min.y, k.bounds_max.y)},
          wrap_deg(m.start_orientation_deg + swing),
          0.0};
}

// Closest-approach time of a linearly moving disk to a segment; the distance
// is convex in time so golden-section search is exact up to tolerance.
template <class F>
double argmin_convex(F f, double lo, double hi)
{
  constexpr double g = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 80 && b - a > 1e-9; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Boundary between an outside point and an inside point of {f <= r}.
template <class F>
double boundary(F f, double r, double outside, double inside)
{
  for (int i = 0; i < 80 && std::abs(inside - outside) > 1e-9; ++i) {
    const double mid = 0.5 * (outside + inside);
    (f(mid) <= r ? inside : outside) = mid;
  }
  return 0.5 * (outside + inside);
}

} // namespace

double bearing_deg(Vec2 from, Vec2 to) noexcept
{
  const Vec2 d = to - from;
  return wrap_deg(std::atan2(d.y, d.x) * kRadToDeg);
}

Vec2 unit_vector(double heading_deg) noexcept
{
  const double r = heading_deg / kRadToDeg;
  return {std::cos(r), std::sin(r)};
}

double distance_to_segment(Vec2 p, const Segment& s) noexcept
{
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0)
    return distance(p, s.a);
  double u = dot(p - s.a, d) / len2;
  u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
  return distance(p, s.a + d * u);
}

void Environment::validate() const
{
  for (const Wall& w : walls) {
    if (distance(w.segment.a, w.segment.b) <= 0.0)
      throw std::invalid_argument("wall " + std::to_string(w.id) + " has zero length");
    if (!std::isfinite(w.reflection_loss_db) || w.reflection_loss_db < 0.0)
      throw std::invalid_argument("wall " + std::to_string(w.id) + " has an invalid reflection loss");
  }
  for (std::size_t i = 0; i < blockers.size(); ++i) {
    const Blocker& b = blockers[i];
    const std::string name = "blocker " + std::to_string(i);
    if (!(b.radius_m > 0.0))
      throw std::invalid_argument(name + ": radius must be positive");
    if (!(b.attenuation_db >= 10.0))
      throw std::invalid_argument(name + ": attenuation must be at least 10 dB");
    if (!(b.onset_ramp_ms >= 0.0))
      throw std::invalid_argument(name + ": onset ramp must be non-negative");
    if (!(b.vanish_ms > b.appear_ms))
      throw std::invalid_argument(name + ": must vanish after it appears");
  }
  if (!(nominal_distance_m > 0.0))
    throw std::invalid_argument("nominal distance must be positive");
}

MobileState sample_state(const MotionModel& model, double t_ms)
{
  if (!(t_ms >= 0.0))
    throw std::invalid_argument("sample_state: time must be non-negative");
  MobileState s = std::visit([&](const auto& kind) { return sample(kind, model, t_ms); }, model.kind);
  s.t_ms = t_ms;
  return s;
}

double blocker_ramp(const Blocker& blocker, const Segment& path, double t_ms)
{
  const auto dist = [&](double tau) { return distance_to_segment(blocker.center_at(tau), path); };
  const double r = blocker.radius_m;

  if (blocker.onset_ramp_ms <= 0.0)
    return blocker.present(t_ms) && dist(t_ms) <= r ? 1.0 : 0.0;

  const double lo = std::max(t_ms - blocker.onset_ramp_ms, blocker.appear_ms);
  const double hi = std::min(t_ms, blocker.vanish_ms);
  if (!(hi > lo))
    return 0.0;

  const double best = argmin_convex(dist, lo, hi);
  if (dist(best) > r)
    return 0.0;
  const double left = dist(lo) <= r ? lo : boundary(dist, r, lo, best);
  const double right = dist(hi) <= r ? hi : boundary(dist, r, hi, best);
  const double ramp = (right - left) / blocker.onset_ramp_ms;
  return ramp < 0.0 ? 0.0 : (ramp > 1.0 ? 1.0 : ramp);
}

double blockage_attenuation(const Environment& env, Vec2 tx, Vec2 rx, double t_ms)
{
  const Segment path{tx, rx};
  double total = 0.0;
  for (const Blocker& b : env.blockers)
    total += b.attenuation_db * blocker_ramp(b, path, t_ms);
  return total;
}

std::vector<ReflectedPath> reflected_paths(const Environment& env, Vec2 tx, Vec2 rx)
{
  std::vector<ReflectedPath> out;
  for (const Wall& w : env.walls) {
    const Vec2 a = w.segment.a;
    const Vec2 d = w.segment.b - a;
    const double side_tx = cross(d, tx - a);
    const double side_rx = cross(d, rx - a);
    // Specular reflection needs both ends strictly on the same side.
    if (side_tx * side_rx <= 0.0)
      continue;

    const Vec2 n = Vec2{-d.y, d.x} * (1.0 / norm(d));
    const Vec2 image = tx - n * (2.0 * dot(tx - a, n));
    const Vec2 e = rx - image;
    const double denom = cross(d, e);
    if (denom == 0.0)
      continue;
    const double s = cross(image - a, e) / denom; // along the wall
    const double u = cross(image - a, d) / denom; // along image->rx
    if (s < 0.0 || s > 1.0 || u <= 0.0 || u >= 1.0)
      continue;

    const Vec2 p = a + d * s;
    out.push_back({p, norm(e), w.reflection_loss_db, bearing_deg(tx, p), bearing_deg(rx, p), w.id});
  }
  return out;
}

} // namespace beamsurfer
