#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace beamsurfer {

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(b - a); }

// World bearing of `to` as seen from `from`, degrees in (-180, 180].
double bearing_deg(Vec2 from, Vec2 to) noexcept;
Vec2 unit_vector(double heading_deg) noexcept;

struct Segment
{
  Vec2 a;
  Vec2 b;
};

double distance_to_segment(Vec2 p, const Segment& s) noexcept;

struct Wall
{
  Segment segment;
  double reflection_loss_db = 8.0;
  int id = 0;
};

// A disk-shaped obstruction. It exists during [appear_ms, vanish_ms) and
// moves with constant velocity from `center` starting at appear_ms.
struct Blocker
{
  Vec2 center;
  double radius_m = 0.25;
  double attenuation_db = 20.0;
  double onset_ramp_ms = 30.0;
  Vec2 velocity_mps;
  double appear_ms = 0.0;
  double vanish_ms = std::numeric_limits<double>::infinity();

  Vec2 center_at(double t_ms) const noexcept { return center + velocity_mps * ((t_ms - appear_ms) / 1000.0); }
  bool present(double t_ms) const noexcept { return t_ms >= appear_ms && t_ms < vanish_ms; }
};

struct Environment
{
  Vec2 tx_position;
  double tx_boresight_deg = 0.0;
  std::vector<Wall> walls;
  std::vector<Blocker> blockers;
  // Distance at which the transmit power is calibrated.
  double nominal_distance_m = 5.0;

  // Throws std::invalid_argument when a wall or blocker is malformed.
  void validate() const;
};

struct MobileState
{
  Vec2 position;
  double orientation_deg = 180.0; // heading of the array normal
  double t_ms = 0.0;
};

struct StaticMotion
{
};

// Back-and-forth along `heading_deg` over `path_length_m` (triangle wave).
struct LateralMotion
{
  double speed_mps = 1.4;
  double path_length_m = 3.0;
  double heading_deg = 90.0;
  double start_offset_m = 0.0; // where on the triangle wave t = 0 falls
};

// Fixed position; orientation sweeps [start, start + sweep] as a triangle wave.
struct RotationalMotion
{
  double angular_speed_dps = 120.0;
  double sweep_deg = 120.0;
  double start_offset_deg = 0.0;
};

// Straight legs with random headings folded into a rectangle, plus a seeded
// Gaussian angular-rate jitter on the orientation folded into +-limit.
struct RandomWalkMotion
{
  double speed_mps = 1.0;
  Vec2 bounds_min{4.0, -1.5};
  Vec2 bounds_max{6.0, 1.5};
  double orientation_jitter_dps = 60.0;
  double orientation_limit_deg = 60.0;
  double leg_ms = 1000.0;
  double jitter_step_ms = 100.0;
};

using MotionKind = std::variant<StaticMotion, LateralMotion, RotationalMotion, RandomWalkMotion>;

struct MotionModel
{
  MotionKind kind;
  Vec2 start_position{5.0, 0.0};
  double start_orientation_deg = 180.0;
  std::uint64_t seed = 0;
};

// Pure in (model, t). Throws std::invalid_argument for t < 0.
MobileState sample_state(const MotionModel& model, double t_ms);

// Ramp factor in [0, 1] for one blocker on a fixed segment: the fraction of
// the trailing onset window during which the disk intersected the segment.
double blocker_ramp(const Blocker& blocker, const Segment& path, double t_ms);

// Sum of ramped attenuations of all blockers crossing the tx->rx segment.
double blockage_attenuation(const Environment& env, Vec2 tx, Vec2 rx, double t_ms);

struct ReflectedPath
{
  Vec2 reflection_point;
  double total_length_m = 0.0;
  double reflection_loss_db = 0.0;
  double departure_deg = 0.0; // world bearing from tx toward the wall
  double arrival_deg = 0.0;   // world bearing from rx toward the wall
  int wall_id = 0;
};

// First-order image-source reflections.
std::vector<ReflectedPath> reflected_paths(const Environment& env, Vec2 tx, Vec2 rx);

} // namespace beamsurfer
