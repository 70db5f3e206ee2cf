#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/reference.hpp"
#include "beamsurfer/geometry.hpp"
#include "beamsurfer/rng.hpp"

using namespace beamsurfer;

namespace {

MotionModel lateral(double speed, double length = 3.0)
{
  MotionModel m;
  m.kind = LateralMotion{speed, length, 90.0};
  m.start_position = {5.0, -1.5};
  return m;
}

} // namespace

TEST_CASE("lateral motion")
{
  const MotionModel m = lateral(1.4);
  CHECK(sample_state(m, 0.0).position == Vec2{5.0, -1.5});
  const MobileState s = sample_state(m, 1000.0);
  CHECK(s.position.x == doctest::Approx(5.0));
  CHECK(s.position.y - (-1.5) == doctest::Approx(1.4));
  CHECK(s.orientation_deg == 180.0);
  // 4.2 m along a 3 m path folds back to 1.8 m.
  CHECK(sample_state(m, 3000.0).position.y + 1.5 == doctest::Approx(1.8));
  // Period is 2L / v.
  CHECK(sample_state(m, 1234.0 + 2 * 3.0 / 1.4 * 1000.0).position.y ==
        doctest::Approx(sample_state(m, 1234.0).position.y));

  MotionModel shifted = m;
  std::get<LateralMotion>(shifted.kind).start_offset_m = 0.7;
  CHECK(sample_state(shifted, 0.0).position.y + 1.5 == doctest::Approx(0.7));
  CHECK(sample_state(shifted, 500.0).position.y == doctest::Approx(sample_state(m, 1000.0).position.y));
}

TEST_CASE("rotational motion")
{
  MotionModel m;
  m.kind = RotationalMotion{120.0, 120.0};
  m.start_orientation_deg = 120.0;
  CHECK(sample_state(m, 0.0).orientation_deg == doctest::Approx(120.0));
  CHECK(sample_state(m, 500.0).orientation_deg - 120.0 == doctest::Approx(60.0));
  CHECK(sample_state(m, 1000.0).orientation_deg == doctest::Approx(-120.0)); // 240 wrapped
  CHECK(sample_state(m, 1500.0).orientation_deg == doctest::Approx(180.0));
  CHECK(sample_state(m, 500.0).position == m.start_position);
}

TEST_CASE("random walk stays in bounds and is seeded")
{
  MotionModel m;
  RandomWalkMotion k;
  m.kind = k;
  m.start_position = {5.0, 0.0};
  m.seed = 3;
  MotionModel other = m;
  other.seed = 4;
  bool differs = false;
  for (double t = 0.0; t <= 20000.0; t += 37.0) {
    const MobileState s = sample_state(m, t);
    REQUIRE(s.position.x >= k.bounds_min.x - 1e-9);
    REQUIRE(s.position.x <= k.bounds_max.x + 1e-9);
    REQUIRE(s.position.y >= k.bounds_min.y - 1e-9);
    REQUIRE(s.position.y <= k.bounds_max.y + 1e-9);
    REQUIRE(std::abs(wrap_deg(s.orientation_deg - 180.0)) <= k.orientation_limit_deg + 1e-9);
    REQUIRE(sample_state(m, t).position == s.position);
    differs = differs || !(sample_state(other, t).position == s.position);
  }
  CHECK(differs);
  // Continuous in time: 1 m/s cannot cover more than 1 cm per 10 ms.
  for (double t = 0.0; t < 5000.0; t += 10.0)
    REQUIRE(distance(sample_state(m, t).position, sample_state(m, t + 10.0).position) <= 0.01 + 1e-9);
}

TEST_CASE("static motion and invalid time")
{
  MotionModel m;
  m.start_position = {2.0, 1.0};
  CHECK(sample_state(m, 12345.0).position == Vec2{2.0, 1.0});
  CHECK_THROWS_AS(sample_state(m, -1.0), std::invalid_argument);
}

TEST_CASE("blockage ramps in linearly")
{
  Environment env;
  const Vec2 tx{0.0, 0.0}, rx{5.0, 0.0};
  CHECK(blockage_attenuation(env, tx, rx, 100.0) == 0.0);

  Blocker b;
  b.center = {2.5, 0.0};
  b.attenuation_db = 15.0;
  b.onset_ramp_ms = 30.0;
  b.appear_ms = 1000.0;
  env.blockers.push_back(b);
  CHECK(blockage_attenuation(env, tx, rx, 999.0) == 0.0);
  CHECK(blockage_attenuation(env, tx, rx, 1015.0) == doctest::Approx(7.5).epsilon(1e-6));
  CHECK(blockage_attenuation(env, tx, rx, 1030.0) == doctest::Approx(15.0));
  CHECK(blockage_attenuation(env, tx, rx, 5000.0) == doctest::Approx(15.0));

  // Off the segment: nothing.
  env.blockers[0].center = {2.5, 1.0};
  CHECK(blockage_attenuation(env, tx, rx, 5000.0) == 0.0);
  // Beyond the receiver: nothing.
  env.blockers[0].center = {6.0, 0.0};
  CHECK(blockage_attenuation(env, tx, rx, 5000.0) == 0.0);
}

TEST_CASE("blockage ends when the blocker vanishes")
{
  Environment env;
  Blocker b;
  b.center = {2.5, 0.0};
  b.attenuation_db = 20.0;
  b.appear_ms = 0.0;
  b.vanish_ms = 500.0;
  env.blockers.push_back(b);
  CHECK(blockage_attenuation(env, {0, 0}, {5, 0}, 499.0) == doctest::Approx(20.0));
  // Falls off over the same 30 ms it took to rise.
  CHECK(blockage_attenuation(env, {0, 0}, {5, 0}, 515.0) == doctest::Approx(10.0));
  CHECK(blockage_attenuation(env, {0, 0}, {5, 0}, 531.0) == doctest::Approx(0.0));
}

TEST_CASE("moving blocker ramp matches a sampled reference")
{
  const RandomStream rng(21, 7u);
  const Segment seg{{0.0, 0.0}, {5.0, 0.0}};
  for (int i = 0; i < 200; ++i) {
    Blocker b;
    b.center = {rng.uniform(6 * i, 0.5, 4.5), rng.uniform(6 * i + 1, -1.0, -0.3)};
    b.velocity_mps = {0.0, rng.uniform(6 * i + 2, 0.5, 2.0)};
    b.radius_m = rng.uniform(6 * i + 3, 0.1, 0.3);
    b.onset_ramp_ms = rng.uniform(6 * i + 4, 10.0, 60.0);
    b.appear_ms = 0.0;
    const double t = rng.uniform(6 * i + 5, 0.0, 1500.0);
    REQUIRE(blocker_ramp(b, seg, t) == doctest::Approx(ref::sampled_ramp(b, seg, t)).epsilon(2e-3).scale(1.0));
  }
}

TEST_CASE("image-source reflection off a horizontal wall")
{
  Environment env;
  env.walls.push_back({{{-100.0, 0.0}, {100.0, 0.0}}, 6.0, 4});
  const auto paths = reflected_paths(env, {0.0, 2.0}, {4.0, 2.0});
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].reflection_point.x == doctest::Approx(2.0));
  CHECK(paths[0].reflection_point.y == doctest::Approx(0.0));
  CHECK(paths[0].total_length_m == doctest::Approx(2.0 * std::sqrt(8.0)));
  CHECK(paths[0].reflection_loss_db == 6.0);
  CHECK(paths[0].wall_id == 4);
  CHECK(paths[0].departure_deg == doctest::Approx(-45.0));
  CHECK(paths[0].arrival_deg == doctest::Approx(-135.0));
}

TEST_CASE("no reflection without a usable wall")
{
  Environment env;
  CHECK(reflected_paths(env, {0, 0}, {5, 0}).empty());
  // Specular point would land at x = 2.5, off this short segment.
  env.walls.push_back({{{4.0, -2.0}, {6.0, -2.0}}, 8.0, 0});
  CHECK(ref::brute_force_detour({0, 0}, {5, 0}, env.walls[0].segment) > std::sqrt(41.0) + 1e-3);
  CHECK(reflected_paths(env, {0, 0}, {5, 0}).empty());
  // Ends on opposite sides of the wall.
  env.walls = {{{{-10.0, -2.0}, {10.0, -2.0}}, 8.0, 0}};
  CHECK(reflected_paths(env, {0, 0}, {5, -4}).empty());
  // Wall collinear with both ends.
  env.walls = {{{{-3.0, 0.0}, {-1.0, 0.0}}, 8.0, 0}};
  CHECK(reflected_paths(env, {0, 0}, {5, 0}).empty());
}

TEST_CASE("image path is the shortest detour and never shorter than the direct path")
{
  const RandomStream rng(5, 13u);
  int found = 0;
  for (int i = 0; i < 300; ++i) {
    Environment env;
    const Vec2 a{rng.uniform(8 * i, -5, 5), rng.uniform(8 * i + 1, -5, 5)};
    const Vec2 b{rng.uniform(8 * i + 2, -5, 5), rng.uniform(8 * i + 3, -5, 5)};
    env.walls.push_back({{a, b}, 8.0, 0});
    const Vec2 tx{rng.uniform(8 * i + 4, -5, 5), rng.uniform(8 * i + 5, -5, 5)};
    const Vec2 rx{rng.uniform(8 * i + 6, -5, 5), rng.uniform(8 * i + 7, -5, 5)};
    for (const ReflectedPath& p : reflected_paths(env, tx, rx)) {
      ++found;
      REQUIRE(p.total_length_m >= distance(tx, rx) - 1e-12);
      REQUIRE(p.total_length_m == doctest::Approx(ref::brute_force_detour(tx, rx, env.walls[0].segment, 20000))
                                      .epsilon(1e-4));
      REQUIRE(distance_to_segment(p.reflection_point, env.walls[0].segment) < 1e-9);
    }
  }
  CHECK(found > 50);
}

TEST_CASE("environment validation")
{
  Environment env;
  env.walls.push_back({{{1, 1}, {1, 1}}, 8.0, 0});
  CHECK_THROWS_AS(env.validate(), std::invalid_argument);
  env.walls.clear();
  Blocker b;
  b.attenuation_db = 5.0;
  env.blockers.push_back(b);
  CHECK_THROWS_AS(env.validate(), std::invalid_argument);
  env.blockers[0].attenuation_db = 20.0;
  env.blockers[0].vanish_ms = -1.0;
  CHECK_THROWS_AS(env.validate(), std::invalid_argument);
  env.blockers[0].vanish_ms = 100.0;
  CHECK_NOTHROW(env.validate());
}
