#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "../support/reference.hpp"
#include "beamsurfer/beam_model.hpp"
#include "beamsurfer/rng.hpp"

using namespace beamsurfer;

TEST_CASE("main lobe follows the quadratic pattern")
{
  const Beam b{0, 0.0, 20.0, kDefaultPeakGainDbi};
  CHECK(beam_gain(b, 0.0) == doctest::Approx(kDefaultPeakGainDbi));
  CHECK(beam_gain(b, 10.0) == doctest::Approx(kDefaultPeakGainDbi - 3.0));
  CHECK(beam_gain(b, 20.0) == doctest::Approx(kDefaultPeakGainDbi - 12.0));
  CHECK(beam_gain(b, -10.0) == doctest::Approx(beam_gain(b, 10.0)));
}

TEST_CASE("gain is exactly 3 dB down at half the beamwidth")
{
  for (double bw : {5.0, 10.0, 17.5, 20.0, 30.0, 45.0, 60.0}) {
    for (double boresight : {-60.0, -12.5, 0.0, 35.0, 170.0}) {
      const Beam b{0, boresight, bw, 7.0};
      CHECK(beam_gain(b, boresight + bw / 2.0) - 7.0 == doctest::Approx(-3.0).epsilon(1e-12));
      CHECK(beam_gain(b, boresight - bw / 2.0) - 7.0 == doctest::Approx(-3.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("gain agrees with the reference pattern everywhere")
{
  const RandomStream rng(11, 99u);
  for (int i = 0; i < 5000; ++i) {
    const double bw = rng.uniform(4 * i, 5.0, 60.0);
    const double boresight = rng.uniform(4 * i + 1, -60.0, 60.0);
    const double dir = rng.uniform(4 * i + 2, -540.0, 540.0);
    const double peak = rng.uniform(4 * i + 3, 0.0, 20.0);
    const Beam b{0, boresight, bw, peak};
    REQUIRE(beam_gain(b, dir) == doctest::Approx(ref::gain(peak, bw, boresight, dir)).epsilon(1e-9));
  }
}

TEST_CASE("sidelobe floor and seeded ripple")
{
  const Beam b{3, 0.0, 20.0, 10.0};
  CHECK(beam_gain(b, 45.0) == doctest::Approx(-10.0));
  SidelobeModel s;
  s.suppression_db = 25.0;
  CHECK(beam_gain(b, 90.0, s) == doctest::Approx(-15.0));

  s.ripple = true;
  s.seed = 5;
  for (double d = 21.0; d < 180.0; d += 1.0) {
    const double g = beam_gain(b, d, s);
    CHECK(g >= -15.0 - s.ripple_amplitude_db);
    CHECK(g <= -15.0 + s.ripple_amplitude_db);
    CHECK(g == beam_gain(b, d, s));
  }
  SidelobeModel other = s;
  other.seed = 6;
  bool differs = false;
  for (double d = 21.0; d < 180.0; d += 5.0)
    differs = differs || beam_gain(b, d, s) != beam_gain(b, d, other);
  CHECK(differs);
  // Ripple never touches the main lobe.
  CHECK(beam_gain(b, 5.0, s) == doctest::Approx(10.0 - 0.75));
}

TEST_CASE("free-space path loss")
{
  CHECK(fspl_db(10.0, 28e9) == doctest::Approx(81.4).epsilon(0.1 / 81.4));
  CHECK(fspl_db(5.0, 60e9) == doctest::Approx(82.0).epsilon(0.1 / 82.0));
  CHECK(std::abs(fspl_db(1.0, kSpeedOfLight / (4.0 * std::numbers::pi))) < 1e-9);
  for (double d : {0.5, 1.0, 3.0, 5.0, 10.0, 40.0})
    for (double f : {28e9, 60e9, 73e9}) {
      CHECK(fspl_db(d, f) == doctest::Approx(ref::fspl(d, f)).epsilon(1e-12));
      CHECK(std::abs(fspl_db(2.0 * d, f) - fspl_db(d, f) - 6.0206) < 0.01);
    }
  CHECK_THROWS_AS(fspl_db(0.0, 60e9), std::invalid_argument);
  CHECK_THROWS_AS(fspl_db(-1.0, 60e9), std::invalid_argument);
  CHECK_THROWS_AS(fspl_db(5.0, 0.0), std::invalid_argument);
}

TEST_CASE("neighbours stop at the sector edges")
{
  const BeamCodebook cb = BeamCodebook::narrow();
  CHECK(neighbors(cb, 12) == std::vector<int>{11, 13});
  CHECK(neighbors(cb, 0) == std::vector<int>{1});
  CHECK(neighbors(cb, 24) == std::vector<int>{23});
  CHECK_THROWS_AS(neighbors(cb, 25), std::out_of_range);
  CHECK_THROWS_AS(neighbors(cb, -1), std::out_of_range);
  CHECK(neighbors(BeamCodebook::uniform(1, 20.0), 0).empty());
}

TEST_CASE("preset codebooks")
{
  const BeamCodebook n = BeamCodebook::narrow();
  CHECK(n.size() == 25);
  CHECK(n.spacing_deg() == doctest::Approx(5.0));
  CHECK(n.at(0).boresight_deg == doctest::Approx(-60.0));
  CHECK(n.at(24).boresight_deg == doctest::Approx(60.0));
  CHECK(n.at(7).beamwidth_deg == 20.0);
  CHECK(BeamCodebook::wide().at(7).beamwidth_deg == 30.0);
  CHECK(BeamCodebook::preset("narrow10").at(0).beamwidth_deg == 10.0);
  CHECK(n.neighbor_bound() == 2);
  CHECK_THROWS_AS(BeamCodebook::preset("pencil"), std::invalid_argument);
  CHECK_THROWS_AS(n.at(25), std::out_of_range);
}

TEST_CASE("closest beam breaks ties toward the lower index")
{
  const BeamCodebook cb = BeamCodebook::narrow();
  CHECK(cb.closest_beam(0.0) == 12);
  CHECK(cb.closest_beam(2.5) == 12);
  CHECK(cb.closest_beam(2.6) == 13);
  CHECK(cb.closest_beam(-90.0) == 0);
  CHECK(cb.closest_beam(59.0) == 24);
}

TEST_CASE("codebook validation")
{
  std::vector<Beam> ok{{0, -10.0, 20.0}, {1, 0.0, 20.0}, {2, 10.0, 20.0}};
  CHECK_NOTHROW(BeamCodebook(ok, 20.0));
  CHECK_THROWS_AS(BeamCodebook({}, 120.0), std::invalid_argument);
  auto bad_index = ok;
  bad_index[1].index = 5;
  CHECK_THROWS_AS(BeamCodebook(bad_index, 20.0), std::invalid_argument);
  auto unsorted = ok;
  std::swap(unsorted[0].boresight_deg, unsorted[2].boresight_deg);
  CHECK_THROWS_AS(BeamCodebook(unsorted, 20.0), std::invalid_argument);
  auto zero_width = ok;
  zero_width[2].beamwidth_deg = 0.0;
  CHECK_THROWS_AS(BeamCodebook(zero_width, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(BeamCodebook(ok, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(BeamCodebook::uniform(0, 20.0), std::invalid_argument);
}

TEST_CASE("codebook json round trip")
{
  BeamCodebook cb(std::vector<Beam>{{0, -5.0, 12.0, 9.0}, {1, 5.0, 12.0, 9.0}}, 10.0, Steering::full_space);
  const BeamCodebook back = BeamCodebook::from_json(cb.to_json());
  REQUIRE(back.size() == 2);
  CHECK(back.at(1).boresight_deg == 5.0);
  CHECK(back.at(0).peak_gain_dbi == 9.0);
  CHECK(back.steering() == Steering::full_space);
  CHECK(back.neighbor_bound() == 8);
  CHECK_THROWS(BeamCodebook::from_json(nlohmann::json::parse(R"({"beams":[{"index":0}]})")));
}

TEST_CASE("angle wrapping")
{
  CHECK(wrap_deg(180.0) == 180.0);
  CHECK(wrap_deg(-180.0) == 180.0);
  CHECK(wrap_deg(190.0) == doctest::Approx(-170.0));
  CHECK(wrap_deg(-725.0) == doctest::Approx(-5.0));
}
