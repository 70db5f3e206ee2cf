#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace beamsurfer {

// 10*log10(12): one 12-element array.
inline constexpr double kDefaultPeakGainDbi = 10.791812460476249;
inline constexpr double kSpeedOfLight = 2.998e8;

// Wraps an angle to (-180, 180].
double wrap_deg(double angle_deg) noexcept;

struct Beam
{
  int index = 0;
  double boresight_deg = 0.0;
  double beamwidth_deg = 20.0; // full width at -3 dB
  double peak_gain_dbi = kDefaultPeakGainDbi;
};

// Gain outside the main lobe: a constant floor below peak, optionally with a
// seeded ripple that is fixed per (beam, offset bucket).
struct SidelobeModel
{
  double suppression_db = 20.0;
  bool ripple = false;
  std::uint64_t seed = 0;
  double ripple_amplitude_db = 5.0;
  double bucket_deg = 5.0;
};

// Directional gain in dBi toward `direction_deg` (same frame as the boresight).
// Main lobe (offset <= beamwidth): peak - 3 * (2 * offset / beamwidth)^2.
double beam_gain(const Beam& beam, double direction_deg, const SidelobeModel& sidelobe = {});

// Free-space path loss in dB. Throws std::invalid_argument on non-positive input.
double fspl_db(double distance_m, double frequency_hz);

enum class Steering
{
  azimuth,
  full_space,
};

class BeamCodebook
{
public:
  BeamCodebook() = default;

  // Validates ordering, indexing and equal spacing; throws std::invalid_argument.
  BeamCodebook(std::vector<Beam> beams, double sector_width_deg = 120.0, Steering steering = Steering::azimuth,
               SidelobeModel sidelobe = {});

  // `count` beams equally spaced over the sector, centred on 0 degrees.
  static BeamCodebook uniform(int count, double beamwidth_deg, double sector_width_deg = 120.0,
                              double peak_gain_dbi = kDefaultPeakGainDbi);

  static BeamCodebook narrow(); // 25 x 20 deg
  static BeamCodebook wide();   // 25 x 30 deg
  static BeamCodebook narrow_10deg();

  // "narrow", "wide" or "narrow10".
  static BeamCodebook preset(const std::string& name);

  static BeamCodebook from_json(const nlohmann::json& doc);
  static BeamCodebook load(const std::string& path);
  nlohmann::json to_json() const;

  int size() const noexcept { return static_cast<int>(beams_.size()); }
  bool empty() const noexcept { return beams_.empty(); }
  bool contains(int index) const noexcept { return index >= 0 && index < size(); }
  const Beam& at(int index) const;
  const std::vector<Beam>& beams() const noexcept { return beams_; }

  double sector_width_deg() const noexcept { return sector_width_deg_; }
  double spacing_deg() const noexcept;
  Steering steering() const noexcept { return steering_; }
  int neighbor_bound() const noexcept { return steering_ == Steering::azimuth ? 2 : 8; }

  const SidelobeModel& sidelobe() const noexcept { return sidelobe_; }
  void set_sidelobe(const SidelobeModel& sidelobe) { sidelobe_ = sidelobe; }

  double gain(int index, double direction_deg) const { return beam_gain(at(index), direction_deg, sidelobe_); }

  // Beam whose boresight is closest to `direction_deg`; ties go to the lower index.
  int closest_beam(double direction_deg) const;

private:
  std::vector<Beam> beams_;
  double sector_width_deg_ = 120.0;
  Steering steering_ = Steering::azimuth;
  SidelobeModel sidelobe_;
};

// {index-1, index+1} clipped to the sector. No wraparound between the edges.
std::vector<int> neighbors(const BeamCodebook& codebook, int index);

} // namespace beamsurfer
