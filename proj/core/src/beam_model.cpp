#include "beamsurfer/beam_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "beamsurfer/rng.hpp"

namespace beamsurfer {

double wrap_deg(double angle_deg) noexcept
{
  double a = std::fmod(angle_deg, 360.0);
  if (a <= -180.0)
    a += 360.0;
  else if (a > 180.0)
    a -= 360.0;
  return a;
}

double beam_gain(const Beam& beam, double direction_deg, const SidelobeModel& sidelobe)
{
  const double delta = std::abs(wrap_deg(direction_deg - beam.boresight_deg));
  if (delta <= beam.beamwidth_deg) {
    const double u = 2.0 * delta / beam.beamwidth_deg;
    return beam.peak_gain_dbi - 3.0 * u * u;
  }
  double gain = beam.peak_gain_dbi - sidelobe.suppression_db;
  if (sidelobe.ripple) {
    const RandomStream stream(sidelobe.seed, Stream::ripple);
    const auto bucket = static_cast<std::uint64_t>(delta / sidelobe.bucket_deg);
    const auto counter = static_cast<std::uint64_t>(beam.index) * 4096 + bucket;
    gain += stream.uniform(counter, -sidelobe.ripple_amplitude_db, sidelobe.ripple_amplitude_db);
  }
  return gain;
}

double fspl_db(double distance_m, double frequency_hz)
{
  if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
    throw std::invalid_argument("fspl_db: distance and frequency must be positive");
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

BeamCodebook::BeamCodebook(std::vector<Beam> beams, double sector_width_deg, Steering steering,
                           SidelobeModel sidelobe)
    : beams_(std::move(beams)), sector_width_deg_(sector_width_deg), steering_(steering), sidelobe_(sidelobe)
{
  if (beams_.empty())
    throw std::invalid_argument("codebook has no beams");
  if (!(sector_width_deg_ > 0.0))
    throw std::invalid_argument("codebook sector width must be positive");
  for (std::size_t i = 0; i < beams_.size(); ++i) {
    const Beam& b = beams_[i];
    if (b.index != static_cast<int>(i))
      throw std::invalid_argument("codebook beam indices must be 0..N-1 in order");
    if (!(b.beamwidth_deg > 0.0) || !std::isfinite(b.beamwidth_deg))
      throw std::invalid_argument("beam " + std::to_string(i) + ": beamwidth must be positive");
    if (!std::isfinite(b.peak_gain_dbi) || !std::isfinite(b.boresight_deg))
      throw std::invalid_argument("beam " + std::to_string(i) + ": non-finite gain or boresight");
  }
  if (beams_.size() > 1) {
    const double step = sector_width_deg_ / static_cast<double>(beams_.size() - 1);
    for (std::size_t i = 1; i < beams_.size(); ++i) {
      const double d = beams_[i].boresight_deg - beams_[i - 1].boresight_deg;
      if (std::abs(d - step) > 1e-6)
        throw std::invalid_argument("codebook boresights must be sorted and spaced sector/(N-1) apart");
    }
  }
}

BeamCodebook BeamCodebook::uniform(int count, double beamwidth_deg, double sector_width_deg, double peak_gain_dbi)
{
  if (count <= 0)
    throw std::invalid_argument("codebook needs at least one beam");
  std::vector<Beam> beams;
  beams.reserve(static_cast<std::size_t>(count));
  const double step = count > 1 ? sector_width_deg / (count - 1) : 0.0;
  const double first = count > 1 ? -sector_width_deg / 2.0 : 0.0;
  for (int i = 0; i < count; ++i)
    beams.push_back(Beam{i, first + step * i, beamwidth_deg, peak_gain_dbi});
  return BeamCodebook(std::move(beams), sector_width_deg);
}

BeamCodebook BeamCodebook::narrow() { return uniform(25, 20.0); }
BeamCodebook BeamCodebook::wide() { return uniform(25, 30.0); }
BeamCodebook BeamCodebook::narrow_10deg() { return uniform(25, 10.0); }

BeamCodebook BeamCodebook::preset(const std::string& name)
{
  if (name == "narrow")
    return narrow();
  if (name == "wide")
    return wide();
  if (name == "narrow10")
    return narrow_10deg();
  throw std::invalid_argument("unknown codebook preset '" + name + "'");
}

BeamCodebook BeamCodebook::from_json(const nlohmann::json& doc)
{
  const nlohmann::json& list = doc.is_array() ? doc : doc.at("beams");
  std::vector<Beam> beams;
  for (const auto& item : list) {
    Beam b;
    b.index = item.at("index").get<int>();
    b.boresight_deg = item.at("boresight").get<double>();
    b.beamwidth_deg = item.at("beamwidth").get<double>();
    b.peak_gain_dbi = item.value("peak_gain", kDefaultPeakGainDbi);
    beams.push_back(b);
  }
  double sector = 120.0;
  Steering steering = Steering::azimuth;
  SidelobeModel sidelobe;
  if (doc.is_object()) {
    sector = doc.value("sector_width", 120.0);
    steering = doc.value("steering", std::string("azimuth")) == "full_space" ? Steering::full_space : Steering::azimuth;
    sidelobe.suppression_db = doc.value("sidelobe_suppression", 20.0);
  }
  return BeamCodebook(std::move(beams), sector, steering, sidelobe);
}

BeamCodebook BeamCodebook::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open codebook file '" + path + "'");
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json BeamCodebook::to_json() const
{
  nlohmann::json beams = nlohmann::json::array();
  for (const Beam& b : beams_)
    beams.push_back({{"index", b.index}, {"boresight", b.boresight_deg}, {"beamwidth", b.beamwidth_deg},
                     {"peak_gain", b.peak_gain_dbi}});
  return {{"sector_width", sector_width_deg_},
          {"steering", steering_ == Steering::azimuth ? "azimuth" : "full_space"},
          {"sidelobe_suppression", sidelobe_.suppression_db},
          {"beams", beams}};
}

const Beam& BeamCodebook::at(int index) const
{
  if (!contains(index))
    throw std::out_of_range("beam index " + std::to_string(index) + " outside codebook");
  return beams_[static_cast<std::size_t>(index)];
}

double BeamCodebook::spacing_deg() const noexcept
{
  return beams_.size() > 1 ? sector_width_deg_ / static_cast<double>(beams_.size() - 1) : sector_width_deg_;
}

int BeamCodebook::closest_beam(double direction_deg) const
{
  int best = 0;
  double best_delta = 1e9;
  for (const Beam& b : beams_) {
    const double d = std::abs(wrap_deg(direction_deg - b.boresight_deg));
    if (d < best_delta - 1e-12) {
      best_delta = d;
      best = b.index;
    }
  }
  return best;
}

std::vector<int> neighbors(const BeamCodebook& codebook, int index)
{
  if (!codebook.contains(index))
    throw std::out_of_range("beam index " + std::to_string(index) + " outside codebook");
  std::vector<int> out;
  if (index > 0)
    out.push_back(index - 1);
  if (index + 1 < codebook.size())
    out.push_back(index + 1);
  return out;
}

} // namespace beamsurfer
