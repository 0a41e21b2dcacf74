// Copyright 2026 The uavnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UAVNAV_RADIO_HPP
#define UAVNAV_RADIO_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "uavnav/world.hpp"

namespace uavnav {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

enum class FadingModel { UnitDeterministic, RayleighUnitMean };
enum class InterferenceModel { None, AllOtherGbs };

/// Air-to-ground channel parameters. Defaults are the urban values used in the
/// reference experiments, except noise_power which is normally derived from a
/// target coverage radius (see noise_for_coverage_radius).
struct ChannelParams {
  double a = 5.0;
  double b = 0.5;
  double eta_los = 1.0;
  double eta_nlos = 20.0;
  double fc = 2e9;            // Hz
  double noise_power = 1e-13;  // W
  FadingModel fading_model = FadingModel::UnitDeterministic;
  InterferenceModel interference_model = InterferenceModel::None;
  double r_min = 30.0;  // bps/Hz

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v); };
    if (!(a > 0.0) || !ok(a)) throw std::invalid_argument("channel.a must be positive");
    if (!(b > 0.0) || !ok(b)) throw std::invalid_argument("channel.b must be positive");
    if (!(eta_los >= 1.0) || !ok(eta_los))
      throw std::invalid_argument("channel.eta_los must be >= 1");
    if (!(eta_nlos >= eta_los) || !ok(eta_nlos))
      throw std::invalid_argument("channel.eta_nlos must be >= eta_los");
    if (!(fc > 0.0) || !ok(fc)) throw std::invalid_argument("channel.fc must be positive");
    if (!(noise_power > 0.0) || !ok(noise_power))
      throw std::invalid_argument("channel.noise_power must be positive");
    if (!(r_min > 0.0) || !ok(r_min)) throw std::invalid_argument("channel.r_min must be positive");
  }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct LinkReport {
  std::size_t serving_gbs = 0;
  std::vector<double> per_gbs_snr;
  double rate = 0.0;  // bps/Hz
  bool connected = false;
};

/// Probability of a line-of-sight link at elevation `theta` degrees.
inline double los_probability(double theta, const ChannelParams& cp) {
  return 1.0 / (1.0 + cp.a * std::exp(-cp.b * (theta - cp.a)));
}

/// Mean path loss (linear) blending the LoS and NLoS excess losses.
inline double average_path_loss(double d, double theta, const ChannelParams& cp) {
  if (!(d > 0.0)) throw std::domain_error("average_path_loss: distance must be positive");
  const double p_los = los_probability(theta, cp);
  const double fspl = 4.0 * std::numbers::pi * cp.fc * d / kSpeedOfLight;
  return fspl * fspl * (p_los * cp.eta_los + (1.0 - p_los) * cp.eta_nlos);
}

namespace detail {

inline double mean_channel_gain(const Position& p, const Position& g, const ChannelParams& cp) {
  const double d = distance_to_gbs(p, g);
  if (d == 0.0) throw std::domain_error("link_report: vehicle coincides with a ground station");
  return 1.0 / average_path_loss(d, elevation_angle(p, g), cp);
}

template <class Rng>
double fading_power(const ChannelParams& cp, Rng* rng) {
  if (cp.fading_model == FadingModel::UnitDeterministic) return 1.0;
  if (rng == nullptr)
    throw std::invalid_argument("link_report: Rayleigh fading requires a random stream");
  // |zeta|^2 of a unit-mean Rayleigh channel is Exp(1).
  return std::exponential_distribution<double>(1.0)(*rng);
}

}  // namespace detail

/// Evaluates every station at p, associates with the strongest one (lowest
/// index on ties) and reports its rate. `rng` is only consulted for Rayleigh
/// fading.
template <class Rng = std::mt19937_64>
LinkReport link_report(const Position& p, const MapSpec& m, const ChannelParams& cp,
                       Rng* rng = nullptr) {
  const std::size_t n = m.gbs.size();
  std::vector<double> rx(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double gain = detail::mean_channel_gain(p, m.gbs[j].position, cp) *
                        detail::fading_power(cp, rng);
    rx[j] = gain * m.gbs[j].tx_power;
  }

  LinkReport out;
  out.per_gbs_snr.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double interference = 0.0;
    if (cp.interference_model == InterferenceModel::AllOtherGbs) {
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) interference += rx[k];
    }
    out.per_gbs_snr[j] = rx[j] / (interference + cp.noise_power);
    if (out.per_gbs_snr[j] > out.per_gbs_snr[out.serving_gbs]) out.serving_gbs = j;
  }
  out.rate = std::log2(1.0 + out.per_gbs_snr[out.serving_gbs]);
  out.connected = out.rate >= cp.r_min;
  return out;
}

/// Noise power for which an isolated station reaches exactly r_min at the
/// given horizontal distance from a vehicle flying at `altitude`.
inline double noise_for_coverage_radius(double radius, const GroundStation& station,
                                        double altitude, const ChannelParams& cp) {
  if (!(radius >= 0.0)) throw std::invalid_argument("coverage radius must be non-negative");
  const Position edge{station.position.x + radius, station.position.y, altitude};
  const double d = distance_to_gbs(edge, station.position);
  const double pl = average_path_loss(d, elevation_angle(edge, station.position), cp);
  const double snr_needed = std::exp2(cp.r_min) - 1.0;
  return station.tx_power / (pl * snr_needed);
}

}  // namespace uavnav

#endif  // UAVNAV_RADIO_HPP
