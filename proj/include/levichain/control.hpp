#pragma once

// Emulated feedback sensors and the per-unit power controller.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "levichain/acoustic_field.hpp"
#include "levichain/errors.hpp"
#include "levichain/spill.hpp"

namespace levichain {

enum class SensorKind { Pressure, Temperature, Hydrophone, DissolvedOxygen, OilContent };

inline std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::Pressure: return "pressure";
    case SensorKind::Temperature: return "temperature";
    case SensorKind::Hydrophone: return "hydrophone";
    case SensorKind::DissolvedOxygen: return "dissolved_oxygen";
    case SensorKind::OilContent: return "oil_content";
  }
  return "unknown";
}

/// `aux` holds the hydrophone frequency (Hz); it is 0 for the other kinds.
struct SensorReading {
  int unit_id = 0;
  SensorKind kind = SensorKind::Pressure;
  double value = 0.0;
  double aux = 0.0;
  double timestamp = 0.0;
  double noise_sigma = 0.0;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct SensorNoise {
  double pressure_pa = 0.05;
  double temperature_c = 0.1;
  double hydrophone_pa = 0.05;
  double hydrophone_hz = 10.0;
  double dissolved_oxygen_mgl = 0.05;
  double oil_content = 0.01;

  friend bool operator==(const SensorNoise&, const SensorNoise&) = default;
};

struct SensorModel {
  SensorNoise noise;
  double do_baseline_mgl = 8.0;
  double do_slope_mgl = 2.0;  // DO drop per unit of oil-content fraction

  friend bool operator==(const SensorModel&, const SensorModel&) = default;
};

/// Fraction of all seeded droplets that are Free within one beam radius of the
/// unit's axis.
inline double local_oil_content(const SpillState& spill, const ArpField& field,
                                std::size_t unit_index) {
  if (spill.droplets.empty()) return 0.0;
  const Vec2 axis = field.units().at(unit_index).position;
  const double reach = field.radial_scale_of(unit_index);
  std::size_t n = 0;
  for (const auto& d : spill.droplets)
    if (d.state == DropletState::Free && distance(d.position.xy(), axis) <= reach) ++n;
  return static_cast<double>(n) / static_cast<double>(spill.droplets.size());
}

/// One reading per sensor kind, in enum order. Every reading consumes exactly
/// one normal draw (two for the hydrophone) so the stream position depends only
/// on how many samples were taken.
template <class Rng>
std::vector<SensorReading> sample_sensors(const SpillState& spill, const ArpField& field,
                                          std::size_t unit_index, const SensorModel& model,
                                          Rng& rng) {
  const auto& unit = field.units().at(unit_index);
  const auto& env = field.medium();
  const double t = spill.time;
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noisy = [&](double truth, double sigma) { return truth + sigma * normal(rng); };

  const double oil_truth = local_oil_content(spill, field, unit_index);
  const auto& nz = model.noise;
  std::vector<SensorReading> out;
  out.reserve(5);
  out.push_back({unit.id, SensorKind::Pressure,
                 noisy(field.arp_at(field.node_point(unit_index, 0)), nz.pressure_pa), 0.0, t,
                 nz.pressure_pa});
  out.push_back({unit.id, SensorKind::Temperature, noisy(env.temperature_c, nz.temperature_c),
                 0.0, t, nz.temperature_c});
  const double amp = noisy(field.peak_arp(unit_index), nz.hydrophone_pa);
  const double hz = noisy(unit.frequency, nz.hydrophone_hz);
  out.push_back({unit.id, SensorKind::Hydrophone, amp, hz, t, nz.hydrophone_pa});
  const double dox = noisy(model.do_baseline_mgl - model.do_slope_mgl * oil_truth,
                           nz.dissolved_oxygen_mgl);
  out.push_back({unit.id, SensorKind::DissolvedOxygen, std::max(0.0, dox), 0.0, t,
                 nz.dissolved_oxygen_mgl});
  const double oil = noisy(oil_truth, nz.oil_content);
  out.push_back({unit.id, SensorKind::OilContent, std::clamp(oil, 0.0, 1.0), 0.0, t,
                 nz.oil_content});
  return out;
}

struct ControllerState {
  int unit_id = 0;
  double target_margin = 1.25;  // desired measured / required ratio
  double gain = 0.5;
  double min_power_scale = 0.0;
  double max_power_scale = 32.0;

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

inline std::vector<Violation> validate(const ControllerState& c, const std::string& path) {
  std::vector<Violation> out;
  if (!(c.target_margin >= 1.0)) out.push_back({path + "/target_margin", "must be >= 1"});
  if (!(c.gain > 0.0)) out.push_back({path + "/gain", "must be > 0"});
  if (!(c.min_power_scale >= 0.0 && c.min_power_scale <= c.max_power_scale))
    out.push_back({path + "/power_scale_min", "must lie in [0, power_scale_max]"});
  return out;
}

inline constexpr double kControlEpsilonPa = 1e-6;

/// Multiplicative proportional law on power_scale:
///   s <- clamp(s (1 + gain (target_margin required - measured) / max(measured, eps)))
/// Since measured pressure is proportional to s, the error contracts by a
/// factor (1 - gain) per step in the noiseless case.
inline LevitatorUnit control_step(const ControllerState& ctrl, const SensorReading& reading,
                                  double required, LevitatorUnit unit) {
  if (reading.kind != SensorKind::Pressure)
    throw DomainError("control_step: reading must be a pressure reading");
  const double target = ctrl.target_margin * required;
  const double measured = reading.value;
  const double factor =
      1.0 + ctrl.gain * (target - measured) / std::max(measured, kControlEpsilonPa);
  unit.power_scale =
      std::clamp(unit.power_scale * factor, ctrl.min_power_scale, ctrl.max_power_scale);
  return unit;
}

}  // namespace levichain
