#pragma once

// Closed-form spill-rate and acoustic-radiation relations.
// All quantities are SI; there is no unit conversion layer.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "levichain/errors.hpp"

namespace levichain {

struct OilType {
  std::string name = "crude";
  double density = 700.0;   // kg/m^3
  double viscosity = 0.05;  // Pa s

  friend bool operator==(const OilType&, const OilType&) = default;
};

struct Environment {
  double wind_speed = 0.0;          // m/s
  double water_density = 1000.0;    // kg/m^3
  double sound_speed = 1480.0;      // m/s, in the propagation medium
  double gravity = 9.81;            // m/s^2
  double spreading_constant = 1.0;  // dimensionless
  double temperature_c = 20.0;      // ambient, only read by the sensor model

  friend bool operator==(const Environment&, const Environment&) = default;
};

inline std::vector<Violation> validate(const OilType& oil, const std::string& path = "/oil") {
  std::vector<Violation> out;
  if (!(oil.density > 0.0)) out.push_back({path + "/density_kgm3", "must be > 0"});
  if (!(oil.viscosity > 0.0)) out.push_back({path + "/viscosity_pas", "must be > 0"});
  return out;
}

inline std::vector<Violation> validate(const Environment& env,
                                       const std::string& path = "/environment") {
  std::vector<Violation> out;
  if (!(env.wind_speed >= 0.0)) out.push_back({path + "/wind_speed_mps", "must be >= 0"});
  if (!(env.water_density > 0.0)) out.push_back({path + "/water_density_kgm3", "must be > 0"});
  if (!(env.sound_speed > 0.0)) out.push_back({path + "/sound_speed_mps", "must be > 0"});
  if (!(env.gravity > 0.0)) out.push_back({path + "/gravity_mps2", "must be > 0"});
  if (!(env.spreading_constant > 0.0))
    out.push_back({path + "/spreading_constant", "must be > 0"});
  if (!std::isfinite(env.temperature_c)) out.push_back({path + "/temperature_c", "must be finite"});
  return out;
}

/// Spreading rate A * W * (eta/rho_oil - 1/rho_water), evaluated verbatim.
/// The material factor mixes units and is negative for most oils; the sign is
/// kept as is.
inline double oil_spill_rate_raw(const Environment& env, const OilType& oil) {
  return env.spreading_constant * env.wind_speed *
         (oil.viscosity / oil.density - 1.0 / env.water_density);
}

/// Non-negative spreading driver used by the simulator, |oil_spill_rate_raw|.
inline double oil_spill_rate_effective(const Environment& env, const OilType& oil) {
  return std::abs(oil_spill_rate_raw(env, oil));
}

/// I = P / A.
inline double acoustic_intensity(double total_power, double focus_area) {
  if (!(focus_area > 0.0)) throw DomainError("acoustic_intensity: focus_area must be > 0");
  if (!(total_power >= 0.0)) throw DomainError("acoustic_intensity: total_power must be >= 0");
  return total_power / focus_area;
}

/// Radiation pressure of a fully reflected plane wave, 2 I / c.
inline double arp_from_intensity(double intensity, double sound_speed) {
  if (!(sound_speed > 0.0)) throw DomainError("arp_from_intensity: sound_speed must be > 0");
  if (!(intensity >= 0.0)) throw DomainError("arp_from_intensity: intensity must be >= 0");
  return 2.0 * intensity / sound_speed;
}

/// Net buoyant force a trap must hold, (4 pi r^3 g / 3) |rho_w - rho_o|.
inline double buoyant_arf(double radius, const OilType& oil, const Environment& env) {
  if (!(radius >= 0.0)) throw DomainError("buoyant_arf: radius must be >= 0");
  const double volume = 4.0 * std::numbers::pi * radius * radius * radius / 3.0;
  return volume * env.gravity * std::abs(env.water_density - oil.density);
}

/// Radiation pressure needed over the droplet cross-section, ARF / (pi r^2).
inline double required_trapping_pressure(double radius, const OilType& oil,
                                         const Environment& env) {
  if (!(radius > 0.0)) throw DomainError("required_trapping_pressure: radius must be > 0");
  return buoyant_arf(radius, oil, env) / (std::numbers::pi * radius * radius);
}

}  // namespace levichain
