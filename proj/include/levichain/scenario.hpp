#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "levichain/acoustic_field.hpp"
#include "levichain/control.hpp"
#include "levichain/errors.hpp"
#include "levichain/geometry.hpp"
#include "levichain/physics.hpp"
#include "levichain/spill.hpp"

namespace levichain {

enum class PressureLevel { None, Low, Medium, High };

inline std::string_view to_string(PressureLevel level) {
  switch (level) {
    case PressureLevel::None: return "none";
    case PressureLevel::Low: return "low";
    case PressureLevel::Medium: return "medium";
    case PressureLevel::High: return "high";
  }
  return "none";
}

inline std::optional<PressureLevel> pressure_level_from_string(std::string_view s) {
  if (s == "none") return PressureLevel::None;
  if (s == "low") return PressureLevel::Low;
  if (s == "medium") return PressureLevel::Medium;
  if (s == "high") return PressureLevel::High;
  return std::nullopt;
}

/// power_scale multiplier on the base unit. Low clears the 1 mm threshold
/// (6 x 0.816 Pa ~ 4.9 Pa > 3.924 Pa).
inline double preset_power_scale(PressureLevel level) {
  switch (level) {
    case PressureLevel::None: return 0.0;
    case PressureLevel::Low: return 6.0;
    case PressureLevel::Medium: return 12.0;
    case PressureLevel::High: return 24.0;
  }
  return 0.0;
}

struct SpillSpec {
  Vec2 origin{};
  std::size_t count = 1000;
  RadiusSpec radius = FixedRadius{};
  SpillParams params{};
  friend bool operator==(const SpillSpec&, const SpillSpec&) = default;
};

struct ControlConfig {
  bool enabled = false;
  int cadence_steps = 10;
  double target_margin = 1.25;
  double gain = 0.5;
  double power_scale_min = 0.0;
  double power_scale_max = 32.0;
  double design_droplet_radius = 1e-3;
  SensorModel sensors{};
  friend bool operator==(const ControlConfig&, const ControlConfig&) = default;
};

struct PlannerConfig {
  bool enabled = false;
  double arc_degrees = 360.0;
  double overlap = 0.1;
  double inflation = 1.2;
  double horizon = 3600.0;  // s
  double design_droplet_radius = 1e-3;
  LevitatorUnit unit_template{};
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

struct Scenario {
  std::string medium = "seawater";
  Environment env{};
  double wind_dir = 0.0;  // rad, direction the wind blows toward
  OilType oil{};
  SpillSpec spill{};
  std::vector<LevitatorUnit> units;
  double dt = 1.0;
  double duration = 60.0;
  Rect domain{-100.0, 100.0, -100.0, 100.0};
  std::optional<PressureLevel> pressure_level;
  std::optional<double> capture_distance;  // m; per-unit lambda/4 when unset
  double max_power_scale = 32.0;
  ControlConfig control{};
  PlannerConfig planner{};
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline std::size_t step_count(const Scenario& s) {
  if (s.duration <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(s.duration / s.dt + 1e-9));
}

/// Units as they start the run: the pressure-level preset, when set,
/// overrides every unit's power_scale.
inline std::vector<LevitatorUnit> initial_units(const Scenario& s) {
  auto units = s.units;
  if (s.pressure_level)
    for (auto& u : units) u.power_scale = preset_power_scale(*s.pressure_level);
  return units;
}

inline std::vector<Violation> validate(const Scenario& s) {
  std::vector<Violation> out;
  auto append = [&](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };

  append(validate(s.env));
  if (!std::isfinite(s.wind_dir)) out.push_back({"/environment/wind_direction_rad", "must be finite"});
  append(validate(s.oil));
  if (s.oil.density > 0.0 && s.env.water_density > 0.0 && !(s.oil.density < s.env.water_density))
    out.push_back({"/oil/density_kgm3", "must be below water_density_kgm3 (buoyant oil)"});

  if (s.spill.count < 1) out.push_back({"/spill/count", "must be >= 1"});
  if (const auto* f = std::get_if<FixedRadius>(&s.spill.radius)) {
    if (!(f->radius > 0.0)) out.push_back({"/spill/radius/fixed_m", "must be > 0"});
  } else if (const auto* l = std::get_if<LogNormalRadius>(&s.spill.radius)) {
    if (!(l->median > 0.0)) out.push_back({"/spill/radius/lognormal/median_m", "must be > 0"});
    if (!(l->sigma > 0.0)) out.push_back({"/spill/radius/lognormal/sigma", "must be > 0"});
  }
  if (!(s.spill.params.wind_drift_factor >= 0.0))
    out.push_back({"/spill/wind_drift_factor", "must be >= 0"});
  if (!(s.spill.params.diffusion >= 0.0)) out.push_back({"/spill/diffusion_m2ps", "must be >= 0"});

  if (!(s.max_power_scale >= 0.0)) out.push_back({"/sim/max_power_scale", "must be >= 0"});
  std::set<int> ids;
  for (std::size_t i = 0; i < s.units.size(); ++i) {
    const std::string path = "/levitators/" + std::to_string(i);
    auto u = s.units[i];
    if (s.pressure_level) u.power_scale = preset_power_scale(*s.pressure_level);
    append(validate(u, s.max_power_scale, path));
    if (!ids.insert(u.id).second) out.push_back({path + "/id", "duplicate unit id"});
    if (s.env.sound_speed > 0.0 && u.frequency > 0.0 &&
        !(u.reflector_gap > 0.5 * node_spacing(s.env.sound_speed, u.frequency)))
      out.push_back({path + "/reflector_gap_m", "no trapping node fits (gap <= lambda/4)"});
  }
  if (s.pressure_level && preset_power_scale(*s.pressure_level) > s.max_power_scale)
    out.push_back({"/sim/pressure_level", "preset exceeds max_power_scale"});

  if (!(s.dt > 0.0)) out.push_back({"/sim/dt_s", "must be > 0"});
  if (!(s.duration >= 0.0) || (s.dt > 0.0 && s.duration != 0.0 && s.duration < s.dt))
    out.push_back({"/sim/duration_s", "must be 0 or >= dt_s"});
  if (s.domain.degenerate()) out.push_back({"/sim/domain_m", "must be a non-degenerate rectangle"});
  if (s.capture_distance && !(*s.capture_distance > 0.0))
    out.push_back({"/sim/capture_distance_m", "must be > 0"});

  const auto& c = s.control;
  if (c.cadence_steps < 1) out.push_back({"/control/cadence_steps", "must be >= 1"});
  if (!(c.target_margin >= 1.0)) out.push_back({"/control/target_margin", "must be >= 1"});
  if (!(c.gain > 0.0)) out.push_back({"/control/gain", "must be > 0"});
  if (!(c.power_scale_min >= 0.0 && c.power_scale_min <= c.power_scale_max))
    out.push_back({"/control/power_scale_min", "must lie in [0, power_scale_max]"});
  if (!(c.power_scale_max <= s.max_power_scale))
    out.push_back({"/control/power_scale_max", "must be <= sim.max_power_scale"});
  if (!(c.design_droplet_radius > 0.0))
    out.push_back({"/control/design_droplet_radius_m", "must be > 0"});
  const auto& nz = c.sensors.noise;
  for (auto [v, name] : {std::pair{nz.pressure_pa, "pressure_pa"},
                         std::pair{nz.temperature_c, "temperature_c"},
                         std::pair{nz.hydrophone_pa, "hydrophone_pa"},
                         std::pair{nz.hydrophone_hz, "hydrophone_hz"},
                         std::pair{nz.dissolved_oxygen_mgl, "dissolved_oxygen_mgl"},
                         std::pair{nz.oil_content, "oil_content"}}) {
    if (!(v >= 0.0)) out.push_back({std::string("/control/noise/") + name, "must be >= 0"});
  }
  if (!(c.sensors.do_baseline_mgl >= 0.0))
    out.push_back({"/control/do_baseline_mgl", "must be >= 0"});
  if (!(c.sensors.do_slope_mgl >= 0.0)) out.push_back({"/control/do_slope_mgl", "must be >= 0"});

  const auto& p = s.planner;
  if (!(p.arc_degrees > 0.0 && p.arc_degrees <= 360.0))
    out.push_back({"/planner/arc_degrees", "must lie in (0, 360]"});
  if (!(p.overlap >= 0.0 && p.overlap <= 0.9))
    out.push_back({"/planner/overlap", "must lie in [0, 0.9]"});
  if (!(p.inflation > 0.0)) out.push_back({"/planner/inflation", "must be > 0"});
  if (!(p.horizon >= 0.0)) out.push_back({"/planner/horizon_s", "must be >= 0"});
  if (!(p.design_droplet_radius > 0.0))
    out.push_back({"/planner/design_droplet_radius_m", "must be > 0"});
  append(validate(p.unit_template, s.max_power_scale, "/planner/template"));
  return out;
}

inline void require_valid(const Scenario& s) {
  if (auto v = validate(s); !v.empty()) throw ValidationError(std::move(v));
}

}  // namespace levichain
