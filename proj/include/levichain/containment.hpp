#pragma once

// Couples the spill with the acoustic field: trapping, release, escape, and
// the chained pressure-level trials.
//
// Order within one step: move (spill step), trap check, escape check, record.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "levichain/acoustic_field.hpp"
#include "levichain/control.hpp"
#include "levichain/scenario.hpp"
#include "levichain/scenario_io.hpp"
#include "levichain/spill.hpp"

namespace levichain {

/// Free -> Trapped when the droplet sits within the capture distance of a node
/// plane of the dominant unit and the local pressure meets the threshold; the
/// droplet then snaps onto that plane, inside the unit's beam radius.
/// Trapped -> Free (back to the surface) when the pressure at its node drops
/// below the threshold.
inline Droplet trap_check(Droplet d, const ArpField& field, const OilType& oil,
                          const Environment& env,
                          std::optional<double> capture_distance = std::nullopt) {
  if (d.state == DropletState::Escaped) return d;
  const double required = required_trapping_pressure(d.radius, oil, env);

  if (d.state == DropletState::Trapped) {
    const bool valid_unit = d.trap_unit >= 0 &&
                            static_cast<std::size_t>(d.trap_unit) < field.units().size();
    if (valid_unit && field.arp_at(d.position) >= required) return d;
    d.state = DropletState::Free;
    d.trap_unit = -1;
    d.trap_node = -1;
    d.position.z = 0.0;
    return d;
  }

  const auto dom = field.dominant_at(d.position);
  if (dom.unit_index < 0 || dom.arp < required) return d;
  const auto i = static_cast<std::size_t>(dom.unit_index);
  const auto& nodes = field.nodes(i);
  const std::size_t k = field.nearest_node(i, d.position.z);
  const Vec3 node = field.node_point(i, k);
  const double reach = capture_distance.value_or(0.5 * nodes.spacing);
  if (std::abs(d.position.z - node.z) > reach) return d;

  d.state = DropletState::Trapped;
  d.trap_unit = dom.unit_index;
  d.trap_node = static_cast<int>(k);
  d.position.z = node.z;
  const Vec2 off = d.position.xy() - node.xy();
  const double r = norm(off);
  const double beam = field.radial_scale_of(i);
  if (r > beam) {
    const Vec2 snapped = node.xy() + (beam / r) * off;
    d.position.x = snapped.x;
    d.position.y = snapped.y;
  }
  return d;
}

struct Sample {
  std::size_t step = 0;
  double time = 0.0;
  double trapped_fraction = 0.0;
  double escaped_fraction = 0.0;
  double free_fraction = 0.0;
  std::size_t trapped = 0;
  std::size_t escaped = 0;
  std::size_t free = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Sensor reading plus the unit's power_scale after the control update.
struct TelemetryRow {
  SensorReading reading;
  double power_scale = 0.0;

  friend bool operator==(const TelemetryRow&, const TelemetryRow&) = default;
};

struct SimReport {
  std::vector<Sample> series;
  SpillCounts final_counts{};
  std::size_t droplet_count = 0;
  std::vector<int> unit_ids;
  std::vector<std::size_t> unit_trap_counts;  // parallel to unit_ids
  std::vector<double> final_power_scales;     // parallel to unit_ids
  std::vector<TelemetryRow> telemetry;
  std::uint64_t seed = 0;
  std::string scenario_digest;

  const Sample& final_sample() const { return series.back(); }
};

inline bool operator==(const SpillCounts& a, const SpillCounts& b) {
  return a.free == b.free && a.trapped == b.trapped && a.escaped == b.escaped;
}

inline bool operator==(const SimReport& a, const SimReport& b) {
  return a.series == b.series && a.final_counts == b.final_counts &&
         a.droplet_count == b.droplet_count && a.unit_ids == b.unit_ids &&
         a.unit_trap_counts == b.unit_trap_counts &&
         a.final_power_scales == b.final_power_scales && a.telemetry == b.telemetry &&
         a.seed == b.seed && a.scenario_digest == b.scenario_digest;
}

/// Derives the sensor-noise stream seed from the run seed (splitmix64), so the
/// spill stream is untouched by how often sensors are sampled.
inline std::uint64_t sensor_stream_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One run in progress. Owns its spill, field and controllers exclusively.
class Simulation {
 public:
  Simulation(const Scenario& scenario, std::uint64_t seed)
      : scenario_(scenario),
        spill_(seed_spill(scenario.spill.origin, scenario.spill.count, scenario.spill.radius,
                          scenario.oil, seed, scenario.spill.params)),
        sensor_rng_(sensor_stream_seed(seed)),
        seed_(seed) {
    set_units(initial_units(scenario_));
    record();
  }

  const SpillState& spill() const noexcept { return spill_; }
  const ArpField& field() const noexcept { return field_; }
  const std::vector<Sample>& series() const noexcept { return series_; }
  std::size_t steps_taken() const noexcept { return steps_; }

  /// Replaces the unit settings at a step boundary; trapped droplets are
  /// re-checked on the next step.
  void set_units(std::vector<LevitatorUnit> units) { field_ = ArpField(std::move(units), scenario_.env); }

  void set_power_scale(double scale) {
    auto units = field_.units();
    for (auto& u : units) u.power_scale = scale;
    set_units(std::move(units));
  }

  void advance(std::size_t n_steps) {
    for (std::size_t i = 0; i < n_steps; ++i) advance_one();
  }

  SimReport report(std::string digest = {}) const {
    SimReport r;
    r.series = series_;
    r.final_counts = count_states(spill_);
    r.droplet_count = spill_.droplets.size();
    const auto& units = field_.units();
    r.unit_trap_counts.assign(units.size(), 0);
    for (const auto& u : units) {
      r.unit_ids.push_back(u.id);
      r.final_power_scales.push_back(u.power_scale);
    }
    for (const auto& d : spill_.droplets)
      if (d.state == DropletState::Trapped) ++r.unit_trap_counts.at(static_cast<std::size_t>(d.trap_unit));
    r.telemetry = telemetry_;
    r.seed = seed_;
    r.scenario_digest = std::move(digest);
    return r;
  }

 private:
  void advance_one() {
    step(spill_, scenario_.env, scenario_.wind_dir, scenario_.dt);
    for (auto& d : spill_.droplets) {
      if (d.state == DropletState::Escaped) continue;
      d = trap_check(d, field_, scenario_.oil, scenario_.env, scenario_.capture_distance);
      if (d.state == DropletState::Free && !scenario_.domain.contains(d.position.xy()))
        d.state = DropletState::Escaped;
    }
    ++steps_;
    record();
    const auto& c = scenario_.control;
    if (c.enabled && steps_ % static_cast<std::size_t>(c.cadence_steps) == 0) control_update();
  }

  void control_update() {
    const auto& c = scenario_.control;
    const double required =
        required_trapping_pressure(c.design_droplet_radius, scenario_.oil, scenario_.env);
    auto units = field_.units();
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto readings = sample_sensors(spill_, field_, i, c.sensors, sensor_rng_);
      const ControllerState ctrl{units[i].id, c.target_margin, c.gain, c.power_scale_min,
                                 c.power_scale_max};
      units[i] = control_step(ctrl, readings.front(), required, units[i]);
      for (const auto& r : readings) telemetry_.push_back({r, units[i].power_scale});
    }
    set_units(std::move(units));
  }

  void record() {
    const auto c = count_states(spill_);
    const double n = static_cast<double>(spill_.droplets.size());
    series_.push_back({steps_, spill_.time, static_cast<double>(c.trapped) / n,
                       static_cast<double>(c.escaped) / n, static_cast<double>(c.free) / n,
                       c.trapped, c.escaped, c.free});
  }

  Scenario scenario_;
  SpillState spill_;
  ArpField field_;
  std::mt19937_64 sensor_rng_;
  std::uint64_t seed_;
  std::size_t steps_ = 0;
  std::vector<Sample> series_;
  std::vector<TelemetryRow> telemetry_;
};

inline SimReport run(const Scenario& scenario, std::uint64_t seed) {
  require_valid(scenario);
  Simulation sim(scenario, seed);
  sim.advance(step_count(scenario));
  return sim.report(scenario_digest(scenario));
}

struct TrialRecord {
  PressureLevel level = PressureLevel::None;
  double initial_trapped_pct = 0.0;
  double final_trapped_pct = 0.0;
  double duration_min = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct TrialProtocolStep {
  PressureLevel level;
  double duration_min;
};

/// No / Low / Medium / High for 30 / 20 / 10 / 10 minutes.
inline constexpr std::array<TrialProtocolStep, 4> kPocProtocol{{
    {PressureLevel::None, 30.0},
    {PressureLevel::Low, 20.0},
    {PressureLevel::Medium, 10.0},
    {PressureLevel::High, 10.0},
}};

/// Runs the four pressure trials back to back on one spill: each trial starts
/// from the state the previous one left, with only the power preset changed.
/// Feedback control is disabled so the presets are held.
inline std::vector<TrialRecord> replicate_poc(const Scenario& base, std::uint64_t seed) {
  Scenario s = base;
  s.control.enabled = false;
  s.pressure_level = PressureLevel::None;
  require_valid(s);
  for (const auto& t : kPocProtocol) {
    if (preset_power_scale(t.level) > s.max_power_scale)
      throw ValidationError(std::vector<Violation>{{"/sim/max_power_scale", "below the High preset"}});
  }

  Simulation sim(s, seed);
  std::vector<TrialRecord> out;
  for (const auto& t : kPocProtocol) {
    sim.set_power_scale(preset_power_scale(t.level));
    const double n = static_cast<double>(sim.spill().droplets.size());
    TrialRecord rec;
    rec.level = t.level;
    rec.duration_min = t.duration_min;
    rec.initial_trapped_pct = 100.0 * static_cast<double>(count_states(sim.spill()).trapped) / n;
    const auto steps = static_cast<std::size_t>(std::ceil(t.duration_min * 60.0 / s.dt - 1e-9));
    sim.advance(steps);
    rec.final_trapped_pct = 100.0 * static_cast<double>(count_states(sim.spill()).trapped) / n;
    out.push_back(rec);
  }
  return out;
}

}  // namespace levichain
