#pragma once

// Chain placement: a barrier arc around the forecast slick, units spaced along
// it from the capture radius, and a sampled coverage score.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "levichain/acoustic_field.hpp"
#include "levichain/errors.hpp"
#include "levichain/geometry.hpp"
#include "levichain/physics.hpp"
#include "levichain/scenario.hpp"
#include "levichain/spill.hpp"

namespace levichain {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BarrierPolyline {
  std::vector<Vec2> vertices;
  bool closed = false;

  std::size_t segment_count() const {
    if (vertices.size() < 2) return 0;
    return closed ? vertices.size() : vertices.size() - 1;
  }
  Vec2 segment_start(std::size_t i) const { return vertices[i]; }
  Vec2 segment_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }

  double length() const {
    double total = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i)
      total += distance(segment_start(i), segment_end(i));
    return total;
  }

  struct Station {
    Vec2 point;
    double heading;  // tangent direction, rad
  };

  /// Point at arc length s from the first vertex, s in [0, length()].
  Station at(double s) const {
    for (std::size_t i = 0; i < segment_count(); ++i) {
      const Vec2 a = segment_start(i);
      const Vec2 b = segment_end(i);
      const double len = distance(a, b);
      if (s <= len || i + 1 == segment_count()) {
        const double t = std::clamp(s / len, 0.0, 1.0);
        return {a + t * (b - a), std::atan2(b.y - a.y, b.x - a.x)};
      }
      s -= len;
    }
    return {vertices.front(), 0.0};
  }
};

inline std::vector<Violation> validate(const BarrierPolyline& b) {
  std::vector<Violation> out;
  if (b.vertices.size() < 2) out.push_back({"/barrier", "needs at least 2 vertices"});
  for (std::size_t i = 0; i < b.segment_count(); ++i)
    if (!(distance(b.segment_start(i), b.segment_end(i)) > 0.0))
      out.push_back({"/barrier/" + std::to_string(i), "zero-length segment"});
  return out;
}

inline constexpr double kMaxChordError = 1.0;              // m
inline constexpr double kMaxArcStep = std::numbers::pi / 36;  // 5 degrees

/// Circular arc of radius inflation * radius_p90 about the forecast centroid,
/// bisected by the downwind direction. A 360 degree arc is a closed circle.
inline BarrierPolyline barrier_from_forecast(Vec2 centroid, double radius_p90, double wind_dir,
                                             double arc_degrees, double inflation = 1.2) {
  if (!(radius_p90 > 0.0)) throw DomainError("barrier_from_forecast: radius_p90 must be > 0");
  if (!(arc_degrees > 0.0 && arc_degrees <= 360.0))
    throw DomainError("barrier_from_forecast: arc_degrees must lie in (0, 360]");
  if (!(inflation > 0.0)) throw DomainError("barrier_from_forecast: inflation must be > 0");
  const double radius = inflation * radius_p90;
  const double arc = arc_degrees * std::numbers::pi / 180.0;
  double max_step = kMaxArcStep;
  if (radius > kMaxChordError)
    max_step = std::min(max_step, 2.0 * std::acos(1.0 - kMaxChordError / radius));
  const auto segments = static_cast<std::size_t>(std::max(2.0, std::ceil(arc / max_step)));

  BarrierPolyline b;
  b.closed = arc_degrees == 360.0;
  if (b.closed) {
    const auto n = std::max<std::size_t>(segments, 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = wind_dir + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      b.vertices.push_back(centroid + radius * direction(a));
    }
  } else {
    for (std::size_t i = 0; i <= segments; ++i) {
      const double a = wind_dir - 0.5 * arc + arc * static_cast<double>(i) / static_cast<double>(segments);
      b.vertices.push_back(centroid + radius * direction(a));
    }
  }
  return b;
}

/// Radial distance from the axis at which the node-plane pressure falls to the
/// requirement: radial_scale * sqrt(ln(peak / required)). Zero when the unit
/// cannot reach the requirement.
inline double capture_radius(const LevitatorUnit& unit, const Environment& env,
                             const OilType& oil, double design_droplet_radius) {
  const double peak = unit_peak_arp(unit, env);
  const double required = required_trapping_pressure(design_droplet_radius, oil, env);
  if (!(peak > required)) return 0.0;
  return radial_scale(unit) * std::sqrt(std::log(peak / required));
}

struct ChainPlan {
  std::vector<LevitatorUnit> units;  // placements on the barrier
  LevitatorUnit unit_template{};
  double spacing = 0.0;         // nominal 2 rho_eff (1 - overlap)
  double actual_spacing = 0.0;  // arc length between neighbours as placed
  double capture_radius = 0.0;  // rho_eff
  double coverage = 0.0;
};

/// Equal arc-length placement. Closed barriers start a unit at the first
/// vertex; open barriers centre the units in equal sub-arcs so both ends are
/// covered.
inline ChainPlan plan_chain(const BarrierPolyline& barrier, const LevitatorUnit& unit_template,
                            const Environment& env, const OilType& oil,
                            double design_droplet_radius, double overlap,
                            double max_power_scale = 32.0) {
  if (auto v = validate(barrier); !v.empty()) throw ValidationError(std::move(v));
  if (!(overlap >= 0.0 && overlap <= 0.9)) throw DomainError("plan_chain: overlap must lie in [0, 0.9]");

  const double required = required_trapping_pressure(design_droplet_radius, oil, env);
  auto at_max = unit_template;
  at_max.power_scale = max_power_scale;
  if (!(unit_peak_arp(at_max, env) > required))
    throw PlanError("plan_chain: unit cannot trap design droplet at any power (peak " +
                    std::to_string(unit_peak_arp(at_max, env)) + " Pa <= required " +
                    std::to_string(required) + " Pa)");
  const double rho = capture_radius(unit_template, env, oil, design_droplet_radius);
  if (!(rho > 0.0))
    throw PlanError("plan_chain: unit cannot trap design droplet at power_scale " +
                    std::to_string(unit_template.power_scale) + "; raise it");

  ChainPlan plan;
  plan.unit_template = unit_template;
  plan.capture_radius = rho;
  plan.spacing = 2.0 * rho * (1.0 - overlap);
  const double length = barrier.length();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(length / plan.spacing - 1e-12)));
  plan.actual_spacing = length / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double offset = barrier.closed ? 0.0 : 0.5;
    const auto station = barrier.at((static_cast<double>(i) + offset) * plan.actual_spacing);
    LevitatorUnit u = unit_template;
    u.id = static_cast<int>(i);
    u.position = station.point;
    u.heading = station.heading;
    plan.units.push_back(u);
  }
  return plan;
}

inline constexpr double kCoverageSampleStep = 0.01;  // m

/// Fraction of barrier arc length within a unit's capture radius, sampled at
/// 1 cm spacing (sample points at sub-interval midpoints).
inline double coverage_fraction(const std::vector<LevitatorUnit>& units,
                                const BarrierPolyline& barrier, const Environment& env,
                                const OilType& oil, double design_droplet_radius) {
  if (units.empty() || barrier.segment_count() == 0) return 0.0;
  std::vector<double> reach(units.size());
  double cell = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    reach[i] = capture_radius(units[i], env, oil, design_droplet_radius);
    cell = std::max(cell, reach[i]);
  }
  if (!(cell > 0.0)) return 0.0;

  auto cell_of = [cell](Vec2 p) {
    return std::pair{static_cast<std::int64_t>(std::floor(p.x / cell)),
                     static_cast<std::int64_t>(std::floor(p.y / cell))};
  };
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto [cx, cy] = cell_of(units[i].position);
    grid[key(cx, cy)].push_back(i);
  }

  const double length = barrier.length();
  const auto samples = static_cast<std::size_t>(std::max(1.0, std::ceil(length / kCoverageSampleStep)));
  const double ds = length / static_cast<double>(samples);
  std::size_t covered = 0;
  for (std::size_t j = 0; j < samples; ++j) {
    const Vec2 p = barrier.at((static_cast<double>(j) + 0.5) * ds).point;
    const auto [cx, cy] = cell_of(p);
    bool hit = false;
    for (std::int64_t dx = -1; dx <= 1 && !hit; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && !hit; ++dy) {
        const auto it = grid.find(key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (std::size_t i : it->second) {
          if (distance(p, units[i].position) <= reach[i] + 1e-9) {
            hit = true;
            break;
          }
        }
      }
    }
    if (hit) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(samples);
}

inline double coverage_fraction(const ChainPlan& plan, const BarrierPolyline& barrier,
                                const Environment& env, const OilType& oil,
                                double design_droplet_radius) {
  return coverage_fraction(plan.units, barrier, env, oil, design_droplet_radius);
}

struct PlanResult {
  DriftForecast forecast;
  BarrierPolyline barrier;
  ChainPlan plan;
};

/// Forecasts the freshly seeded spill over the planner horizon, wraps it in a
/// barrier and places a chain on it.
inline PlanResult plan_for_scenario(const Scenario& s, std::uint64_t seed = 0) {
  require_valid(s);
  const auto spill = seed_spill(s.spill.origin, s.spill.count, s.spill.radius, s.oil, seed,
                                s.spill.params);
  PlanResult r;
  r.forecast = forecast_drift(spill, s.env, s.wind_dir, s.planner.horizon);
  if (!(r.forecast.radius_p90 > 0.0))
    throw PlanError("plan: forecast spread is zero (set diffusion_m2ps or horizon_s)");
  r.barrier = barrier_from_forecast(r.forecast.centroid, r.forecast.radius_p90, s.wind_dir,
                                    s.planner.arc_degrees, s.planner.inflation);
  r.plan = plan_chain(r.barrier, s.planner.unit_template, s.env, s.oil,
                      s.planner.design_droplet_radius, s.planner.overlap, s.max_power_scale);
  r.plan.coverage =
      coverage_fraction(r.plan, r.barrier, s.env, s.oil, s.planner.design_droplet_radius);
  return r;
}

/// The scenario with its levitator list replaced by the plan's placements.
inline Scenario with_plan(Scenario s, const ChainPlan& plan) {
  s.units = plan.units;
  return s;
}

/// When planner.enabled is set, the scenario as it will actually run: the
/// planned chain in place of `levitators`, and the planner switched off so the
/// result replays as-is.
inline Scenario resolve_planner(Scenario s, std::uint64_t seed) {
  if (!s.planner.enabled) return s;
  s = with_plan(std::move(s), plan_for_scenario(s, seed).plan);
  s.planner.enabled = false;
  return s;
}

}  // namespace levichain
