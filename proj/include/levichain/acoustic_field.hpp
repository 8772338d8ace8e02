#pragma once

// Levitator units as effective radiation-pressure fields.
//
// Vertical geometry of one unit: the reflector plate sits at depth
// `depth_setpoint` below the surface and the transducer plane sits
// `reflector_gap` above the reflector (possibly above the waterline). Trapping
// nodes lie at lambda/4 + k lambda/2 from the reflector. With the default
// depth setpoint one node coincides with the surface, where Free droplets float.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "levichain/errors.hpp"
#include "levichain/geometry.hpp"
#include "levichain/physics.hpp"

namespace levichain {

inline constexpr double kMinFrequencyHz = 20e3;
inline constexpr double kMaxFrequencyHz = 100e3;
inline constexpr double kPreferredMinFrequencyHz = 40e3;
inline constexpr double kPreferredMaxFrequencyHz = 60e3;

struct LevitatorUnit {
  int id = 0;
  Vec2 position{};
  double heading = 0.0;                // rad
  int num_transducers = 14;
  double power_per_transducer = 1.0;   // W
  double frequency = 40e3;             // Hz
  double aperture_area = 0.1;          // m^2
  double reflector_gap = 0.05;         // m
  double depth_setpoint = 0.04930625;  // m, reflector depth below the surface
  double power_scale = 1.0;

  double total_power() const {
    return power_scale * static_cast<double>(num_transducers) * power_per_transducer;
  }

  friend bool operator==(const LevitatorUnit&, const LevitatorUnit&) = default;
};

inline std::vector<Violation> validate(const LevitatorUnit& unit, double max_power_scale,
                                       const std::string& path) {
  std::vector<Violation> out;
  if (unit.num_transducers < 1) out.push_back({path + "/num_transducers", "must be >= 1"});
  if (!(unit.power_per_transducer > 0.0))
    out.push_back({path + "/power_per_transducer_w", "must be > 0"});
  if (!(unit.aperture_area > 0.0)) out.push_back({path + "/aperture_m2", "must be > 0"});
  if (!(unit.reflector_gap > 0.0)) out.push_back({path + "/reflector_gap_m", "must be > 0"});
  if (!(unit.frequency >= kMinFrequencyHz && unit.frequency <= kMaxFrequencyHz))
    out.push_back({path + "/frequency_hz", "must lie in [20000, 100000] Hz"});
  if (!(unit.power_scale >= 0.0 && unit.power_scale <= max_power_scale))
    out.push_back({path + "/power_scale",
                   "must lie in [0, " + std::to_string(max_power_scale) + "]"});
  if (!(unit.depth_setpoint > 0.0 && unit.depth_setpoint <= unit.reflector_gap))
    out.push_back({path + "/depth_setpoint_m", "must lie in (0, reflector_gap_m]"});
  if (!std::isfinite(unit.position.x) || !std::isfinite(unit.position.y))
    out.push_back({path + "/position_m", "must be finite"});
  if (!std::isfinite(unit.heading)) out.push_back({path + "/heading_rad", "must be finite"});
  return out;
}

struct NodeGeometry {
  std::vector<double> node_offsets;  // m from the reflector plate, ascending
  double spacing = 0.0;              // lambda / 2
};

inline double node_spacing(double sound_speed, double frequency) {
  return sound_speed / (2.0 * frequency);
}

/// Nodes sit at lambda/4 + k lambda/2 from the reflector, strictly inside the gap.
inline NodeGeometry node_geometry(const LevitatorUnit& unit, const Environment& env) {
  if (!(env.sound_speed > 0.0)) throw DomainError("node_geometry: sound_speed must be > 0");
  if (!(unit.frequency > 0.0)) throw DomainError("node_geometry: frequency must be > 0");
  NodeGeometry geo;
  geo.spacing = node_spacing(env.sound_speed, unit.frequency);
  const double first = 0.5 * geo.spacing;
  if (!(unit.reflector_gap > first)) {
    throw DomainError("node_geometry: no trapping node fits (reflector gap " +
                      std::to_string(unit.reflector_gap) + " m <= lambda/4 = " +
                      std::to_string(first) + " m)");
  }
  for (std::size_t k = 0;; ++k) {
    const double offset = first + static_cast<double>(k) * geo.spacing;
    if (!(offset < unit.reflector_gap)) break;
    geo.node_offsets.push_back(offset);
  }
  return geo;
}

/// Deepest-column placement: the reflector depth that puts the outermost node
/// inside the gap exactly at the surface.
inline double surface_node_depth(const LevitatorUnit& unit, const Environment& env) {
  return node_geometry(unit, env).node_offsets.back();
}

inline double unit_peak_arp(const LevitatorUnit& unit, const Environment& env) {
  return arp_from_intensity(acoustic_intensity(unit.total_power(), unit.aperture_area),
                            env.sound_speed);
}

/// Effective beam radius of a circular aperture.
inline double radial_scale(const LevitatorUnit& unit) {
  return std::sqrt(unit.aperture_area / std::numbers::pi);
}

class TuneError : public std::runtime_error {
 public:
  TuneError(const std::string& what, double nearest_spacing)
      : std::runtime_error(what), nearest_spacing_(nearest_spacing) {}
  double nearest_spacing() const noexcept { return nearest_spacing_; }

 private:
  double nearest_spacing_;
};

struct TuneResult {
  LevitatorUnit unit;
  bool in_preferred_band = true;  // 40-60 kHz
};

/// Retunes a unit so its node spacing equals `target_spacing`.
inline TuneResult tune_frequency(const LevitatorUnit& unit, double target_spacing,
                                 const Environment& env) {
  if (!(target_spacing > 0.0)) throw DomainError("tune_frequency: target_spacing must be > 0");
  const double f = env.sound_speed / (2.0 * target_spacing);
  if (f < kMinFrequencyHz || f > kMaxFrequencyHz) {
    const double nearest_f = std::clamp(f, kMinFrequencyHz, kMaxFrequencyHz);
    const double nearest = node_spacing(env.sound_speed, nearest_f);
    throw TuneError("tune_frequency: spacing " + std::to_string(target_spacing) +
                        " m needs " + std::to_string(f) +
                        " Hz, outside [20000, 100000] Hz; nearest achievable spacing " +
                        std::to_string(nearest) + " m",
                    nearest);
  }
  TuneResult result{unit, f >= kPreferredMinFrequencyHz && f <= kPreferredMaxFrequencyHz};
  result.unit.frequency = f;
  return result;
}

/// Immutable superposition of unit fields. Each unit contributes
///   peak * cos^2(pi * phase) * exp(-(d_radial / radial_scale)^2)
/// where phase is the axial distance to the nearest node plane in units of the
/// node spacing, so maxima sit exactly on the nodes and zeros midway between
/// them. Outside the reflector gap a unit contributes nothing. Units combine by
/// max. Units farther than kCutoffScales beam radii are skipped (their
/// contribution is below 1e-27 of the peak).
class ArpField {
 public:
  static constexpr double kCutoffScales = 8.0;

  struct Dominant {
    int unit_index = -1;
    double arp = 0.0;
  };

  ArpField() = default;

  ArpField(std::vector<LevitatorUnit> units, const Environment& medium)
      : units_(std::move(units)), medium_(medium) {
    cache_.reserve(units_.size());
    for (const auto& u : units_) {
      UnitCache c;
      c.geometry = node_geometry(u, medium_);
      c.peak = unit_peak_arp(u, medium_);
      c.radial_scale = radial_scale(u);
      c.cutoff = kCutoffScales * c.radial_scale;
      cell_ = std::max(cell_, c.cutoff);
      cache_.push_back(std::move(c));
    }
    if (units_.size() > kBruteForceLimit) build_index();
  }

  const std::vector<LevitatorUnit>& units() const noexcept { return units_; }
  const Environment& medium() const noexcept { return medium_; }
  double peak_arp(std::size_t i) const { return cache_.at(i).peak; }
  double radial_scale_of(std::size_t i) const { return cache_.at(i).radial_scale; }
  const NodeGeometry& nodes(std::size_t i) const { return cache_.at(i).geometry; }

  double max_peak() const {
    double m = 0.0;
    for (const auto& c : cache_) m = std::max(m, c.peak);
    return m;
  }

  /// Point on unit i's axis at node k.
  Vec3 node_point(std::size_t i, std::size_t k) const {
    const auto& u = units_.at(i);
    return {u.position.x, u.position.y, u.depth_setpoint - cache_.at(i).geometry.node_offsets.at(k)};
  }

  double contribution(std::size_t i, Vec3 p) const {
    const auto& u = units_[i];
    const auto& c = cache_[i];
    const double from_reflector = u.depth_setpoint - p.z;
    if (from_reflector < 0.0 || from_reflector > u.reflector_gap) return 0.0;
    const double dr = distance(p.xy(), u.position);
    if (dr > c.cutoff) return 0.0;
    const double phase = from_reflector / c.geometry.spacing - 0.5;
    const double frac = phase - std::round(phase);
    const double axial = std::cos(std::numbers::pi * frac);
    const double q = dr / c.radial_scale;
    return c.peak * axial * axial * std::exp(-q * q);
  }

  Dominant dominant_at(Vec3 p) const {
    Dominant best;
    auto consider = [&](std::size_t i) {
      const double v = contribution(i, p);
      if (best.unit_index < 0 || v > best.arp ||
          (v == best.arp && static_cast<int>(i) < best.unit_index)) {
        best = {static_cast<int>(i), v};
      }
    };
    if (index_.empty()) {
      for (std::size_t i = 0; i < units_.size(); ++i) consider(i);
    } else {
      const auto [cx, cy] = cell_of(p.xy());
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          const auto it = index_.find(key(cx + dx, cy + dy));
          if (it == index_.end()) continue;
          for (std::size_t i : it->second) consider(i);
        }
      }
    }
    if (!(best.arp > 0.0)) best = {};
    return best;
  }

  double arp_at(Vec3 p) const { return dominant_at(p).arp; }

  /// Index of the node plane of unit i nearest to depth z.
  std::size_t nearest_node(std::size_t i, double z) const {
    const auto& c = cache_.at(i);
    const double from_reflector = units_[i].depth_setpoint - z;
    const double k = std::round((from_reflector - c.geometry.node_offsets.front()) /
                                c.geometry.spacing);
    const double last = static_cast<double>(c.geometry.node_offsets.size() - 1);
    return static_cast<std::size_t>(std::clamp(k, 0.0, last));
  }

 private:
  static constexpr std::size_t kBruteForceLimit = 16;

  struct UnitCache {
    NodeGeometry geometry;
    double peak = 0.0;
    double radial_scale = 0.0;
    double cutoff = 0.0;
  };

  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  std::pair<std::int64_t, std::int64_t> cell_of(Vec2 p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }

  void build_index() {
    for (std::size_t i = 0; i < units_.size(); ++i) {
      const auto [cx, cy] = cell_of(units_[i].position);
      index_[key(cx, cy)].push_back(i);
    }
  }

  std::vector<LevitatorUnit> units_;
  Environment medium_{};
  std::vector<UnitCache> cache_;
  double cell_ = 0.0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index_;
};

inline double arp_at(const ArpField& field, Vec3 point) { return field.arp_at(point); }

}  // namespace levichain
