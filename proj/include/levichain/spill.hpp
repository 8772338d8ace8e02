#pragma once

// Lagrangian droplet spill: seeding, wind drift, diffusion, and a closed-form
// drift/spread forecast.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "levichain/errors.hpp"
#include "levichain/geometry.hpp"
#include "levichain/physics.hpp"

namespace levichain {

enum class DropletState : std::uint8_t { Free, Trapped, Escaped };

struct Droplet {
  std::uint32_t id = 0;
  Vec3 position{};
  double radius = 0.0;
  DropletState state = DropletState::Free;
  int trap_unit = -1;  // index into the scenario's unit list while Trapped
  int trap_node = -1;

  friend bool operator==(const Droplet&, const Droplet&) = default;
};

struct FixedRadius {
  double radius = 1e-3;
  friend bool operator==(const FixedRadius&, const FixedRadius&) = default;
};

struct LogNormalRadius {
  double median = 1e-3;
  double sigma = 0.5;
  friend bool operator==(const LogNormalRadius&, const LogNormalRadius&) = default;
};

using RadiusSpec = std::variant<FixedRadius, LogNormalRadius>;

struct SpillParams {
  double wind_drift_factor = 0.03;  // fraction of wind speed
  double diffusion = 0.01;          // D0, m^2/s
  friend bool operator==(const SpillParams&, const SpillParams&) = default;
};

struct SpillState {
  std::vector<Droplet> droplets;
  OilType oil;
  SpillParams params;
  double time = 0.0;
  Vec2 origin{};
  std::uint64_t rng_seed = 0;
  double effective_rate = 0.0;
  std::mt19937_64 rng;

  /// D = D0 (1 + rate t).
  double diffusion_now() const { return params.diffusion * (1.0 + effective_rate * time); }
};

inline SpillState seed_spill(Vec2 origin, std::size_t count, const RadiusSpec& radius_spec,
                             const OilType& oil, std::uint64_t seed, SpillParams params = {}) {
  if (count == 0) throw DomainError("seed_spill: count must be >= 1");
  if (!(params.wind_drift_factor >= 0.0) || !(params.diffusion >= 0.0))
    throw DomainError("seed_spill: drift factor and diffusion must be >= 0");
  SpillState s;
  s.oil = oil;
  s.params = params;
  s.origin = origin;
  s.rng_seed = seed;
  s.rng.seed(seed);
  s.droplets.resize(count);

  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, FixedRadius>) {
          if (!(spec.radius > 0.0)) throw DomainError("seed_spill: radius must be > 0");
          for (auto& d : s.droplets) d.radius = spec.radius;
        } else {
          if (!(spec.median > 0.0) || !(spec.sigma > 0.0))
            throw DomainError("seed_spill: lognormal median and sigma must be > 0");
          std::lognormal_distribution<double> dist(std::log(spec.median), spec.sigma);
          for (auto& d : s.droplets) d.radius = dist(s.rng);
        }
      },
      radius_spec);

  for (std::size_t i = 0; i < count; ++i) {
    auto& d = s.droplets[i];
    d.id = static_cast<std::uint32_t>(i);
    d.position = {origin.x, origin.y, 0.0};
  }
  return s;
}

/// Advances Free droplets by wind drift plus isotropic diffusion. Every droplet
/// consumes two normal draws in id order whatever its state, so runs that
/// differ only in which droplets are trapped see identical noise for the rest.
inline void step(SpillState& spill, const Environment& env, double wind_dir, double dt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be > 0");
  spill.effective_rate = oil_spill_rate_effective(env, spill.oil);
  const double sigma = std::sqrt(2.0 * spill.diffusion_now() * dt);
  const double drift = spill.params.wind_drift_factor * env.wind_speed * dt;
  const Vec2 dir = direction(wind_dir);
  const double dx = drift * dir.x;
  const double dy = drift * dir.y;

  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& d : spill.droplets) {
    const double nx = normal(spill.rng);
    const double ny = normal(spill.rng);
    if (d.state != DropletState::Free) continue;
    d.position.x += dx + sigma * nx;
    d.position.y += dy + sigma * ny;
  }
  spill.time += dt;
}

struct SpillCounts {
  std::size_t free = 0;
  std::size_t trapped = 0;
  std::size_t escaped = 0;
};

inline SpillCounts count_states(const SpillState& spill) {
  SpillCounts c;
  for (const auto& d : spill.droplets) {
    switch (d.state) {
      case DropletState::Free: ++c.free; break;
      case DropletState::Trapped: ++c.trapped; break;
      case DropletState::Escaped: ++c.escaped; break;
    }
  }
  return c;
}

/// Centroid of the Free slick; falls back to all non-escaped droplets, then to
/// the spill origin.
inline Vec2 slick_centroid(const SpillState& spill) {
  for (const auto wanted : {DropletState::Free, DropletState::Trapped}) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const auto& d : spill.droplets) {
      if (d.state == DropletState::Escaped) continue;
      if (wanted == DropletState::Free && d.state != DropletState::Free) continue;
      sx += d.position.x;
      sy += d.position.y;
      ++n;
    }
    if (n > 0) return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
  }
  return spill.origin;
}

/// Nearest-rank 90th percentile of Free droplet distances from `center`.
inline double radius_p90(const SpillState& spill, Vec2 center) {
  std::vector<double> r;
  r.reserve(spill.droplets.size());
  for (const auto& d : spill.droplets)
    if (d.state == DropletState::Free) r.push_back(distance(d.position.xy(), center));
  if (r.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(r.size()))) - 1;
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(rank), r.end());
  return r[rank];
}

struct DriftForecast {
  Vec2 centroid{};
  double radius_p90 = 0.0;
};

/// 1.517 ~ sqrt(ln 10): the p90 radius of a 2-D Gaussian with variance 2 D t per
/// axis is 1.517 sqrt(4 D t).
inline constexpr double kP90SpreadFactor = 1.517;

inline DriftForecast forecast_drift(const SpillState& spill, const Environment& env,
                                    double wind_dir, double horizon) {
  if (!(horizon >= 0.0)) throw DomainError("forecast_drift: horizon must be >= 0");
  const Vec2 c = slick_centroid(spill);
  const double drift = spill.params.wind_drift_factor * env.wind_speed * horizon;
  const Vec2 dir = direction(wind_dir);
  const double rate = oil_spill_rate_effective(env, spill.oil);
  const double d_now = spill.params.diffusion * (1.0 + rate * spill.time);
  DriftForecast f;
  f.centroid = {c.x + drift * dir.x, c.y + drift * dir.y};
  f.radius_p90 = radius_p90(spill, c) + std::sqrt(4.0 * d_now * horizon) * kP90SpreadFactor;
  return f;
}

}  // namespace levichain
