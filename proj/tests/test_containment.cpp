#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "levichain/bundled_scenarios.hpp"
#include "levichain/containment.hpp"
#include "levichain/scenario_io.hpp"
#include "test_support.hpp"

namespace levichain {
namespace {

using testing::bench_env;
using testing::bench_oil;
using testing::bench_unit;
using testing::small_scenario;

Droplet free_at(Vec3 p, double r) {
  Droplet d;
  d.position = p;
  d.radius = r;
  return d;
}

TEST(TrapCheck, ZeroFieldNeverTraps) {
  const ArpField field({bench_unit(0.0)}, bench_env());
  const auto d = trap_check(free_at({0.0, 0.0, 0.0}, 1e-5), field, bench_oil(), bench_env());
  EXPECT_EQ(d.state, DropletState::Free);
}

TEST(TrapCheck, DoubleRequiredAtNodeTraps) {
  const double r = 1e-3;
  const double required = required_trapping_pressure(r, bench_oil(), bench_env());
  const double scale = 2.0 * required / unit_peak_arp(bench_unit(1.0), bench_env());
  const ArpField field({bench_unit(scale)}, bench_env());
  const auto d = trap_check(free_at({0.0, 0.0, 0.0}, r), field, bench_oil(), bench_env());
  EXPECT_EQ(d.state, DropletState::Trapped);
  EXPECT_EQ(d.trap_unit, 0);
  EXPECT_EQ(static_cast<std::size_t>(d.trap_node), field.nodes(0).node_offsets.size() - 1);
}

TEST(TrapCheck, BasePowerCannotHoldMillimetreDroplet) {
  // 0.816 Pa available against 3.924 Pa required.
  const ArpField field({bench_unit(1.0)}, bench_env());
  const auto d = trap_check(free_at({0.0, 0.0, 0.0}, 1e-3), field, bench_oil(), bench_env());
  EXPECT_EQ(d.state, DropletState::Free);
}

TEST(TrapCheck, SnapsOntoNodePlaneWithinBeamRadius) {
  const ArpField field({bench_unit(24.0)}, bench_env());
  const double rs = field.radial_scale_of(0);
  const double spacing = field.nodes(0).spacing;
  // Slightly below the surface node and outside the beam radius.
  const auto d = trap_check(free_at({1.3 * rs, 0.0, 0.3 * spacing}, 2e-4), field, bench_oil(),
                            bench_env());
  ASSERT_EQ(d.state, DropletState::Trapped);
  EXPECT_NEAR(d.position.z, field.node_point(0, d.trap_node).z, 1e-15);
  EXPECT_NEAR(d.position.x, rs, 1e-12);
  EXPECT_EQ(d.position.y, 0.0);
}

TEST(TrapCheck, CaptureDistanceLimitsNodeBasin) {
  const ArpField field({bench_unit(24.0)}, bench_env());
  const double spacing = field.nodes(0).spacing;
  const Vec3 p{0.0, 0.0, 0.2 * spacing};
  EXPECT_EQ(trap_check(free_at(p, 2e-4), field, bench_oil(), bench_env(), 0.1 * spacing).state,
            DropletState::Free);
  EXPECT_EQ(trap_check(free_at(p, 2e-4), field, bench_oil(), bench_env(), 0.25 * spacing).state,
            DropletState::Trapped);
}

TEST(TrapCheck, ReleasedWhenPowerDrops) {
  const ArpField strong({bench_unit(24.0)}, bench_env());
  const ArpField weak({bench_unit(1.0)}, bench_env());
  auto d = trap_check(free_at({0.05, 0.0, 0.0}, 1e-3), strong, bench_oil(), bench_env());
  ASSERT_EQ(d.state, DropletState::Trapped);
  EXPECT_EQ(trap_check(d, strong, bench_oil(), bench_env()), d);
  d = trap_check(d, weak, bench_oil(), bench_env());
  EXPECT_EQ(d.state, DropletState::Free);
  EXPECT_EQ(d.position.z, 0.0);
  EXPECT_EQ(d.trap_unit, -1);
}

TEST(TrapCheck, EscapedIsAbsorbing) {
  const ArpField field({bench_unit(24.0)}, bench_env());
  auto d = free_at({0.0, 0.0, 0.0}, 1e-4);
  d.state = DropletState::Escaped;
  EXPECT_EQ(trap_check(d, field, bench_oil(), bench_env()), d);
}

// Independent oracle: re-derive both sides of the threshold from the raw
// formulas for droplets on the surface node plane.
TEST(TrapCheck, ThresholdSharpnessAgainstBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto env = bench_env();
  const auto oil = bench_oil();
  int trapped = 0, free = 0;
  for (int i = 0; i < 5000; ++i) {
    const double scale = 30.0 * u(rng);
    const ArpField field({bench_unit(scale)}, env);
    const double r = std::pow(10.0, -4.5 + 2.0 * u(rng));
    const double x = 0.6 * u(rng) - 0.3, y = 0.6 * u(rng) - 0.3;

    const double peak = 2.0 * (scale * 14.0 * 1.0 / 0.1) / 343.0;
    const double rs = std::sqrt(0.1 / std::numbers::pi);
    const double local = peak * std::exp(-(x * x + y * y) / (rs * rs));
    const double volume = 4.0 / 3.0 * std::numbers::pi * r * r * r;
    const double need = volume * 9.81 * (1000.0 - 700.0) / (std::numbers::pi * r * r);
    if (std::abs(local - need) < 1e-9 * need) continue;

    const auto d = trap_check(free_at({x, y, 0.0}, r), field, oil, env);
    EXPECT_EQ(d.state == DropletState::Trapped, local >= need) << "i=" << i;
    (local >= need ? trapped : free)++;
  }
  EXPECT_GT(trapped, 100);
  EXPECT_GT(free, 100);
}

TEST(Run, ZeroDurationGivesSingleInitialSample) {
  auto s = small_scenario();
  s.duration = 0.0;
  const auto r = run(s, 1);
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].free, s.spill.count);
  EXPECT_EQ(r.series[0].free_fraction, 1.0);
}

TEST(Run, NonePresetTrapsNothing) {
  auto s = small_scenario();
  s.pressure_level = PressureLevel::None;
  s.spill.origin = {0.0, 0.0};
  const auto r = run(s, 3);
  for (const auto& sample : r.series) EXPECT_EQ(sample.trapped, 0u);
}

TEST(Run, MassBalanceAndMonotoneEscape) {
  auto s = small_scenario(800);
  s.pressure_level = PressureLevel::Medium;
  s.spill.params.diffusion = 1e-4;
  const auto r = run(s, 9);
  ASSERT_EQ(r.series.size(), step_count(s) + 1);
  double prev_escaped = 0.0;
  for (const auto& x : r.series) {
    EXPECT_EQ(x.trapped + x.escaped + x.free, s.spill.count);
    EXPECT_NEAR(x.trapped_fraction + x.escaped_fraction + x.free_fraction, 1.0, 1e-12);
    EXPECT_GE(x.escaped_fraction, prev_escaped);
    prev_escaped = x.escaped_fraction;
  }
  EXPECT_GT(r.final_sample().trapped, 0u);
  EXPECT_GT(r.final_sample().escaped, 0u);
  EXPECT_EQ(r.unit_trap_counts.at(0), r.final_sample().trapped);
}

TEST(Run, DeterministicPerSeed) {
  auto s = small_scenario(400);
  s.pressure_level = PressureLevel::Low;
  s.control.enabled = true;
  s.control.cadence_steps = 5;
  const auto a = run(s, 12);
  const auto b = run(s, 12);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.telemetry.empty());
  const auto c = run(s, 13);
  EXPECT_NE(a.series, c.series);
}

TEST(Run, MonotoneInPowerAcrossSeeds) {
  const std::vector<double> scales{0.0, 3.0, 6.0, 12.0, 24.0};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double prev = -1.0;
    for (double scale : scales) {
      auto s = small_scenario(400);
      s.units[0].power_scale = scale;
      const double f = run(s, seed).final_sample().trapped_fraction;
      EXPECT_GE(f, prev) << "seed " << seed << " scale " << scale;
      if (scale == 0.0) {
        EXPECT_EQ(f, 0.0);
      }
      prev = f;
    }
  }
}

TEST(Run, ControllerHoldsMargin) {
  auto s = small_scenario(200);
  s.units[0].power_scale = 2.0;
  s.control.enabled = true;
  s.control.cadence_steps = 1;
  s.control.sensors.noise = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  s.duration = 200.0;
  const auto r = run(s, 1);
  const double required = required_trapping_pressure(1e-3, bench_oil(), bench_env());
  const double p0 = unit_peak_arp(bench_unit(1.0), bench_env());
  EXPECT_NEAR(r.final_power_scales.at(0) * p0, 1.25 * required, 1e-6 * required);
  EXPECT_EQ(r.telemetry.size(), 5u * step_count(s));
}

TEST(Run, InvalidScenarioListsAllViolations) {
  auto s = small_scenario();
  s.dt = 0.0;
  s.domain = {1.0, 1.0, 0.0, 1.0};
  s.oil.density = 1200.0;
  try {
    run(s, 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::vector<std::string> paths;
    for (const auto& v : e.violations()) paths.push_back(v.path);
    EXPECT_NE(std::find(paths.begin(), paths.end(), "/sim/dt_s"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "/sim/domain_m"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "/oil/density_kgm3"), paths.end());
  }
}

TEST(ReplicatePoc, ChainedTrialStructure) {
  auto s = parse_scenario(bundled::poc_bench_json);
  s.spill.count = 3000;
  const auto trials = replicate_poc(s, 1);
  ASSERT_EQ(trials.size(), 4u);
  EXPECT_EQ(trials[0].level, PressureLevel::None);
  EXPECT_EQ(trials[0].initial_trapped_pct, 0.0);
  EXPECT_EQ(trials[0].final_trapped_pct, 0.0);
  EXPECT_EQ(trials[1].initial_trapped_pct, 0.0);
  const double minutes[] = {30.0, 20.0, 10.0, 10.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(trials[i].duration_min, minutes[i]);
    if (i > 0) {
      EXPECT_EQ(trials[i].initial_trapped_pct, trials[i - 1].final_trapped_pct);
      EXPECT_GT(trials[i].final_trapped_pct, trials[i - 1].final_trapped_pct);
    }
    EXPECT_GE(trials[i].final_trapped_pct, trials[i].initial_trapped_pct);
  }
}

}  // namespace
}  // namespace levichain
