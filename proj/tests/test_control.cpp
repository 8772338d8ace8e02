#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levichain/control.hpp"
#include "test_support.hpp"

namespace levichain {
namespace {

using testing::bench_env;
using testing::bench_oil;
using testing::bench_unit;

SensorModel noiseless() {
  SensorModel m;
  m.noise = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  return m;
}

TEST(SampleSensors, NoiselessReadingsEqualTruth) {
  const ArpField field({bench_unit(6.0)}, bench_env());
  const auto spill = seed_spill({5.0, 5.0}, 100, FixedRadius{}, bench_oil(), 1);
  std::mt19937_64 rng(1);
  const auto r = sample_sensors(spill, field, 0, noiseless(), rng);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r[0].kind, SensorKind::Pressure);
  EXPECT_EQ(r[0].value, field.arp_at(field.node_point(0, 0)));
  EXPECT_EQ(r[1].value, bench_env().temperature_c);
  EXPECT_EQ(r[2].value, field.peak_arp(0));
  EXPECT_EQ(r[2].aux, 40e3);
  // No droplets near the unit.
  EXPECT_EQ(r[4].kind, SensorKind::OilContent);
  EXPECT_EQ(r[4].value, 0.0);
  EXPECT_EQ(r[3].value, 8.0);
}

TEST(SampleSensors, OilContentLowersDissolvedOxygen) {
  const ArpField field({bench_unit()}, bench_env());
  auto spill = seed_spill({0.0, 0.0}, 100, FixedRadius{}, bench_oil(), 1);
  for (std::size_t i = 50; i < 100; ++i) spill.droplets[i].position = {9.0, 9.0, 0.0};
  std::mt19937_64 rng(1);
  const auto m = noiseless();
  const auto r = sample_sensors(spill, field, 0, m, rng);
  EXPECT_DOUBLE_EQ(r[4].value, 0.5);
  EXPECT_DOUBLE_EQ(r[3].value, m.do_baseline_mgl - m.do_slope_mgl * 0.5);
}

TEST(SampleSensors, NoisyMeanIsUnbiased) {
  const ArpField field({bench_unit(6.0)}, bench_env());
  const auto spill = seed_spill({5.0, 5.0}, 10, FixedRadius{}, bench_oil(), 1);
  SensorModel m;
  m.noise.pressure_pa = 0.2;
  std::mt19937_64 rng(77);
  const double truth = field.arp_at(field.node_point(0, 0));
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_sensors(spill, field, 0, m, rng)[0].value;
  EXPECT_NEAR(sum / n, truth, 3.0 * m.noise.pressure_pa / 100.0);
}

TEST(SampleSensors, DeterministicPerSeed) {
  const ArpField field({bench_unit(6.0)}, bench_env());
  const auto spill = seed_spill({0.0, 0.0}, 10, FixedRadius{}, bench_oil(), 1);
  std::mt19937_64 a(5), b(5), c(6);
  const SensorModel m;
  const auto ra = sample_sensors(spill, field, 0, m, a);
  EXPECT_EQ(ra, sample_sensors(spill, field, 0, m, b));
  const auto rc = sample_sensors(spill, field, 0, m, c);
  ASSERT_EQ(ra.size(), rc.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].kind, rc[i].kind);
    EXPECT_EQ(ra[i].timestamp, rc[i].timestamp);
    EXPECT_NE(ra[i].value, rc[i].value);
  }
}

SensorReading pressure(double v) { return {0, SensorKind::Pressure, v, 0.0, 0.0, 0.0}; }

TEST(ControlStep, ZeroErrorIsFixedPoint) {
  const ControllerState ctrl{0, 1.25, 0.5, 0.0, 32.0};
  const double required = 3.924;
  auto u = bench_unit(7.0);
  EXPECT_EQ(control_step(ctrl, pressure(1.25 * required), required, u).power_scale, 7.0);
}

TEST(ControlStep, BelowTargetIncreasesUntilBound) {
  const ControllerState ctrl{0, 1.25, 0.5, 0.0, 8.0};
  auto u = bench_unit(6.0);
  const auto v = control_step(ctrl, pressure(1.0), 3.924, u);
  EXPECT_GT(v.power_scale, 6.0);
  EXPECT_LE(v.power_scale, 8.0);
  EXPECT_EQ(control_step(ctrl, pressure(1e-3), 3.924, u).power_scale, 8.0);
  EXPECT_THROW(control_step(ctrl, {0, SensorKind::Temperature, 1.0, 0.0, 0.0, 0.0}, 3.9, u),
               DomainError);
}

TEST(ControlStep, StaysWithinBounds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double lo = 4.0 * u(rng);
    const ControllerState ctrl{0, 1.0 + u(rng), 0.05 + 2.0 * u(rng), lo, lo + 20.0 * u(rng)};
    auto unit = bench_unit(std::clamp(30.0 * u(rng), ctrl.min_power_scale, ctrl.max_power_scale));
    const auto out = control_step(ctrl, pressure(20.0 * u(rng)), 0.5 + 5.0 * u(rng), unit);
    EXPECT_GE(out.power_scale, ctrl.min_power_scale);
    EXPECT_LE(out.power_scale, ctrl.max_power_scale);
  }
}

// Scalar oracle: with measured = s * p0 the law reduces to
// s' = s + gain (target / p0 - s).
TEST(ControlStep, ClosedLoopConvergesLikeScalarIteration) {
  const auto env = bench_env();
  const double required = required_trapping_pressure(1e-3, bench_oil(), env);
  const ControllerState ctrl{0, 1.25, 0.5, 0.0, 32.0};
  const double target = ctrl.target_margin * required;
  const double p0 = unit_peak_arp(bench_unit(1.0), env);

  auto unit = bench_unit(0.5 * target / p0);
  double s = unit.power_scale;
  int steps_to_2pct = -1;
  double prev_err = std::abs(unit_peak_arp(unit, env) - target);
  for (int k = 1; k <= 50; ++k) {
    const ArpField field({unit}, env);
    unit = control_step(ctrl, pressure(field.arp_at(field.node_point(0, 0))), required, unit);
    s = s + ctrl.gain * (target / p0 - s);
    EXPECT_NEAR(unit.power_scale, s, 1e-9 * s);
    const double err = std::abs(unit_peak_arp(unit, env) - target);
    EXPECT_LT(err, prev_err + 1e-12);
    prev_err = err;
    if (steps_to_2pct < 0 && err <= 0.02 * target) steps_to_2pct = k;
  }
  ASSERT_GT(steps_to_2pct, 0);
  EXPECT_LE(steps_to_2pct, 50);
  EXPECT_EQ(steps_to_2pct, 5);  // 0.5 * 0.5^k <= 0.02 first at k = 5
}

TEST(ControlStep, MonotoneApproachForGainsInUnitInterval) {
  const double required = 3.924, p0 = 0.8163;
  for (double gain : {0.1, 0.3, 0.5, 0.9, 1.0}) {
    const ControllerState ctrl{0, 1.25, gain, 0.0, 100.0};
    for (double start : {0.2, 3.0, 30.0}) {
      auto unit = bench_unit(start);
      double err = std::abs(unit.power_scale * p0 - 1.25 * required);
      for (int k = 0; k < 30; ++k) {
        unit = control_step(ctrl, pressure(unit.power_scale * p0), required, unit);
        const double e = std::abs(unit.power_scale * p0 - 1.25 * required);
        EXPECT_LE(e, err + 1e-12);
        err = e;
      }
    }
  }
}

}  // namespace
}  // namespace levichain
