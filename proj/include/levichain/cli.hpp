#pragma once

// The `levichain` command line. Exit codes: 0 success, 1 usage or validation
// error, 2 runtime error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "levichain/bundled_scenarios.hpp"
#include "levichain/containment.hpp"
#include "levichain/physics.hpp"
#include "levichain/planner.hpp"
#include "levichain/report.hpp"
#include "levichain/scenario_io.hpp"

namespace levichain {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

inline std::string default_out_dir() {
  if (const char* env = std::getenv("LEVICHAIN_OUT"); env != nullptr && *env != '\0') return env;
  return "levichain_out";
}

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

/// Parses "seeds=a..b" (inclusive).
inline std::optional<SeedRange> parse_sweep(const std::string& spec) {
  static const std::regex re(R"(^seeds=(\d+)\.\.(\d+)$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) return std::nullopt;
  SeedRange r{std::stoull(m[1].str()), std::stoull(m[2].str())};
  if (r.last < r.first) return std::nullopt;
  return r;
}

namespace detail {

inline std::string fmt6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct PhysicsArgs {
  double radius = 1e-3;
  double oil_density = 700.0;
  double water_density = 1000.0;
  double viscosity = 0.05;
  double wind_speed = 0.0;
  double spreading_constant = 1.0;
  int transducers = 14;
  double power_per_transducer = 1.0;
  double area = 0.1;
  double sound_speed = 343.0;
  double gravity = 9.81;
};

inline int cmd_physics(const PhysicsArgs& a, std::ostream& out) {
  const OilType oil{"oil", a.oil_density, a.viscosity};
  Environment env;
  env.wind_speed = a.wind_speed;
  env.water_density = a.water_density;
  env.sound_speed = a.sound_speed;
  env.gravity = a.gravity;
  env.spreading_constant = a.spreading_constant;
  if (auto v = validate(oil); !v.empty()) throw ValidationError(std::move(v));
  if (auto v = validate(env); !v.empty()) throw ValidationError(std::move(v));

  const double total = static_cast<double>(a.transducers) * a.power_per_transducer;
  const double intensity = acoustic_intensity(total, a.area);
  const double arp = arp_from_intensity(intensity, a.sound_speed);
  const double arf = buoyant_arf(a.radius, oil, env);
  const double required = required_trapping_pressure(a.radius, oil, env);
  out << "total_power_w: " << fmt6(total) << "\n";
  out << "intensity_wm2: " << fmt6(intensity) << "\n";
  out << "arp_pa: " << fmt6(arp) << "\n";
  out << "arf_n: " << fmt6(arf) << "\n";
  out << "required_arp_pa: " << fmt6(required) << "\n";
  out << "trap_margin: " << fmt6(arp / required) << "\n";
  out << "oil_spill_rate_raw: " << fmt6(oil_spill_rate_raw(env, oil)) << "\n";
  out << "oil_spill_rate_effective: " << fmt6(oil_spill_rate_effective(env, oil)) << "\n";
  out << "# rounded hand-calculation values for the 14 x 1 W, 0.1 m^2, c = 343 m/s, r = 1 mm\n"
         "# case are arp 0.815 Pa, arf 1.23e-05 N and required 3.91 Pa; the required value\n"
         "# differs by ~0.4% because the hand calculation rounds arf before dividing.\n";
  return kExitOk;
}

inline Scenario load_bundled_or(const std::string& path) {
  if (!path.empty()) return load_scenario(path);
  return parse_scenario(bundled::poc_bench_json);
}

inline SimReport run_one(const Scenario& base, std::uint64_t seed,
                         const std::filesystem::path& dir) {
  const Scenario scenario = resolve_planner(base, seed);
  auto report = run(scenario, seed);
  write_run_artifacts(dir, scenario, report);
  return report;
}

inline int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                        const std::string& sweep, const std::filesystem::path& out_dir,
                        std::ostream& out, std::ostream& err) {
  const Scenario scenario = load_scenario(scenario_path);
  if (!sweep.empty()) {
    const auto range = parse_sweep(sweep);
    if (!range) {
      err << "invalid --sweep value '" << sweep << "' (expected seeds=a..b)\n";
      return kExitValidation;
    }
    std::vector<std::uint64_t> seeds;
    for (auto s = range->first; s <= range->last; ++s) seeds.push_back(s);
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::string failure;
    auto worker = [&] {
      for (std::size_t i = next++; i < seeds.size(); i = next++) {
        try {
          run_one(scenario, seeds[i], out_dir / ("seed_" + std::to_string(seeds[i])));
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          if (failure.empty()) failure = e.what();
        }
      }
    };
    const auto n_threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, seeds.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (!failure.empty()) throw std::runtime_error(failure);
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "scenario.resolved.json", emit_scenario(scenario));
    out << "simulated seeds " << range->first << ".." << range->last << " -> " << out_dir.string() << "\n";
    return kExitOk;
  }
  if (!seed) {
    err << "simulate: --seed is required (or --sweep seeds=a..b)\n";
    return kExitValidation;
  }
  const auto report = run_one(scenario, *seed, out_dir);
  const auto& f = report.final_sample();
  out << "seed " << *seed << ": t=" << fmt6(f.time) << " s trapped=" << fmt6(f.trapped_fraction)
      << " escaped=" << fmt6(f.escaped_fraction) << " free=" << fmt6(f.free_fraction) << " -> "
      << out_dir.string() << "\n";
  return kExitOk;
}

inline int cmd_plan(const std::string& scenario_path, std::uint64_t seed,
                    const std::filesystem::path& out_dir, std::ostream& out) {
  const Scenario scenario = load_scenario(scenario_path);
  const auto result = plan_for_scenario(scenario, seed);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "scenario.resolved.json", emit_scenario(scenario));
  write_text_file(out_dir / "plan.json", plan_to_json(result).dump(2) + "\n");
  write_text_file(out_dir / "scenario.planned.json", emit_scenario(with_plan(scenario, result.plan)));
  out << "planned " << result.plan.units.size() << " units, capture radius "
      << fmt6(result.plan.capture_radius) << " m, coverage " << fmt6(result.plan.coverage)
      << " -> " << out_dir.string() << "\n";
  return kExitOk;
}

inline int cmd_poc(const std::string& scenario_path, std::uint64_t seed,
                   const std::filesystem::path& out_dir, std::ostream& out) {
  const Scenario scenario = load_bundled_or(scenario_path);
  const auto trials = replicate_poc(scenario, seed);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "scenario.resolved.json", emit_scenario(scenario));
  write_text_file(out_dir / "trials.json",
                  trials_to_json(trials, seed, scenario_digest(scenario)).dump(2) + "\n");
  std::ostringstream csv;
  write_trials_csv(csv, trials);
  write_text_file(out_dir / "trials.csv", csv.str());
  out << "trial  level    initial_%  final_%  minutes\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "%-6zu %-8s %9.3f %8.3f %8.0f\n", i + 1,
                  std::string(to_string(trials[i].level)).c_str(), trials[i].initial_trapped_pct,
                  trials[i].final_trapped_pct, trials[i].duration_min);
    out << line;
  }
  return kExitOk;
}

inline nlohmann::ordered_json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return nlohmann::ordered_json::parse(in);
}

inline int cmd_report(const std::filesystem::path& dir, const std::string& format,
                      std::ostream& out) {
  if (std::filesystem::exists(dir / "trials.json")) {
    const auto j = read_json_file(dir / "trials.json");
    if (format == "json") {
      out << j.dump(2) << "\n";
      return kExitOk;
    }
    CsvWriter w(out);
    for (auto h : {"trial", "pressure_level", "initial_trapped_pct", "final_trapped_pct", "duration_min"})
      w.field(std::string_view(h));
    w.end_row();
    for (const auto& t : j.at("trials")) {
      w.field(t.at("trial").get<std::size_t>()).field(t.at("pressure_level").get<std::string>());
      w.field(t.at("initial_trapped_pct").get<double>()).field(t.at("final_trapped_pct").get<double>());
      w.field(t.at("duration_min").get<double>());
      w.end_row();
    }
    return kExitOk;
  }
  const auto j = read_json_file(dir / "report.json");
  if (format == "json") {
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  const auto& f = j.at("final");
  CsvWriter w(out);
  for (auto h : {"seed", "scenario_digest", "droplet_count", "steps", "time_s", "trapped_fraction",
                 "escaped_fraction", "free_fraction"})
    w.field(std::string_view(h));
  w.end_row();
  w.field(std::to_string(j.at("seed").get<std::uint64_t>()))
      .field(j.at("scenario_digest").get<std::string>())
      .field(j.at("droplet_count").get<std::size_t>())
      .field(j.at("steps").get<std::size_t>())
      .field(f.at("time_s").get<double>())
      .field(f.at("trapped_fraction").get<double>())
      .field(f.at("escaped_fraction").get<double>())
      .field(f.at("free_fraction").get<double>());
  w.end_row();
  return kExitOk;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"levichain: acoustic-levitation spill containment simulator and planner"};
  app.require_subcommand(1);

  detail::PhysicsArgs phys;
  auto* physics = app.add_subcommand("physics", "Print spill-rate, radiation pressure and trapping threshold values");
  physics->add_option("--radius-m", phys.radius, "Droplet radius (m)")->capture_default_str();
  physics->add_option("--oil-density", phys.oil_density, "Oil density (kg/m^3)")->capture_default_str();
  physics->add_option("--water-density", phys.water_density, "Water density (kg/m^3)")->capture_default_str();
  physics->add_option("--viscosity", phys.viscosity, "Oil viscosity (Pa s)")->capture_default_str();
  physics->add_option("--wind-speed", phys.wind_speed, "Wind speed (m/s)")->capture_default_str();
  physics->add_option("--spreading-constant", phys.spreading_constant, "Spreading constant")->capture_default_str();
  physics->add_option("--transducers", phys.transducers, "Number of transducers")->capture_default_str();
  physics->add_option("--power-per-transducer", phys.power_per_transducer, "Power per transducer (W)")->capture_default_str();
  physics->add_option("--area", phys.area, "Focus area (m^2)")->capture_default_str();
  physics->add_option("--sound-speed", phys.sound_speed, "Speed of sound (m/s)")->capture_default_str();
  physics->add_option("--gravity", phys.gravity, "Gravity (m/s^2)")->capture_default_str();

  std::string scenario_path, sweep, out_dir, in_dir, format = "json";
  std::optional<std::uint64_t> seed;
  std::uint64_t plan_seed = 0, poc_seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write run artifacts");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--out", out_dir, "Output directory (default $LEVICHAIN_OUT or levichain_out)");
  simulate->add_option("--sweep", sweep, "Seed sweep, e.g. seeds=1..10 (one subdirectory per seed)");

  auto* plan = app.add_subcommand("plan", "Place a levitator chain around the forecast spill");
  plan->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  plan->add_option("--seed", plan_seed, "RNG seed for the seeded spill")->capture_default_str();
  plan->add_option("--out", out_dir, "Output directory");

  auto* poc = app.add_subcommand("poc", "Run the four chained pressure-level trials on the bench scenario");
  poc->add_option("--seed", poc_seed, "RNG seed")->required();
  poc->add_option("--out", out_dir, "Output directory");
  poc->add_option("--scenario", scenario_path, "Override the bundled bench scenario");

  auto* report = app.add_subcommand("report", "Summarise a run directory");
  report->add_option("--in", in_dir, "Run directory")->required();
  report->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  const std::filesystem::path out_path = out_dir.empty() ? default_out_dir() : out_dir;
  try {
    if (*physics) return detail::cmd_physics(phys, out);
    if (*simulate) return detail::cmd_simulate(scenario_path, seed, sweep, out_path, out, err);
    if (*plan) return detail::cmd_plan(scenario_path, plan_seed, out_path, out);
    if (*poc) return detail::cmd_poc(scenario_path, poc_seed, out_path, out);
    if (*report) return detail::cmd_report(in_dir, format, out);
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace levichain
