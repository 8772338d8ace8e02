#pragma once

// Run artifacts. CSV files follow RFC 4180 (CRLF line ends, header row first,
// fields quoted only when needed). Numbers use the shortest round-trip form.
//
//   timeseries.csv  step,time_s,trapped_fraction,escaped_fraction,free_fraction,trapped,escaped,free
//   telemetry.csv   time_s,unit_id,kind,value,aux,noise_sigma,power_scale
//   trials.csv      trial,pressure_level,initial_trapped_pct,final_trapped_pct,duration_min

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "levichain/containment.hpp"
#include "levichain/planner.hpp"
#include "levichain/scenario_io.hpp"

namespace levichain {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view s) {
    sep();
    const bool quote = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) {
      out_ << s;
      return *this;
    }
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
    return *this;
  }
  CsvWriter& field(double v) { return field(std::string_view(format_number(v))); }
  CsvWriter& field(std::size_t v) { return field(std::string_view(std::to_string(v))); }
  CsvWriter& field(int v) { return field(std::string_view(std::to_string(v))); }

  void end_row() {
    out_ << "\r\n";
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  bool first_ = true;
};

inline void write_timeseries_csv(std::ostream& out, const SimReport& r) {
  CsvWriter w(out);
  for (auto h : {"step", "time_s", "trapped_fraction", "escaped_fraction", "free_fraction",
                 "trapped", "escaped", "free"})
    w.field(std::string_view(h));
  w.end_row();
  for (const auto& s : r.series) {
    w.field(s.step).field(s.time).field(s.trapped_fraction).field(s.escaped_fraction);
    w.field(s.free_fraction).field(s.trapped).field(s.escaped).field(s.free);
    w.end_row();
  }
}

inline void write_telemetry_csv(std::ostream& out, const SimReport& r) {
  CsvWriter w(out);
  for (auto h : {"time_s", "unit_id", "kind", "value", "aux", "noise_sigma", "power_scale"})
    w.field(std::string_view(h));
  w.end_row();
  for (const auto& row : r.telemetry) {
    const auto& rd = row.reading;
    w.field(rd.timestamp).field(rd.unit_id).field(to_string(rd.kind)).field(rd.value);
    w.field(rd.aux).field(rd.noise_sigma).field(row.power_scale);
    w.end_row();
  }
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
  CsvWriter w(out);
  for (auto h : {"trial", "pressure_level", "initial_trapped_pct", "final_trapped_pct",
                 "duration_min"})
    w.field(std::string_view(h));
  w.end_row();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    w.field(i + 1).field(to_string(t.level)).field(t.initial_trapped_pct);
    w.field(t.final_trapped_pct).field(t.duration_min);
    w.end_row();
  }
}

inline ordered_json report_to_json(const SimReport& r) {
  const auto& f = r.final_sample();
  ordered_json j;
  j["seed"] = r.seed;
  j["scenario_digest"] = r.scenario_digest;
  j["droplet_count"] = r.droplet_count;
  j["steps"] = f.step;
  j["final"] = {{"time_s", f.time},
                {"trapped", f.trapped},
                {"escaped", f.escaped},
                {"free", f.free},
                {"trapped_fraction", f.trapped_fraction},
                {"escaped_fraction", f.escaped_fraction},
                {"free_fraction", f.free_fraction}};
  j["units"] = ordered_json::array();
  for (std::size_t i = 0; i < r.unit_ids.size(); ++i)
    j["units"].push_back({{"id", r.unit_ids[i]},
                          {"trapped", r.unit_trap_counts[i]},
                          {"power_scale", r.final_power_scales[i]}});
  j["telemetry_rows"] = r.telemetry.size();
  return j;
}

inline ordered_json trials_to_json(const std::vector<TrialRecord>& trials, std::uint64_t seed,
                                   const std::string& digest) {
  ordered_json j;
  j["seed"] = seed;
  j["scenario_digest"] = digest;
  j["trials"] = ordered_json::array();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    j["trials"].push_back({{"trial", i + 1},
                           {"pressure_level", to_string(t.level)},
                           {"initial_trapped_pct", t.initial_trapped_pct},
                           {"final_trapped_pct", t.final_trapped_pct},
                           {"duration_min", t.duration_min}});
  }
  return j;
}

inline ordered_json plan_to_json(const PlanResult& r) {
  ordered_json j;
  j["forecast"] = {{"centroid_m", {r.forecast.centroid.x, r.forecast.centroid.y}},
                   {"radius_p90_m", r.forecast.radius_p90}};
  ordered_json verts = ordered_json::array();
  for (const auto& v : r.barrier.vertices) verts.push_back({v.x, v.y});
  j["barrier"] = {{"closed", r.barrier.closed},
                  {"length_m", r.barrier.length()},
                  {"vertices_m", verts}};
  j["capture_radius_m"] = r.plan.capture_radius;
  j["spacing_m"] = r.plan.spacing;
  j["actual_spacing_m"] = r.plan.actual_spacing;
  j["coverage"] = r.plan.coverage;
  j["unit_count"] = r.plan.units.size();
  j["levitators"] = ordered_json::array();
  for (const auto& u : r.plan.units) j["levitators"].push_back(levitator_to_json(u));
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// report.json, timeseries.csv, telemetry.csv and scenario.resolved.json.
inline void write_run_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                                const SimReport& r) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "scenario.resolved.json", emit_scenario(scenario));
  write_text_file(dir / "report.json", report_to_json(r).dump(2) + "\n");
  std::ostringstream ts, tel;
  write_timeseries_csv(ts, r);
  write_telemetry_csv(tel, r);
  write_text_file(dir / "timeseries.csv", ts.str());
  write_text_file(dir / "telemetry.csv", tel.str());
}

}  // namespace levichain
