#pragma once

// Scenario files: JSON parsing with full-violation reporting, default
// resolution, and canonical emission.
//
// Defaults by `environment.medium`:
//
//   medium       sound_speed_mps   water_density_kgm3
//   seawater     1480              1025
//   freshwater   1480              1000
//   bench        343               1000
//
// Other defaults: gravity 9.81, spreading_constant 1, wind 0 m/s toward 0 rad,
// temperature 20 C. Levitators default to the 14 x 1 W, 0.1 m^2, 40 kHz bench
// unit with a 0.05 m reflector gap and a depth setpoint that puts a node at the
// surface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "levichain/errors.hpp"
#include "levichain/scenario.hpp"

namespace levichain {

using ordered_json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct MediumDefaults {
  double sound_speed;
  double water_density;
};

inline std::optional<MediumDefaults> medium_defaults(std::string_view medium) {
  if (medium == "seawater") return MediumDefaults{1480.0, 1025.0};
  if (medium == "freshwater") return MediumDefaults{1480.0, 1000.0};
  if (medium == "bench") return MediumDefaults{343.0, 1000.0};
  return std::nullopt;
}

namespace detail {

/// Reads one JSON object, remembering which keys were consumed so that the
/// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json* j, std::string path, std::vector<Violation>& out)
      : j_(j), path_(std::move(path)), out_(out) {
    if (j_ != nullptr && !j_->is_object()) {
      out_.push_back({path_, "must be an object"});
      j_ = nullptr;
    }
  }

  const std::string& path() const { return path_; }
  std::string child(std::string_view key) const { return path_ + "/" + std::string(key); }

  const nlohmann::json* find(std::string_view key, bool required) {
    seen_.insert(std::string(key));
    if (j_ == nullptr) {
      return nullptr;
    }
    const auto it = j_->find(key);
    if (it == j_->end()) {
      if (required) out_.push_back({child(key), "required key is missing"});
      return nullptr;
    }
    return &*it;
  }

  void number(std::string_view key, double& target, bool required = false) {
    if (const auto* v = find(key, required)) {
      if (v->is_number()) target = v->get<double>();
      else out_.push_back({child(key), "must be a number"});
    }
  }

  template <class Int>
  void integer(std::string_view key, Int& target, bool required = false) {
    if (const auto* v = find(key, required)) {
      if (v->is_number_integer()) {
        const auto raw = v->get<std::int64_t>();
        if (raw < 0 && std::is_unsigned_v<Int>) out_.push_back({child(key), "must be >= 0"});
        else target = static_cast<Int>(raw);
      } else {
        out_.push_back({child(key), "must be an integer"});
      }
    }
  }

  void boolean(std::string_view key, bool& target, bool required = false) {
    if (const auto* v = find(key, required)) {
      if (v->is_boolean()) target = v->get<bool>();
      else out_.push_back({child(key), "must be a boolean"});
    }
  }

  void string(std::string_view key, std::string& target, bool required = false) {
    if (const auto* v = find(key, required)) {
      if (v->is_string()) target = v->get<std::string>();
      else out_.push_back({child(key), "must be a string"});
    }
  }

  void vec2(std::string_view key, Vec2& target, bool required = false) {
    if (const auto* v = find(key, required)) {
      if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number())
        target = {(*v)[0].get<double>(), (*v)[1].get<double>()};
      else out_.push_back({child(key), "must be an array of two numbers"});
    }
  }

  ObjectReader object(std::string_view key, bool required = false) {
    return ObjectReader(find(key, required), child(key), out_);
  }

  bool present() const { return j_ != nullptr; }

  void finish() const {
    if (j_ == nullptr) return;
    for (const auto& [key, value] : j_->items())
      if (!seen_.contains(key)) out_.push_back({child(key), "unknown key"});
  }

 private:
  const nlohmann::json* j_;
  std::string path_;
  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

inline void read_unit(ObjectReader& r, LevitatorUnit& u, const Environment& env, bool template_unit) {
  if (!template_unit) {
    r.integer("id", u.id);
    r.vec2("position_m", u.position, true);
    r.number("heading_rad", u.heading);
  }
  r.integer("num_transducers", u.num_transducers);
  r.number("power_per_transducer_w", u.power_per_transducer);
  r.number("frequency_hz", u.frequency);
  r.number("aperture_m2", u.aperture_area);
  r.number("reflector_gap_m", u.reflector_gap);
  r.number("power_scale", u.power_scale);
  bool has_depth = r.find("depth_setpoint_m", false) != nullptr;
  if (has_depth) {
    r.number("depth_setpoint_m", u.depth_setpoint);
  } else {
    try {
      u.depth_setpoint = surface_node_depth(u, env);
    } catch (const DomainError&) {
      u.depth_setpoint = u.reflector_gap;  // the gap violation is reported by validate()
    }
  }
  r.finish();
}

inline ordered_json unit_json(const LevitatorUnit& u, bool template_unit) {
  ordered_json j;
  if (!template_unit) {
    j["id"] = u.id;
    j["position_m"] = {u.position.x, u.position.y};
    j["heading_rad"] = u.heading;
  }
  j["num_transducers"] = u.num_transducers;
  j["power_per_transducer_w"] = u.power_per_transducer;
  j["frequency_hz"] = u.frequency;
  j["aperture_m2"] = u.aperture_area;
  j["reflector_gap_m"] = u.reflector_gap;
  j["depth_setpoint_m"] = u.depth_setpoint;
  j["power_scale"] = u.power_scale;
  return j;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline ordered_json levitator_to_json(const LevitatorUnit& u) { return detail::unit_json(u, false); }

/// Parses and validates a scenario document. Every violation is collected
/// before throwing ValidationError.
inline Scenario parse_scenario(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    throw ParseError("scenario parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }

  std::vector<Violation> out;
  Scenario s;
  detail::ObjectReader root(&doc, "", out);

  {
    auto r = root.object("environment", true);
    r.string("medium", s.medium, true);
    if (r.present()) {
      if (const auto d = medium_defaults(s.medium)) {
        s.env.sound_speed = d->sound_speed;
        s.env.water_density = d->water_density;
      } else {
        out.push_back({r.child("medium"), "must be one of seawater, freshwater, bench"});
      }
    }
    r.number("wind_speed_mps", s.env.wind_speed);
    r.number("wind_direction_rad", s.wind_dir);
    r.number("water_density_kgm3", s.env.water_density);
    r.number("sound_speed_mps", s.env.sound_speed);
    r.number("gravity_mps2", s.env.gravity);
    r.number("spreading_constant", s.env.spreading_constant);
    r.number("temperature_c", s.env.temperature_c);
    r.finish();
  }
  {
    auto r = root.object("oil", true);
    r.string("name", s.oil.name);
    r.number("density_kgm3", s.oil.density, true);
    r.number("viscosity_pas", s.oil.viscosity, true);
    r.finish();
  }
  {
    auto r = root.object("spill", true);
    r.vec2("origin_m", s.spill.origin);
    r.integer("count", s.spill.count, true);
    r.number("wind_drift_factor", s.spill.params.wind_drift_factor);
    r.number("diffusion_m2ps", s.spill.params.diffusion);
    auto rad = r.object("radius");
    if (rad.present()) {
      const bool fixed = rad.find("fixed_m", false) != nullptr;
      const bool logn = rad.find("lognormal", false) != nullptr;
      if (fixed == logn) {
        out.push_back({rad.path(), "must contain exactly one of fixed_m, lognormal"});
      } else if (fixed) {
        FixedRadius f;
        rad.number("fixed_m", f.radius);
        s.spill.radius = f;
      } else {
        LogNormalRadius l;
        auto lr = rad.object("lognormal");
        lr.number("median_m", l.median, true);
        lr.number("sigma", l.sigma, true);
        lr.finish();
        s.spill.radius = l;
      }
    }
    rad.finish();
    r.finish();
  }
  {
    auto r = root.object("sim", true);
    r.number("dt_s", s.dt, true);
    r.number("duration_s", s.duration, true);
    auto d = r.object("domain_m", true);
    d.number("x_min_m", s.domain.x_min, true);
    d.number("x_max_m", s.domain.x_max, true);
    d.number("y_min_m", s.domain.y_min, true);
    d.number("y_max_m", s.domain.y_max, true);
    d.finish();
    if (const auto* v = r.find("pressure_level", false); v && !v->is_null()) {
      const auto level = v->is_string() ? pressure_level_from_string(v->get<std::string>())
                                        : std::nullopt;
      if (level) s.pressure_level = level;
      else out.push_back({r.child("pressure_level"), "must be null or one of none, low, medium, high"});
    }
    if (const auto* v = r.find("capture_distance_m", false); v && !v->is_null()) {
      if (v->is_number()) s.capture_distance = v->get<double>();
      else out.push_back({r.child("capture_distance_m"), "must be null or a number"});
    }
    r.number("max_power_scale", s.max_power_scale);
    r.finish();
  }
  {
    if (const auto* v = root.find("levitators", false)) {
      if (!v->is_array()) {
        out.push_back({"/levitators", "must be an array"});
      } else {
        for (std::size_t i = 0; i < v->size(); ++i) {
          LevitatorUnit u;
          u.id = static_cast<int>(i);
          detail::ObjectReader r(&(*v)[i], "/levitators/" + std::to_string(i), out);
          detail::read_unit(r, u, s.env, false);
          s.units.push_back(u);
        }
      }
    }
  }
  {
    auto r = root.object("control");
    auto& c = s.control;
    c.power_scale_max = s.max_power_scale;
    r.boolean("enabled", c.enabled);
    r.integer("cadence_steps", c.cadence_steps);
    r.number("target_margin", c.target_margin);
    r.number("gain", c.gain);
    r.number("power_scale_min", c.power_scale_min);
    r.number("power_scale_max", c.power_scale_max);
    r.number("design_droplet_radius_m", c.design_droplet_radius);
    r.number("do_baseline_mgl", c.sensors.do_baseline_mgl);
    r.number("do_slope_mgl", c.sensors.do_slope_mgl);
    auto n = r.object("noise");
    n.number("pressure_pa", c.sensors.noise.pressure_pa);
    n.number("temperature_c", c.sensors.noise.temperature_c);
    n.number("hydrophone_pa", c.sensors.noise.hydrophone_pa);
    n.number("hydrophone_hz", c.sensors.noise.hydrophone_hz);
    n.number("dissolved_oxygen_mgl", c.sensors.noise.dissolved_oxygen_mgl);
    n.number("oil_content", c.sensors.noise.oil_content);
    n.finish();
    r.finish();
  }
  {
    auto r = root.object("planner");
    auto& p = s.planner;
    r.boolean("enabled", p.enabled);
    r.number("arc_degrees", p.arc_degrees);
    r.number("overlap", p.overlap);
    r.number("inflation", p.inflation);
    r.number("horizon_s", p.horizon);
    r.number("design_droplet_radius_m", p.design_droplet_radius);
    auto t = r.object("template");
    detail::read_unit(t, p.unit_template, s.env, true);
    r.finish();
  }
  root.finish();

  // Semantic checks run even after structural errors; paths already reported
  // are not repeated.
  std::set<std::string> reported;
  for (const auto& v : out) reported.insert(v.path);
  for (auto& v : validate(s))
    if (!reported.contains(v.path)) out.push_back(std::move(v));
  if (!out.empty()) throw ValidationError(std::move(out));
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

/// Canonical, fully-resolved form: every field explicit, fixed key order.
inline ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["environment"] = {
      {"medium", s.medium},
      {"wind_speed_mps", s.env.wind_speed},
      {"wind_direction_rad", s.wind_dir},
      {"water_density_kgm3", s.env.water_density},
      {"sound_speed_mps", s.env.sound_speed},
      {"gravity_mps2", s.env.gravity},
      {"spreading_constant", s.env.spreading_constant},
      {"temperature_c", s.env.temperature_c},
  };
  j["oil"] = {{"name", s.oil.name},
              {"density_kgm3", s.oil.density},
              {"viscosity_pas", s.oil.viscosity}};
  ordered_json radius;
  if (const auto* f = std::get_if<FixedRadius>(&s.spill.radius)) {
    radius["fixed_m"] = f->radius;
  } else {
    const auto& l = std::get<LogNormalRadius>(s.spill.radius);
    radius["lognormal"] = {{"median_m", l.median}, {"sigma", l.sigma}};
  }
  j["spill"] = {{"origin_m", {s.spill.origin.x, s.spill.origin.y}},
                {"count", s.spill.count},
                {"radius", radius},
                {"wind_drift_factor", s.spill.params.wind_drift_factor},
                {"diffusion_m2ps", s.spill.params.diffusion}};
  ordered_json sim;
  sim["dt_s"] = s.dt;
  sim["duration_s"] = s.duration;
  sim["domain_m"] = {{"x_min_m", s.domain.x_min},
                     {"x_max_m", s.domain.x_max},
                     {"y_min_m", s.domain.y_min},
                     {"y_max_m", s.domain.y_max}};
  sim["pressure_level"] =
      s.pressure_level ? ordered_json(std::string(to_string(*s.pressure_level))) : ordered_json();
  sim["capture_distance_m"] = s.capture_distance ? ordered_json(*s.capture_distance) : ordered_json();
  sim["max_power_scale"] = s.max_power_scale;
  j["sim"] = sim;
  j["levitators"] = ordered_json::array();
  for (const auto& u : s.units) j["levitators"].push_back(detail::unit_json(u, false));
  const auto& c = s.control;
  const auto& n = c.sensors.noise;
  j["control"] = {{"enabled", c.enabled},
                  {"cadence_steps", c.cadence_steps},
                  {"target_margin", c.target_margin},
                  {"gain", c.gain},
                  {"power_scale_min", c.power_scale_min},
                  {"power_scale_max", c.power_scale_max},
                  {"design_droplet_radius_m", c.design_droplet_radius},
                  {"do_baseline_mgl", c.sensors.do_baseline_mgl},
                  {"do_slope_mgl", c.sensors.do_slope_mgl},
                  {"noise",
                   {{"pressure_pa", n.pressure_pa},
                    {"temperature_c", n.temperature_c},
                    {"hydrophone_pa", n.hydrophone_pa},
                    {"hydrophone_hz", n.hydrophone_hz},
                    {"dissolved_oxygen_mgl", n.dissolved_oxygen_mgl},
                    {"oil_content", n.oil_content}}}};
  const auto& p = s.planner;
  j["planner"] = {{"enabled", p.enabled},
                  {"arc_degrees", p.arc_degrees},
                  {"overlap", p.overlap},
                  {"inflation", p.inflation},
                  {"horizon_s", p.horizon},
                  {"design_droplet_radius_m", p.design_droplet_radius},
                  {"template", detail::unit_json(p.unit_template, true)}};
  return j;
}

inline std::string emit_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

/// FNV-1a 64 over the canonical emission, as 16 hex digits.
inline std::string scenario_digest(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : emit_scenario(s)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace levichain
