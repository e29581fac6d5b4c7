// Scenario configuration: a flat `key = value` text format with units in the
// key names. Values are stored exactly as written (file units); conversion to
// SI happens in the accessor functions at the bottom.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fdasim/arrays.hpp"
#include "fdasim/covariance.hpp"
#include "fdasim/geometry.hpp"
#include "fdasim/jammer.hpp"

namespace fdasim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message)
      : std::runtime_error(describe(key, line, message)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  /// 1-based line of the offending entry, or 0 when not tied to a line.
  int line() const noexcept { return line_; }

 private:
  static std::string describe(const std::string& key, int line, const std::string& message) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!key.empty()) s += key + ": ";
    return s + message;
  }
  std::string key_;
  int line_;
};

enum class RadarCase { kPhasedArray, kFdaMimo };

inline const char* to_string(RadarCase c) {
  return c == RadarCase::kPhasedArray ? "pa" : "fda_mimo";
}

struct ScenarioConfig {
  double f0_hz = 10e9;
  double h_m = 2000.0;
  double pri_us = 100.0;
  double va_mps = 75.0;
  double d_mm = 15.0;
  double tp_us = 10.0;
  double delta_f_hz = 10e6;
  int jammer_antennas = 4;
  int tx_elements = 8;
  int rx_elements = 8;
  int pulses = 8;
  int subarrays = 4;
  int subarray_phase_spacing_elements = 1;
  double phi_t_deg = 90.0;
  double target_doppler = 0.25;
  double rt_m = 6000.0;
  double cnr_db = 30.0;
  double jnr_db = 10.0;
  double target_to_noise_db = 10.0;
  double noise_power = 1.0;
  std::vector<RadarCase> radar_cases{RadarCase::kPhasedArray, RadarCase::kFdaMimo};
  std::vector<JammerKind> jammer_kinds{JammerKind::kSameFrequency,
                                       JammerKind::kAlternatingFrequency};
  std::vector<double> dfp_khz{0.0, 0.1, 0.5, 1.0, 16.9};
  Position3D jammer_position_m{6000.0, 0.0, 0.0};
  double jammer_geometry_term_hzm = 2.16e7;
  ModulationMode modulation = ModulationMode::kDiagonal;
  int clutter_patches = 361;
  int jamming_patches = 181;
  double rank_threshold_db = 3.0;
  int if_grid = 128;
  int spectrum_spatial_bins = 64;
  int spectrum_doppler_bins = 64;
  std::uint64_t seed = 1;
  int trials = 0;  // 0: analytic (expected) covariance

  bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ParseFailure {
  std::string message;
};

inline double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseFailure{"expected a finite number, got '" + std::string(s) + "'"};
  }
  return v;
}

template <typename Int>
Int parse_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseFailure{"expected an integer, got '" + std::string(s) + "'"};
  }
  return v;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s;
}

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, std::string_view)> parse;
  std::function<std::string(const ScenarioConfig&)> format;
};

template <typename T>
Field number_field(const char* key, T ScenarioConfig::*member) {
  return {key,
          [member](ScenarioConfig& c, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*member = parse_double(v);
            } else {
              c.*member = parse_integer<T>(v);
            }
          },
          [member](const ScenarioConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(number_field("f0_hz", &ScenarioConfig::f0_hz));
    f.push_back(number_field("h_m", &ScenarioConfig::h_m));
    f.push_back(number_field("pri_us", &ScenarioConfig::pri_us));
    f.push_back(number_field("va_mps", &ScenarioConfig::va_mps));
    f.push_back(number_field("d_mm", &ScenarioConfig::d_mm));
    f.push_back(number_field("tp_us", &ScenarioConfig::tp_us));
    f.push_back(number_field("delta_f_hz", &ScenarioConfig::delta_f_hz));
    f.push_back(number_field("jammer_antennas", &ScenarioConfig::jammer_antennas));
    f.push_back(number_field("tx_elements", &ScenarioConfig::tx_elements));
    f.push_back(number_field("rx_elements", &ScenarioConfig::rx_elements));
    f.push_back(number_field("pulses", &ScenarioConfig::pulses));
    f.push_back(number_field("subarrays", &ScenarioConfig::subarrays));
    f.push_back(number_field("subarray_phase_spacing_elements",
                             &ScenarioConfig::subarray_phase_spacing_elements));
    f.push_back(number_field("phi_t_deg", &ScenarioConfig::phi_t_deg));
    f.push_back(number_field("target_doppler", &ScenarioConfig::target_doppler));
    f.push_back(number_field("rt_m", &ScenarioConfig::rt_m));
    f.push_back(number_field("cnr_db", &ScenarioConfig::cnr_db));
    f.push_back(number_field("jnr_db", &ScenarioConfig::jnr_db));
    f.push_back(number_field("target_to_noise_db", &ScenarioConfig::target_to_noise_db));
    f.push_back(number_field("noise_power", &ScenarioConfig::noise_power));
    f.push_back({"radar_cases",
                 [](ScenarioConfig& c, std::string_view v) {
                   c.radar_cases.clear();
                   for (auto item : split_list(v)) {
                     if (item == "pa") {
                       c.radar_cases.push_back(RadarCase::kPhasedArray);
                     } else if (item == "fda_mimo") {
                       c.radar_cases.push_back(RadarCase::kFdaMimo);
                     } else {
                       throw ParseFailure{"unknown radar case '" + std::string(item) +
                                          "' (expected pa or fda_mimo)"};
                     }
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return join(c.radar_cases, [](RadarCase r) { return std::string(to_string(r)); });
                 }});
    f.push_back({"jammer_kinds",
                 [](ScenarioConfig& c, std::string_view v) {
                   c.jammer_kinds.clear();
                   for (auto item : split_list(v)) {
                     if (item == "sf") {
                       c.jammer_kinds.push_back(JammerKind::kSameFrequency);
                     } else if (item == "af") {
                       c.jammer_kinds.push_back(JammerKind::kAlternatingFrequency);
                     } else {
                       throw ParseFailure{"unknown jammer kind '" + std::string(item) +
                                          "' (expected sf or af)"};
                     }
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return join(c.jammer_kinds, [](JammerKind k) { return std::string(to_string(k)); });
                 }});
    f.push_back({"dfp_khz",
                 [](ScenarioConfig& c, std::string_view v) {
                   c.dfp_khz.clear();
                   for (auto item : split_list(v)) c.dfp_khz.push_back(parse_double(item));
                 },
                 [](const ScenarioConfig& c) { return join(c.dfp_khz, format_double); }});
    f.push_back({"jammer_position_m",
                 [](ScenarioConfig& c, std::string_view v) {
                   const auto items = split_list(v);
                   if (items.size() != 3) throw ParseFailure{"expected three coordinates x, y, z"};
                   c.jammer_position_m = {parse_double(items[0]), parse_double(items[1]),
                                          parse_double(items[2])};
                 },
                 [](const ScenarioConfig& c) {
                   const auto& p = c.jammer_position_m;
                   return format_double(p.x) + ", " + format_double(p.y) + ", " + format_double(p.z);
                 }});
    f.push_back(number_field("jammer_geometry_term_hzm", &ScenarioConfig::jammer_geometry_term_hzm));
    f.push_back({"modulation",
                 [](ScenarioConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "exact") {
                     c.modulation = ModulationMode::kExact;
                   } else if (v == "diagonal") {
                     c.modulation = ModulationMode::kDiagonal;
                   } else {
                     throw ParseFailure{"expected exact or diagonal"};
                   }
                 },
                 [](const ScenarioConfig& c) { return std::string(to_string(c.modulation)); }});
    f.push_back(number_field("clutter_patches", &ScenarioConfig::clutter_patches));
    f.push_back(number_field("jamming_patches", &ScenarioConfig::jamming_patches));
    f.push_back(number_field("rank_threshold_db", &ScenarioConfig::rank_threshold_db));
    f.push_back(number_field("if_grid", &ScenarioConfig::if_grid));
    f.push_back(number_field("spectrum_spatial_bins", &ScenarioConfig::spectrum_spatial_bins));
    f.push_back(number_field("spectrum_doppler_bins", &ScenarioConfig::spectrum_doppler_bins));
    f.push_back(number_field("seed", &ScenarioConfig::seed));
    f.push_back(number_field("trials", &ScenarioConfig::trials));
    return f;
  }();
  return table;
}

}  // namespace detail

// -----------------------------------------------------------------------------
// SI accessors
// -----------------------------------------------------------------------------

inline ArrayConfig array_config(const ScenarioConfig& c, RadarCase rc) {
  ArrayConfig a;
  a.tx_elements = c.tx_elements;
  a.rx_elements = c.rx_elements;
  a.subarrays = rc == RadarCase::kPhasedArray ? 1 : c.subarrays;
  a.pulses = c.pulses;
  a.element_spacing = c.d_mm * 1e-3;
  a.carrier = c.f0_hz;
  a.subarray_freq_increment = c.delta_f_hz;
  a.pri = c.pri_us * 1e-6;
  a.pulse_width = c.tp_us * 1e-6;
  a.platform_velocity = c.va_mps;
  a.subarray_phase_spacing = c.subarray_phase_spacing_elements;
  return a;
}

inline JammerModel jammer_model(const ScenarioConfig& c, JammerKind kind, double dfp_khz) {
  JammerModel j;
  j.kind = kind;
  j.antennas = c.jammer_antennas;
  j.frequency_offset = dfp_khz * 1e3;
  j.geometry_term = c.jammer_geometry_term_hzm;
  j.power = db_to_linear(c.jnr_db) * c.noise_power;
  return j;
}

inline SceneGeometry scene_geometry(const ScenarioConfig& c) {
  return make_scene(c.h_m, c.jammer_position_m, c.rt_m, c.va_mps);
}

/// Target/look direction: configured azimuth, elevation of the iso-range ring.
inline Angles look_direction(const ScenarioConfig& c) {
  const double ground = std::sqrt(c.rt_m * c.rt_m - c.h_m * c.h_m);
  return {c.phi_t_deg * kPi / 180.0, std::atan2(c.h_m, ground)};
}

/// Raises ConfigError naming the offending key. `lines` maps keys to the line
/// they were read from.
inline void validate(const ScenarioConfig& c, const std::map<std::string, int>& lines = {}) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto it = lines.find(key);
    throw ConfigError(key, it == lines.end() ? 0 : it->second, msg);
  };
  auto positive = [&](const char* key, double v) {
    if (!(v > 0.0)) fail(key, "must be positive");
  };
  positive("f0_hz", c.f0_hz);
  positive("h_m", c.h_m);
  positive("pri_us", c.pri_us);
  positive("va_mps", c.va_mps);
  positive("d_mm", c.d_mm);
  positive("tp_us", c.tp_us);
  positive("delta_f_hz", c.delta_f_hz);
  positive("rt_m", c.rt_m);
  positive("noise_power", c.noise_power);
  positive("rank_threshold_db", c.rank_threshold_db);
  if (c.jammer_antennas < 2) fail("jammer_antennas", "must be at least 2");
  if (c.tx_elements < 1) fail("tx_elements", "must be positive");
  if (c.rx_elements < 1) fail("rx_elements", "must be positive");
  if (c.pulses < 1) fail("pulses", "must be positive");
  if (c.subarrays < 1) fail("subarrays", "must be positive");
  if (c.tx_elements % c.subarrays != 0) fail("subarrays", "must divide tx_elements");
  if (c.subarray_phase_spacing_elements < 0) {
    fail("subarray_phase_spacing_elements", "must be non-negative");
  }
  if (!(std::abs(c.target_doppler) <= 0.5)) fail("target_doppler", "must lie in [-0.5, 0.5]");
  if (c.radar_cases.empty()) fail("radar_cases", "must list at least one case");
  if (c.jammer_kinds.empty()) fail("jammer_kinds", "must list at least one kind");
  if (c.dfp_khz.empty()) fail("dfp_khz", "must list at least one offset");
  for (double v : c.dfp_khz) {
    if (!(v >= 0.0)) fail("dfp_khz", "offsets must be non-negative");
  }
  if (c.clutter_patches < 1) fail("clutter_patches", "must be positive");
  if (c.jamming_patches < 2) fail("jamming_patches", "must be at least 2");
  if (c.if_grid < 64) fail("if_grid", "must be at least 64");
  if (c.spectrum_spatial_bins < 2) fail("spectrum_spatial_bins", "must be at least 2");
  if (c.spectrum_doppler_bins < 2) fail("spectrum_doppler_bins", "must be at least 2");
  if (c.trials < 0) fail("trials", "must be non-negative");
  if (!(c.rt_m > c.h_m)) fail("rt_m", "target range must exceed the platform height h_m");
  try {
    const auto geom = scene_geometry(c);
    (void)jamming_trajectory(geom);
  } catch (const GeometryError& e) {
    fail("jammer_position_m", e.what());
  }
}

// -----------------------------------------------------------------------------
// Text format
// -----------------------------------------------------------------------------

inline ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::map<std::string, int> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, "expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const auto& table = detail::fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const detail::Field& f) { return key == f.key; });
    if (it == table.end()) throw ConfigError(key, line_no, "unknown key");
    if (lines.count(key)) throw ConfigError(key, line_no, "duplicate key");
    lines[key] = line_no;
    try {
      it->parse(c, value);
    } catch (const detail::ParseFailure& e) {
      throw ConfigError(key, line_no, e.message);
    }
  }
  validate(c, lines);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize(const ScenarioConfig& c) {
  std::string s;
  for (const auto& f : detail::fields()) s += std::string(f.key) + " = " + f.format(c) + "\n";
  return s;
}

}  // namespace fdasim
