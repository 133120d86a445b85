// Copyright 2026 The SEMO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMO__SIMULATOR_HPP_
#define SEMO__SIMULATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semo/error.hpp"
#include "semo/types.hpp"

namespace semo {

enum class EventKind { Start, Stop, PlugIn, PlugOut };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Start: return "Start";
    case EventKind::Stop: return "Stop";
    case EventKind::PlugIn: return "PlugIn";
    case EventKind::PlugOut: return "PlugOut";
  }
  return "Unknown";
}

struct ScheduleEvent {
  std::int64_t t_s = 0;
  EventKind kind = EventKind::Start;
  std::string name; ///< application, for Start/Stop

  bool operator==(const ScheduleEvent &) const = default;
};

struct NoiseModel {
  double sigma_mw = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const NoiseModel &) const = default;
};

/// Input to simulate(): a battery, a workload and a sampling plan.
struct Scenario {
  double capacity_mah = 1000.0;
  int nominal_voltage_mv = 3700;
  double baseline_mw = 0.0;
  std::map<std::string, double> apps; ///< name -> power draw, mW
  std::vector<ScheduleEvent> schedule;
  std::int64_t duration_s = 3600;
  std::int64_t sample_interval_s = 60;
  NoiseModel noise;
  double initial_level_pct = 100.0;
  std::int64_t start_ts_ms = 0; ///< wall-clock instant of t = 0

  /// Full-charge energy in mWh.
  double full_energy_mwh() const { return capacity_mah * nominal_voltage_mv / 1000.0; }

  bool operator==(const Scenario &) const = default;
};

/// Net charging power while plugged in.
inline constexpr double kChargePowerMw = 5000.0;
/// Constant reported battery temperature, deci-°C.
inline constexpr int kSimulatedTempDc = 250;

/**
 * @brief Platform-stable standard normal generator.
 *
 * std::mt19937_64 (bit-exact by the standard) feeding Box–Muller:
 * u1 = (x1 >> 11 + 1) · 2⁻⁵³ ∈ (0, 1], u2 = (x2 >> 11) · 2⁻⁵³ ∈ [0, 1),
 * z = √(−2 ln u1) · cos(2π u2). One engine pair per draw; the sine branch
 * is discarded.
 */
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
    double u2 = static_cast<double>(engine_() >> 11) * kScale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

namespace detail {

[[noreturn]] inline void invalid_scenario(const std::string &why) {
  throw Error(Errc::ScenarioInvalid, why);
}

} // namespace detail

/// Throws ScenarioInvalid naming the first violated constraint.
inline void validate(const Scenario &s) {
  using detail::invalid_scenario;
  if (!(s.capacity_mah > 0.0) || !std::isfinite(s.capacity_mah))
    invalid_scenario("capacity_mah must be positive");
  if (s.nominal_voltage_mv <= 0) invalid_scenario("nominal_voltage_mv must be positive");
  if (!(s.baseline_mw >= 0.0) || !std::isfinite(s.baseline_mw))
    invalid_scenario("baseline_mw must be finite and >= 0");
  for (const auto &[name, p] : s.apps) {
    if (name.empty()) invalid_scenario("app names must be non-empty");
    if (!(p >= 0.0) || !std::isfinite(p))
      invalid_scenario("power of \"" + name + "\" must be finite and >= 0");
  }
  if (s.duration_s <= 0) invalid_scenario("duration_s must be positive");
  if (s.sample_interval_s < 1) invalid_scenario("sample_interval_s must be >= 1");
  if (!(s.noise.sigma_mw >= 0.0) || !std::isfinite(s.noise.sigma_mw))
    invalid_scenario("noise.sigma_mw must be finite and >= 0");
  if (!(s.initial_level_pct > 0.0 && s.initial_level_pct <= 100.0))
    invalid_scenario("initial_level_pct must lie in (0, 100]");

  std::set<std::string> running;
  bool plugged = false;
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto &e = s.schedule[i];
    const std::string where = "schedule[" + std::to_string(i) + "]: ";
    if (e.t_s < 0) invalid_scenario(where + "negative t_s");
    if (e.t_s < prev) invalid_scenario(where + "t_s decreases");
    prev = e.t_s;
    switch (e.kind) {
      case EventKind::Start:
        if (!s.apps.contains(e.name)) invalid_scenario(where + "unknown app \"" + e.name + "\"");
        if (!running.insert(e.name).second)
          invalid_scenario(where + "\"" + e.name + "\" already running");
        break;
      case EventKind::Stop:
        if (running.erase(e.name) == 0)
          invalid_scenario(where + "\"" + e.name + "\" stopped but not running");
        break;
      case EventKind::PlugIn:
        if (plugged) invalid_scenario(where + "PlugIn while plugged in");
        plugged = true;
        break;
      case EventKind::PlugOut:
        if (!plugged) invalid_scenario(where + "PlugOut while unplugged");
        plugged = false;
        break;
    }
  }
}

inline nlohmann::ordered_json to_json(const Scenario &s) {
  nlohmann::ordered_json j;
  j["capacity_mah"] = s.capacity_mah;
  j["nominal_voltage_mv"] = s.nominal_voltage_mv;
  j["baseline_mw"] = s.baseline_mw;
  j["apps"] = nlohmann::ordered_json::object();
  for (const auto &[name, p] : s.apps) j["apps"][name] = p;
  j["schedule"] = nlohmann::ordered_json::array();
  for (const auto &e : s.schedule) {
    nlohmann::ordered_json ev;
    ev["t_s"] = e.t_s;
    ev["event"] = std::string(to_string(e.kind));
    if (e.kind == EventKind::Start || e.kind == EventKind::Stop) ev["name"] = e.name;
    j["schedule"].push_back(std::move(ev));
  }
  j["duration_s"] = s.duration_s;
  j["sample_interval_s"] = s.sample_interval_s;
  j["noise"] = {{"sigma_mw", s.noise.sigma_mw}, {"seed", s.noise.seed}};
  j["initial_level_pct"] = s.initial_level_pct;
  j["start_ts_ms"] = s.start_ts_ms;
  return j;
}

/**
 * @brief Parses a scenario document. Optional keys: schedule,
 * sample_interval_s, noise, initial_level_pct, start_ts_ms. Unknown keys,
 * wrong types and invariant violations raise ScenarioInvalid.
 */
inline Scenario scenario_from_json(const nlohmann::json &j) {
  using detail::invalid_scenario;
  if (!j.is_object()) invalid_scenario("scenario must be a JSON object");
  static const std::set<std::string> kKeys = {
      "capacity_mah", "nominal_voltage_mv", "baseline_mw",       "apps",     "schedule",
      "duration_s",   "sample_interval_s",  "noise",             "initial_level_pct",
      "start_ts_ms"};
  for (const auto &[key, _] : j.items()) {
    if (!kKeys.contains(key)) invalid_scenario("unexpected key \"" + key + "\"");
  }
  auto number = [&](const nlohmann::json &obj, const char *key) {
    if (!obj.contains(key)) invalid_scenario(std::string("missing \"") + key + "\"");
    if (!obj[key].is_number()) invalid_scenario(std::string("\"") + key + "\" must be a number");
    return obj[key].get<double>();
  };
  auto integer = [&](const nlohmann::json &obj, const char *key) {
    if (!obj.contains(key)) invalid_scenario(std::string("missing \"") + key + "\"");
    if (!obj[key].is_number_integer())
      invalid_scenario(std::string("\"") + key + "\" must be an integer");
    return obj[key].get<std::int64_t>();
  };

  Scenario s;
  s.capacity_mah = number(j, "capacity_mah");
  auto mv = integer(j, "nominal_voltage_mv");
  if (mv <= 0 || mv > 1'000'000) invalid_scenario("nominal_voltage_mv out of range");
  s.nominal_voltage_mv = static_cast<int>(mv);
  s.baseline_mw = number(j, "baseline_mw");
  s.duration_s = integer(j, "duration_s");

  if (!j.contains("apps") || !j["apps"].is_object()) invalid_scenario("\"apps\" must be an object");
  for (const auto &[name, p] : j["apps"].items()) {
    if (!p.is_number()) invalid_scenario("power of \"" + name + "\" must be a number");
    s.apps[name] = p.get<double>();
  }

  if (j.contains("schedule")) {
    if (!j["schedule"].is_array()) invalid_scenario("\"schedule\" must be an array");
    for (const auto &ev : j["schedule"]) {
      if (!ev.is_object()) invalid_scenario("schedule entries must be objects");
      ScheduleEvent e;
      e.t_s = integer(ev, "t_s");
      if (!ev.contains("event") || !ev["event"].is_string())
        invalid_scenario("schedule entry needs an \"event\" string");
      auto kind = ev["event"].get<std::string>();
      if (kind == "Start") e.kind = EventKind::Start;
      else if (kind == "Stop") e.kind = EventKind::Stop;
      else if (kind == "PlugIn") e.kind = EventKind::PlugIn;
      else if (kind == "PlugOut") e.kind = EventKind::PlugOut;
      else invalid_scenario("unknown event \"" + kind + "\"");
      if (e.kind == EventKind::Start || e.kind == EventKind::Stop) {
        if (!ev.contains("name") || !ev["name"].is_string())
          invalid_scenario(kind + " event needs a \"name\" string");
        e.name = ev["name"].get<std::string>();
      }
      s.schedule.push_back(std::move(e));
    }
  }
  if (j.contains("sample_interval_s")) s.sample_interval_s = integer(j, "sample_interval_s");
  if (j.contains("noise")) {
    const auto &n = j["noise"];
    if (!n.is_object()) invalid_scenario("\"noise\" must be an object");
    if (n.contains("sigma_mw")) s.noise.sigma_mw = number(n, "sigma_mw");
    if (n.contains("seed")) {
      if (!n["seed"].is_number_unsigned() && !(n["seed"].is_number_integer() && n["seed"].get<std::int64_t>() >= 0))
        invalid_scenario("\"seed\" must be a non-negative integer");
      s.noise.seed = n["seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("initial_level_pct")) s.initial_level_pct = number(j, "initial_level_pct");
  if (j.contains("start_ts_ms")) s.start_ts_ms = integer(j, "start_ts_ms");
  validate(s);
  return s;
}

inline Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "file not found: " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ScenarioInvalid, path.string() + ": invalid JSON");
  return scenario_from_json(j);
}

/// Simulation output plus the exact state behind each emitted sample.
struct SimulationTrace {
  std::vector<LogRecord> records;
  std::vector<double> energy_mwh; ///< unquantized energy at each record
  double drained_mwh = 0.0;       ///< ∫ drain power dt over unplugged time
};

/**
 * @brief Integrates state of charge and emits one sample per interval.
 *
 * Samples fall at t = 0, Δ, 2Δ, … ≤ duration_s; events at a sample instant
 * take effect before that sample. Between events the drain power is the
 * baseline plus running apps plus one gaussian draw per sampling step.
 * While plugged in the battery gains kChargePowerMw instead. Energy is
 * clamped to [0, E_full].
 */
inline SimulationTrace simulate_trace(const Scenario &s) {
  validate(s);
  const double e_full = s.full_energy_mwh();
  const double volts = s.nominal_voltage_mv / 1000.0;
  double energy = s.initial_level_pct / 100.0 * e_full;
  bool plugged = false;
  std::set<std::string> running;
  std::size_t next_event = 0;
  GaussianSource gauss(s.noise.seed);
  SimulationTrace trace;

  auto apply = [&](const ScheduleEvent &e) {
    switch (e.kind) {
      case EventKind::Start: running.insert(e.name); break;
      case EventKind::Stop: running.erase(e.name); break;
      case EventKind::PlugIn: plugged = true; break;
      case EventKind::PlugOut: plugged = false; break;
    }
  };
  auto integrate = [&](std::int64_t from_s, std::int64_t to_s, double noise_mw) {
    if (to_s <= from_s) return;
    const double hours = static_cast<double>(to_s - from_s) / 3600.0;
    if (plugged) {
      energy = std::min(e_full, energy + kChargePowerMw * hours);
      return;
    }
    double power = s.baseline_mw + noise_mw;
    for (const auto &name : running) power += s.apps.at(name);
    trace.drained_mwh += power * hours;
    energy = std::clamp(energy - power * hours, 0.0, e_full);
  };
  auto emit = [&](std::int64_t t_s) {
    LogRecord r;
    auto &smp = r.sample;
    smp.ts = from_ms(s.start_ts_ms + t_s * 1000);
    smp.level_pct = std::clamp(static_cast<int>(std::floor(100.0 * energy / e_full + 1e-9)), 0, 100);
    smp.voltage_mv = s.nominal_voltage_mv;
    smp.temp_dc = kSimulatedTempDc;
    smp.charge_uah = std::llround(energy / volts * 1000.0);
    smp.status = plugged ? (energy >= e_full ? Status::Full : Status::Charging) : Status::Discharging;
    smp.health = Health::Good;
    r.apps = AppSet(std::vector<std::string>(running.begin(), running.end()));
    trace.records.push_back(std::move(r));
    trace.energy_mwh.push_back(energy);
  };

  for (std::int64_t t = 0;; t += s.sample_interval_s) {
    while (next_event < s.schedule.size() && s.schedule[next_event].t_s <= t)
      apply(s.schedule[next_event++]);
    emit(t);
    const std::int64_t step_end = t + s.sample_interval_s;
    if (step_end > s.duration_s) break;

    const double noise = s.noise.sigma_mw > 0.0 ? s.noise.sigma_mw * gauss.next() : 0.0;
    std::int64_t cursor = t;
    while (next_event < s.schedule.size() && s.schedule[next_event].t_s < step_end) {
      const auto &e = s.schedule[next_event++];
      integrate(cursor, e.t_s, noise);
      cursor = e.t_s;
      apply(e);
    }
    integrate(cursor, step_end, noise);
  }
  return trace;
}

inline std::vector<LogRecord> simulate(const Scenario &s) { return simulate_trace(s).records; }

/// The five workloads, most power-hungry first.
inline std::vector<std::string> table1_task_names() {
  return {"file download", "video streaming", "play games", "web browsing", "text message"};
}

/**
 * @brief Eight-hour, five-task workload.
 *
 * Sixteen 30-minute segments: idle, each task alone, then every pair of
 * tasks. Segment boundaries sit on the one-minute sampling grid, and the
 * solo and pair segments make every task separately identifiable.
 */
inline Scenario table1_scenario() {
  const auto names = table1_task_names();
  const std::vector<double> powers = {1400.0, 1150.0, 900.0, 650.0, 350.0};

  Scenario s;
  s.capacity_mah = 4000.0;
  s.nominal_voltage_mv = 3850;
  s.baseline_mw = 200.0;
  for (std::size_t i = 0; i < names.size(); ++i) s.apps[names[i]] = powers[i];
  s.sample_interval_s = 60;
  s.initial_level_pct = 100.0;

  std::vector<std::set<std::string>> segments;
  segments.push_back({});
  for (const auto &n : names) segments.push_back({n});
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j) segments.push_back({names[i], names[j]});

  constexpr std::int64_t kSegment_s = 1800;
  std::set<std::string> running;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto t = static_cast<std::int64_t>(k) * kSegment_s;
    for (const auto &n : running)
      if (!segments[k].contains(n)) s.schedule.push_back({t, EventKind::Stop, n});
    for (const auto &n : segments[k])
      if (!running.contains(n)) s.schedule.push_back({t, EventKind::Start, n});
    running = segments[k];
  }
  s.duration_s = static_cast<std::int64_t>(segments.size()) * kSegment_s;
  return s;
}

} // namespace semo

#endif // SEMO__SIMULATOR_HPP_
