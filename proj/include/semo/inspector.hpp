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

#ifndef SEMO__INSPECTOR_HPP_
#define SEMO__INSPECTOR_HPP_

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semo/types.hpp"

namespace semo {

// Declaration order is the order in which evaluate() reports warnings.
enum class WarningKind { LowBattery, Overheat, UnhealthyBattery, VoltageOutOfRange };

inline std::string_view to_string(WarningKind k) {
  switch (k) {
    case WarningKind::LowBattery: return "LowBattery";
    case WarningKind::Overheat: return "Overheat";
    case WarningKind::UnhealthyBattery: return "UnhealthyBattery";
    case WarningKind::VoltageOutOfRange: return "VoltageOutOfRange";
  }
  return "Unknown";
}

struct Warning {
  WarningKind kind;
  std::string message;
  /// Configured limit that was crossed. Empty for UnhealthyBattery, whose
  /// trigger is categorical.
  std::optional<int> threshold;

  bool operator==(const Warning &) const = default;
};

struct InspectorConfig {
  int low_battery_pct = 15;
  int overheat_dc = 450;
  int voltage_min_mv = 3000;
  int voltage_max_mv = 4500;

  void validate() const {
    if (low_battery_pct <= 0 || low_battery_pct >= 100)
      throw std::invalid_argument("low_battery_pct must lie in (0, 100)");
    if (voltage_min_mv >= voltage_max_mv)
      throw std::invalid_argument("voltage_min_mv must be below voltage_max_mv");
  }
};

/// Formats deci-degrees as "31.0 °C".
inline std::string format_temperature(int temp_dc) {
  std::string out = temp_dc < 0 ? "-" : "";
  int mag = std::abs(temp_dc);
  out += std::to_string(mag / 10) + "." + std::to_string(mag % 10) + " °C";
  return out;
}

inline std::string_view describe_status(Status s) {
  switch (s) {
    case Status::Charging: return "charging";
    case Status::Discharging: return "discharging";
    case Status::Full: return "full";
    case Status::NotCharging: return "not charging";
    case Status::Unknown: break;
  }
  return "unknown";
}

inline std::string_view describe_health(Health h) {
  switch (h) {
    case Health::Good: return "good";
    case Health::Overheat: return "overheat";
    case Health::Dead: return "dead";
    case Health::OverVoltage: return "over voltage";
    case Health::Cold: return "cold";
    case Health::Unknown: break;
  }
  return "unknown";
}

/// Checks a sample against the configured critical conditions.
inline std::vector<Warning> evaluate(const BatterySample &s,
                                     const InspectorConfig &cfg = {}) {
  std::vector<Warning> out;

  // Suppressed while a charger is doing its job.
  bool draining = s.status == Status::Discharging || s.status == Status::NotCharging;
  if (draining && s.level_pct < cfg.low_battery_pct) {
    out.push_back({WarningKind::LowBattery,
                   "battery at " + std::to_string(s.level_pct) + "% (below " +
                       std::to_string(cfg.low_battery_pct) + "%), connect a charger",
                   cfg.low_battery_pct});
  }
  if (s.temp_dc > cfg.overheat_dc) {
    out.push_back({WarningKind::Overheat,
                   "temperature " + format_temperature(s.temp_dc) + " above " +
                       format_temperature(cfg.overheat_dc),
                   cfg.overheat_dc});
  }
  if (s.health != Health::Good && s.health != Health::Unknown) {
    out.push_back({WarningKind::UnhealthyBattery,
                   "battery health is " + std::string(describe_health(s.health)),
                   std::nullopt});
  }
  if (s.voltage_mv < cfg.voltage_min_mv) {
    out.push_back({WarningKind::VoltageOutOfRange,
                   "voltage " + std::to_string(s.voltage_mv) + " mV below " +
                       std::to_string(cfg.voltage_min_mv) + " mV",
                   cfg.voltage_min_mv});
  } else if (s.voltage_mv > cfg.voltage_max_mv) {
    out.push_back({WarningKind::VoltageOutOfRange,
                   "voltage " + std::to_string(s.voltage_mv) + " mV above " +
                       std::to_string(cfg.voltage_max_mv) + " mV",
                   cfg.voltage_max_mv});
  }
  return out;
}

/// Human-readable battery report, one field per line.
inline std::string describe(const BatterySample &s) {
  std::string out;
  out += "time: " + std::to_string(to_ms(s.ts)) + " ms\n";
  out += "level: " + std::to_string(s.level_pct) + "%\n";
  out += "status: " + std::string(describe_status(s.status)) + "\n";
  out += "health: " + std::string(describe_health(s.health)) + "\n";
  out += "voltage: " + std::to_string(s.voltage_mv) + " mV\n";
  out += "temperature: " + format_temperature(s.temp_dc) + "\n";
  out += "charge: " +
         (s.charge_uah ? std::to_string(*s.charge_uah) + " uAh" : std::string("n/a")) +
         "\n";
  return out;
}

} // namespace semo

#endif // SEMO__INSPECTOR_HPP_
