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

#ifndef SEMO__TYPES_HPP_
#define SEMO__TYPES_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semo {

/// Wall-clock instant with millisecond resolution (ms since Unix epoch).
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

inline constexpr std::int64_t to_ms(Instant t) {
  return t.time_since_epoch().count();
}
inline constexpr Instant from_ms(std::int64_t ms) {
  return Instant{std::chrono::milliseconds{ms}};
}

enum class Status { Charging, Discharging, Full, NotCharging, Unknown };
enum class Health { Good, Overheat, Dead, OverVoltage, Cold, Unknown };

// Canonical identifiers, used by the log format and JSON output.
inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Charging: return "Charging";
    case Status::Discharging: return "Discharging";
    case Status::Full: return "Full";
    case Status::NotCharging: return "NotCharging";
    case Status::Unknown: break;
  }
  return "Unknown";
}

inline std::string_view to_string(Health h) {
  switch (h) {
    case Health::Good: return "Good";
    case Health::Overheat: return "Overheat";
    case Health::Dead: return "Dead";
    case Health::OverVoltage: return "OverVoltage";
    case Health::Cold: return "Cold";
    case Health::Unknown: break;
  }
  return "Unknown";
}

inline std::optional<Status> status_from_string(std::string_view s) {
  for (auto v : {Status::Charging, Status::Discharging, Status::Full,
                 Status::NotCharging, Status::Unknown}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

inline std::optional<Health> health_from_string(std::string_view s) {
  for (auto v : {Health::Good, Health::Overheat, Health::Dead,
                 Health::OverVoltage, Health::Cold, Health::Unknown}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

/// One instantaneous battery reading.
struct BatterySample {
  Instant ts{};
  int level_pct = 0;                      ///< 0..=100
  int voltage_mv = 0;                     ///< > 0 unless status is Unknown
  int temp_dc = 0;                        ///< tenths of a degree Celsius
  std::optional<std::int64_t> charge_uah; ///< remaining charge, µAh
  Status status = Status::Unknown;
  Health health = Health::Unknown;

  bool operator==(const BatterySample &) const = default;
};

/// Checks the BatterySample invariants.
inline bool is_valid(const BatterySample &s) {
  if (s.level_pct < 0 || s.level_pct > 100) return false;
  if (s.status != Status::Unknown && s.voltage_mv <= 0) return false;
  if (s.charge_uah && *s.charge_uah < 0) return false;
  return true;
}

/**
 * @brief Sorted, deduplicated set of non-empty application names.
 *
 * Construction normalizes its input, so every AppSet value satisfies the
 * invariant regardless of how it was built.
 */
class AppSet {
public:
  AppSet() = default;
  explicit AppSet(std::vector<std::string> names) : names_(std::move(names)) {
    normalize();
  }
  AppSet(std::initializer_list<std::string> names) : names_(names) {
    normalize();
  }

  const std::vector<std::string> &names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  auto begin() const noexcept { return names_.begin(); }
  auto end() const noexcept { return names_.end(); }

  bool contains(std::string_view name) const {
    return std::binary_search(names_.begin(), names_.end(), name,
                              std::less<>{});
  }

  AppSet united(const AppSet &other) const {
    std::vector<std::string> out;
    out.reserve(names_.size() + other.names_.size());
    std::set_union(names_.begin(), names_.end(), other.names_.begin(),
                   other.names_.end(), std::back_inserter(out));
    return AppSet(std::move(out));
  }

  AppSet minus(const AppSet &other) const {
    std::vector<std::string> out;
    std::set_difference(names_.begin(), names_.end(), other.names_.begin(),
                        other.names_.end(), std::back_inserter(out));
    return AppSet(std::move(out));
  }

  /// Members joined with `sep`, in sorted order.
  std::string join(std::string_view sep) const {
    std::string out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (i != 0) out += sep;
      out += names_[i];
    }
    return out;
  }

  auto operator<=>(const AppSet &) const = default;
  bool operator==(const AppSet &) const = default;

private:
  void normalize() {
    std::erase_if(names_, [](const std::string &n) { return n.empty(); });
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  }

  std::vector<std::string> names_;
};

/// One recorder row: a battery sample plus the applications running at the
/// same tick.
struct LogRecord {
  BatterySample sample;
  AppSet apps;

  bool operator==(const LogRecord &) const = default;
};

} // namespace semo

#endif // SEMO__TYPES_HPP_
