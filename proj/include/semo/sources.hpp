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

#ifndef SEMO__SOURCES_HPP_
#define SEMO__SOURCES_HPP_

#include <charconv>
#include <climits>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semo/clock.hpp"
#include "semo/error.hpp"
#include "semo/log_io.hpp"
#include "semo/types.hpp"

namespace semo {

/// File names inside a source directory. Mirrors the Linux
/// /sys/class/power_supply/<battery>/ layout, plus a running_apps listing.
namespace source_files {
inline constexpr const char *kCapacity = "capacity";       // percent
inline constexpr const char *kVoltageNow = "voltage_now";  // µV
inline constexpr const char *kTemp = "temp";               // deci-°C
inline constexpr const char *kChargeNow = "charge_now";    // µAh, optional
inline constexpr const char *kStatus = "status";
inline constexpr const char *kHealth = "health";
inline constexpr const char *kRunningApps = "running_apps";
} // namespace source_files

inline constexpr const char *kSourceRootEnv = "SEMO_SOURCE_ROOT";
inline constexpr const char *kDefaultSourceRoot = "/sys/class/power_supply/BAT0";

/// SEMO_SOURCE_ROOT when set and non-empty, else the built-in default.
inline std::filesystem::path default_source_root() {
  const char *env = std::getenv(kSourceRootEnv);
  if (env != nullptr && *env != '\0') return env;
  return kDefaultSourceRoot;
}

/// Status strings as written by the kernel; anything else is Unknown.
inline Status parse_status_text(std::string_view s) {
  if (s == "Charging") return Status::Charging;
  if (s == "Discharging") return Status::Discharging;
  if (s == "Full") return Status::Full;
  if (s == "Not charging") return Status::NotCharging;
  return Status::Unknown;
}

inline Health parse_health_text(std::string_view s) {
  if (s == "Good") return Health::Good;
  if (s == "Overheat") return Health::Overheat;
  if (s == "Dead") return Health::Dead;
  if (s == "Over voltage") return Health::OverVoltage;
  if (s == "Cold") return Health::Cold;
  return Health::Unknown;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<std::string> slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline std::string read_field(const std::filesystem::path &root,
                              const char *name) {
  auto text = slurp(root / name);
  if (!text) throw Error(Errc::MissingField, (root / name).string());
  return std::string(trim(*text));
}

inline std::int64_t parse_int_field(const std::string &text, const char *name) {
  std::int64_t v = 0;
  const char *first = text.data();
  const char *last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last)
    throw Error(Errc::MalformedField,
                std::string(name) + ": not an integer: \"" + text + "\"");
  return v;
}

inline int narrow_field(std::int64_t v, const char *name) {
  if (v < INT32_MIN || v > INT32_MAX)
    throw Error(Errc::MalformedField, std::string(name) + ": out of range");
  return static_cast<int>(v);
}

} // namespace detail

/**
 * @brief Reads one battery sample from a power-supply style directory.
 *
 * Units: capacity in percent, voltage_now in µV (reported as mV, truncated),
 * temp in deci-°C, charge_now in µAh. charge_now is optional; every other
 * file is mandatory. The timestamp comes from `clock`.
 */
template <InstantSource Clock>
BatterySample read_battery_sample(const std::filesystem::path &root,
                                  Clock &clock) {
  using namespace source_files;
  BatterySample s;

  auto level = detail::parse_int_field(detail::read_field(root, kCapacity), kCapacity);
  if (level < 0 || level > 100)
    throw Error(Errc::MalformedField,
                std::string(kCapacity) + ": " + std::to_string(level) +
                    " outside 0..=100");
  s.level_pct = static_cast<int>(level);

  auto uv = detail::parse_int_field(detail::read_field(root, kVoltageNow), kVoltageNow);
  s.voltage_mv = detail::narrow_field(uv / 1000, kVoltageNow);
  s.temp_dc = detail::narrow_field(
      detail::parse_int_field(detail::read_field(root, kTemp), kTemp), kTemp);

  if (auto charge = detail::slurp(root / kChargeNow)) {
    auto uah = detail::parse_int_field(std::string(detail::trim(*charge)), kChargeNow);
    if (uah < 0)
      throw Error(Errc::MalformedField, std::string(kChargeNow) + ": negative");
    s.charge_uah = uah;
  }

  s.status = parse_status_text(detail::read_field(root, kStatus));
  s.health = parse_health_text(detail::read_field(root, kHealth));

  if (s.status != Status::Unknown && s.voltage_mv <= 0)
    throw Error(Errc::MalformedField,
                std::string(kVoltageNow) + ": must be positive");

  s.ts = clock.now();
  return s;
}

/// Reads the running_apps listing: one name per line, trimmed, blank lines
/// dropped, result sorted and deduplicated.
inline AppSet read_running_apps(const std::filesystem::path &root) {
  auto text = detail::slurp(root / source_files::kRunningApps);
  if (!text)
    throw Error(Errc::MissingField, (root / source_files::kRunningApps).string());
  std::vector<std::string> names;
  std::string_view rest = *text;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    auto line = detail::trim(rest.substr(0, nl));
    if (!line.empty()) names.emplace_back(line);
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  return AppSet(std::move(names));
}

/// A provider of complete readings stamped with the given instant.
template <class S>
concept ReadingSource = requires(S &s, Instant t) {
  { s.read(t) } -> std::same_as<LogRecord>;
};

/// Live readings from a power-supply style directory.
class FileTreeSource {
public:
  explicit FileTreeSource(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path &root() const noexcept { return root_; }

  LogRecord read(Instant t) const {
    struct Fixed {
      Instant t;
      Instant now() const { return t; }
    } clock{t};
    LogRecord r;
    r.sample = read_battery_sample(root_, clock);
    r.apps = read_running_apps(root_);
    return r;
  }

private:
  std::filesystem::path root_;
};

/**
 * @brief Replays the readings of an existing log.
 *
 * Each read returns the next logged reading restamped with the caller's
 * instant. When exhausted it throws SourceExhausted, or wraps around if
 * constructed with `cycle`.
 */
class ReplaySource {
public:
  explicit ReplaySource(std::vector<LogRecord> records, bool cycle = false)
      : records_(std::move(records)), cycle_(cycle) {}

  static ReplaySource from_log(const std::filesystem::path &path,
                               bool cycle = false) {
    return ReplaySource(load_log(path), cycle);
  }

  LogRecord read(Instant t) {
    if (next_ >= records_.size()) {
      if (!cycle_ || records_.empty())
        throw Error(Errc::SourceExhausted, "replay finished");
      next_ = 0;
    }
    LogRecord r = records_[next_++];
    r.sample.ts = t;
    return r;
  }

  std::size_t position() const noexcept { return next_; }

private:
  std::vector<LogRecord> records_;
  bool cycle_ = false;
  std::size_t next_ = 0;
};

} // namespace semo

#endif // SEMO__SOURCES_HPP_
