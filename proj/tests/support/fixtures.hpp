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

#ifndef SEMO_TESTS__FIXTURES_HPP_
#define SEMO_TESTS__FIXTURES_HPP_

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "semo/types.hpp"

namespace semo::testing {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("semo-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes a power-supply style source directory, one file per entry.
inline void write_source_tree(const std::filesystem::path &root,
                              const std::map<std::string, std::string> &files) {
  std::filesystem::create_directories(root);
  for (const auto &[name, content] : files) write_file(root / name, content);
}

/// The reference fixture: 80 %, 3.9 V, 31.0 °C, discharging, good health.
inline std::map<std::string, std::string> nominal_source_files() {
  return {{"capacity", "80\n"},      {"voltage_now", "3900000\n"}, {"temp", "310\n"},
          {"status", "Discharging\n"}, {"health", "Good\n"},       {"running_apps", "browser\ngame\nbrowser\n"}};
}

inline LogRecord make_record(std::int64_t ts_ms, int level, Status status = Status::Discharging,
                             AppSet apps = {}, std::optional<std::int64_t> charge = std::nullopt) {
  LogRecord r;
  r.sample.ts = from_ms(ts_ms);
  r.sample.level_pct = level;
  r.sample.voltage_mv = 3800;
  r.sample.temp_dc = 300;
  r.sample.charge_uah = charge;
  r.sample.status = status;
  r.sample.health = Health::Good;
  r.apps = std::move(apps);
  return r;
}

/// Random valid log: strictly increasing timestamps, arbitrary fields.
inline std::vector<LogRecord> random_log(std::mt19937_64 &rng, std::size_t n) {
  static const std::vector<std::string> pool = {"browser", "game", "mail", "maps",
                                                "music",   "a,b",  "quote\"d", "日本語"};
  std::uniform_int_distribution<int> level(0, 100), mv(1, 5000), temp(-200, 800), pick(0, 7);
  std::uniform_int_distribution<std::int64_t> gap(1, 120000), charge(0, 5'000'000);
  std::bernoulli_distribution coin;
  std::vector<LogRecord> out;
  std::int64_t ts = std::uniform_int_distribution<std::int64_t>(0, 1'800'000'000'000)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    ts += gap(rng);
    LogRecord r;
    r.sample.ts = from_ms(ts);
    r.sample.level_pct = level(rng);
    r.sample.voltage_mv = mv(rng);
    r.sample.temp_dc = temp(rng);
    if (coin(rng)) r.sample.charge_uah = charge(rng);
    r.sample.status = static_cast<Status>(pick(rng) % 5);
    r.sample.health = static_cast<Health>(pick(rng) % 6);
    std::vector<std::string> apps;
    for (int k = pick(rng); k > 0; --k) apps.push_back(pool[static_cast<std::size_t>(pick(rng))]);
    r.apps = AppSet(std::move(apps));
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace semo::testing

#endif // SEMO_TESTS__FIXTURES_HPP_
