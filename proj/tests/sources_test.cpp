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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "semo/sources.hpp"
#include "support/fixtures.hpp"

namespace semo {
namespace {

using testing::TempDir;
using testing::nominal_source_files;
using testing::write_source_tree;

SimulatedClock clock_at(std::int64_t ms) { return SimulatedClock(from_ms(ms)); }

TEST(ReadBatterySample, ParsesNominalFixture) {
  TempDir dir;
  write_source_tree(dir.path(), nominal_source_files());
  auto clock = clock_at(1234);
  auto s = read_battery_sample(dir.path(), clock);
  EXPECT_EQ(s.level_pct, 80);
  EXPECT_EQ(s.voltage_mv, 3900);
  EXPECT_EQ(s.temp_dc, 310);
  EXPECT_EQ(s.status, Status::Discharging);
  EXPECT_EQ(s.health, Health::Good);
  EXPECT_FALSE(s.charge_uah.has_value());
  EXPECT_EQ(to_ms(s.ts), 1234);
}

TEST(ReadBatterySample, ChargeCounterWhenPresent) {
  TempDir dir;
  auto files = nominal_source_files();
  files["charge_now"] = "1200000\n";
  write_source_tree(dir.path(), files);
  auto clock = clock_at(0);
  EXPECT_EQ(read_battery_sample(dir.path(), clock).charge_uah, 1'200'000);
}

TEST(ReadBatterySample, TrailingNewlineOptional) {
  TempDir dir;
  auto files = nominal_source_files();
  files["capacity"] = "80";
  files["status"] = "Discharging";
  write_source_tree(dir.path(), files);
  auto clock = clock_at(0);
  EXPECT_EQ(read_battery_sample(dir.path(), clock).level_pct, 80);
}

TEST(ReadBatterySample, LevelAboveHundredIsMalformed) {
  TempDir dir;
  auto files = nominal_source_files();
  files["capacity"] = "142\n";
  write_source_tree(dir.path(), files);
  auto clock = clock_at(0);
  try {
    read_battery_sample(dir.path(), clock);
    FAIL() << "expected MalformedField";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::MalformedField);
  }
}

TEST(ReadBatterySample, NonIntegerContentIsMalformed) {
  for (const char *bad : {"abc", "3.9", "", "12 34", "0x10"}) {
    TempDir dir;
    auto files = nominal_source_files();
    files["voltage_now"] = bad;
    write_source_tree(dir.path(), files);
    auto clock = clock_at(0);
    try {
      read_battery_sample(dir.path(), clock);
      FAIL() << "accepted \"" << bad << "\"";
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), Errc::MalformedField) << bad;
    }
  }
}

TEST(ReadBatterySample, MissingMandatoryFile) {
  for (const char *name : {"capacity", "voltage_now", "temp", "status", "health"}) {
    TempDir dir;
    auto files = nominal_source_files();
    files.erase(name);
    write_source_tree(dir.path(), files);
    auto clock = clock_at(0);
    try {
      read_battery_sample(dir.path(), clock);
      FAIL() << "missing " << name << " accepted";
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), Errc::MissingField) << name;
    }
  }
}

TEST(ReadBatterySample, KernelStatusAndHealthStrings) {
  EXPECT_EQ(parse_status_text("Not charging"), Status::NotCharging);
  EXPECT_EQ(parse_status_text("Full"), Status::Full);
  EXPECT_EQ(parse_status_text("Charging"), Status::Charging);
  EXPECT_EQ(parse_status_text("Bogus"), Status::Unknown);
  EXPECT_EQ(parse_health_text("Over voltage"), Health::OverVoltage);
  EXPECT_EQ(parse_health_text("Cold"), Health::Cold);
  EXPECT_EQ(parse_health_text("Unspecified failure"), Health::Unknown);
}

TEST(ReadBatterySample, ZeroVoltageRejectedUnlessStatusUnknown) {
  TempDir dir;
  auto files = nominal_source_files();
  files["voltage_now"] = "0";
  write_source_tree(dir.path(), files);
  auto clock = clock_at(0);
  EXPECT_THROW(read_battery_sample(dir.path(), clock), Error);

  files["status"] = "Weird";
  write_source_tree(dir.path(), files);
  auto s = read_battery_sample(dir.path(), clock);
  EXPECT_EQ(s.status, Status::Unknown);
  EXPECT_EQ(s.voltage_mv, 0);
}

// Every directory yields exactly one of sample / MissingField / MalformedField.
TEST(ReadBatterySample, ParsingIsTotalOverRandomDirectories) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> values = {"80", "-3", "101", "x", "", "3900000", "Good",
                                           "Discharging", " 42 \n", "+7", "99999999999999999999"};
  const std::vector<std::string> names = {"capacity", "voltage_now", "temp", "charge_now",
                                          "status", "health"};
  for (int trial = 0; trial < 300; ++trial) {
    TempDir dir;
    std::map<std::string, std::string> files;
    for (const auto &n : names) {
      if (rng() % 5 == 0) continue;
      files[n] = values[rng() % values.size()];
    }
    write_source_tree(dir.path(), files);
    auto clock = clock_at(0);
    try {
      auto s = read_battery_sample(dir.path(), clock);
      EXPECT_TRUE(is_valid(s));
    } catch (const Error &e) {
      EXPECT_TRUE(e.code() == Errc::MissingField || e.code() == Errc::MalformedField) << e.what();
    }
  }
}

TEST(ReadRunningApps, DedupesAndSorts) {
  TempDir dir;
  testing::write_file(dir / "running_apps", "browser\ngame\nbrowser\n");
  EXPECT_EQ(read_running_apps(dir.path()), (AppSet{"browser", "game"}));
  testing::write_file(dir / "running_apps", "b\na");
  EXPECT_EQ(read_running_apps(dir.path()).names(), (std::vector<std::string>{"a", "b"}));
}

TEST(ReadRunningApps, EmptyFileAndBlankLines) {
  TempDir dir;
  testing::write_file(dir / "running_apps", "");
  EXPECT_TRUE(read_running_apps(dir.path()).empty());
  testing::write_file(dir / "running_apps", "\n\n  \r\nmail\r\n\n");
  EXPECT_EQ(read_running_apps(dir.path()), (AppSet{"mail"}));
}

TEST(ReadRunningApps, MissingListing) {
  TempDir dir;
  try {
    read_running_apps(dir.path());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::MissingField);
  }
}

TEST(ReadRunningApps, OrderInsensitiveAndIdempotent) {
  std::mt19937_64 rng(5);
  std::vector<std::string> lines = {"maps", "music", "mail", "maps", "", "browser", "music"};
  TempDir dir;
  std::optional<AppSet> first;
  for (int i = 0; i < 20; ++i) {
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string text;
    for (const auto &l : lines) text += l + "\n";
    testing::write_file(dir / "running_apps", text);
    auto a = read_running_apps(dir.path());
    EXPECT_EQ(a, read_running_apps(dir.path()));
    if (!first) first = a;
    EXPECT_EQ(a, *first);
  }
}

TEST(AppSetType, NormalizesOnConstruction) {
  AppSet s(std::vector<std::string>{"z", "", "a", "z"});
  EXPECT_EQ(s.names(), (std::vector<std::string>{"a", "z"}));
  EXPECT_TRUE(s.contains("a"));
  EXPECT_FALSE(s.contains(""));
}

TEST(SourceRoot, EnvironmentOverride) {
  ::setenv(kSourceRootEnv, "/tmp/semo-elsewhere", 1);
  EXPECT_EQ(default_source_root(), std::filesystem::path("/tmp/semo-elsewhere"));
  ::unsetenv(kSourceRootEnv);
  EXPECT_EQ(default_source_root(), std::filesystem::path(kDefaultSourceRoot));
}

TEST(FileTreeSource, StampsWithGivenInstant) {
  TempDir dir;
  write_source_tree(dir.path(), nominal_source_files());
  FileTreeSource src(dir.path());
  auto r = src.read(from_ms(777));
  EXPECT_EQ(to_ms(r.sample.ts), 777);
  EXPECT_EQ(r.apps, (AppSet{"browser", "game"}));
}

TEST(FileTreeSource, ConcurrentReaders) {
  TempDir dir;
  write_source_tree(dir.path(), nominal_source_files());
  const FileTreeSource src(dir.path());
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i)
        if (src.read(from_ms(i)).sample.level_pct == 80) ++ok;
    });
  }
  for (auto &t : threads) t.join();
  EXPECT_EQ(ok.load(), 400);
}

TEST(ReplaySource, RestampsAndExhausts) {
  std::vector<LogRecord> logged = {testing::make_record(10, 80, Status::Discharging, {"a"}),
                                   testing::make_record(20, 79, Status::Discharging, {"b"})};
  ReplaySource src(logged);
  auto r = src.read(from_ms(5000));
  EXPECT_EQ(to_ms(r.sample.ts), 5000);
  EXPECT_EQ(r.sample.level_pct, 80);
  EXPECT_EQ(src.read(from_ms(6000)).apps, (AppSet{"b"}));
  try {
    src.read(from_ms(7000));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::SourceExhausted);
  }

  ReplaySource cyc(logged, true);
  cyc.read(from_ms(1));
  cyc.read(from_ms(2));
  EXPECT_EQ(cyc.read(from_ms(3)).sample.level_pct, 80);
}

} // namespace
} // namespace semo
