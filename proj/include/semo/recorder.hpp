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

#ifndef SEMO__RECORDER_HPP_
#define SEMO__RECORDER_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <utility>
#include <variant>
#include <vector>

#include "semo/clock.hpp"
#include "semo/error.hpp"
#include "semo/log_io.hpp"
#include "semo/sources.hpp"
#include "semo/types.hpp"

namespace semo {

struct RecorderConfig {
  std::int64_t interval_s = 60;
  std::filesystem::path out_path;
  /// Stop after this many sampling attempts; unbounded when empty.
  std::optional<std::size_t> max_ticks;

  void validate() const {
    if (interval_s < 1) throw std::invalid_argument("interval_s must be >= 1");
    if (out_path.empty()) throw std::invalid_argument("out_path is empty");
  }
};

/// One reading from `source`, stamped with the clock's current instant.
template <ReadingSource Source, InstantSource Clock>
LogRecord sample_once(Source &source, Clock &clock) {
  return source.read(clock.now());
}

/// Free-function form of LogWriter::append.
inline void append(LogWriter &log, const LogRecord &record) { log.append(record); }

struct History {};
struct Tail {
  std::size_t n;
};
using CurveMode = std::variant<History, Tail>;

struct CurvePoint {
  Instant ts;
  int level_pct;

  bool operator==(const CurvePoint &) const = default;
};

/// (ts, level) projection of a log: the whole history or its last n points.
inline std::vector<CurvePoint> curve_series(std::span<const LogRecord> records,
                                            CurveMode mode = History{}) {
  std::size_t first = 0;
  if (const auto *tail = std::get_if<Tail>(&mode)) {
    first = records.size() > tail->n ? records.size() - tail->n : 0;
  }
  std::vector<CurvePoint> out;
  out.reserve(records.size() - first);
  for (std::size_t i = first; i < records.size(); ++i) {
    out.push_back({records[i].sample.ts, records[i].sample.level_pct});
  }
  return out;
}

struct RunSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;
};

/**
 * @brief The recorder loop.
 *
 * Samples immediately, then once per interval on a fixed grid anchored at
 * the start instant, until `stop` fires, the clock reports a stop, the
 * source is exhausted, or `max_ticks` attempts have been made. A tick whose
 * reading or append fails is reported on `diag` and skipped; IoFailure
 * propagates and ends the loop.
 *
 * Memory use does not depend on the log length: nothing but the last
 * timestamp is retained between ticks.
 */
template <ReadingSource Source, WaitableClock Clock>
RunSummary run_loop(const RecorderConfig &config, Source &source, Clock &clock,
                    std::stop_token stop, std::ostream &diag = std::cerr) {
  config.validate();
  LogWriter log(config.out_path);
  RunSummary summary;
  const auto interval = std::chrono::seconds(config.interval_s);
  Instant next = clock.now();
  std::size_t ticks = 0;

  while (!stop.stop_requested()) {
    ++ticks;
    try {
      log.append(sample_once(source, clock));
      ++summary.written;
    } catch (const Error &e) {
      if (e.code() == Errc::IoFailure) throw;
      if (e.code() == Errc::SourceExhausted) break;
      ++summary.skipped;
      diag << "semo: tick skipped: " << e.what() << '\n';
    }
    if (config.max_ticks && ticks >= *config.max_ticks) break;
    next += interval;
    if (!clock.wait_until(next, stop)) break;
  }
  return summary;
}

} // namespace semo

#endif // SEMO__RECORDER_HPP_
