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

#ifndef SEMO__CLOCK_HPP_
#define SEMO__CLOCK_HPP_

#include <algorithm>
#include <chrono>
#include <concepts>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <stop_token>

#include "semo/types.hpp"

namespace semo {

/// Anything that can report the current instant.
template <class C>
concept InstantSource = requires(C &c) {
  { c.now() } -> std::convertible_to<Instant>;
};

/// A clock the recorder loop can block on. `wait_until` returns false when
/// the wait ended because a stop was requested.
template <class C>
concept WaitableClock =
    InstantSource<C> && requires(C &c, Instant t, std::stop_token st) {
      { c.wait_until(t, st) } -> std::same_as<bool>;
    };

class SystemClock {
public:
  Instant now() const {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
  }

  bool wait_until(Instant deadline, std::stop_token stop) {
    std::unique_lock lock(mutex_);
    cv_.wait_until(lock, stop, deadline, [] { return false; });
    return !stop.stop_requested();
  }

private:
  std::mutex mutex_;
  std::condition_variable_any cv_;
};

/**
 * @brief Deterministic clock for tests and replays.
 *
 * Waiting jumps straight to the deadline. An optional horizon acts as an
 * external stop signal: a wait whose deadline lies past the horizon moves
 * the clock to the horizon, requests a stop on the attached source and
 * returns false.
 */
class SimulatedClock {
public:
  explicit SimulatedClock(Instant start = Instant{}) : now_(start) {}

  Instant now() const { return now_; }

  void advance(std::chrono::milliseconds d) { now_ += d; }

  void stop_at(Instant horizon, std::stop_source source) {
    horizon_ = horizon;
    source_ = std::move(source);
  }

  bool wait_until(Instant deadline, std::stop_token stop) {
    if (stop.stop_requested()) return false;
    if (horizon_ && deadline > *horizon_) {
      now_ = std::max(now_, *horizon_);
      source_.request_stop();
      return false;
    }
    now_ = std::max(now_, deadline);
    return true;
  }

private:
  Instant now_;
  std::optional<Instant> horizon_;
  std::stop_source source_{std::nostopstate};
};

} // namespace semo

#endif // SEMO__CLOCK_HPP_
