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

#ifndef SEMO__LOG_IO_HPP_
#define SEMO__LOG_IO_HPP_

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <climits>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semo/error.hpp"
#include "semo/types.hpp"

namespace semo {

// JSONL log format. One record per line, keys in this exact order:
//   {"ts_ms":..,"level_pct":..,"voltage_mv":..,"temp_dc":..,
//    "charge_uah":..|null,"status":"..","health":"..","apps":[..]}

inline nlohmann::ordered_json to_json(const LogRecord &r) {
  nlohmann::ordered_json j;
  j["ts_ms"] = to_ms(r.sample.ts);
  j["level_pct"] = r.sample.level_pct;
  j["voltage_mv"] = r.sample.voltage_mv;
  j["temp_dc"] = r.sample.temp_dc;
  if (r.sample.charge_uah) {
    j["charge_uah"] = *r.sample.charge_uah;
  } else {
    j["charge_uah"] = nullptr;
  }
  j["status"] = std::string(to_string(r.sample.status));
  j["health"] = std::string(to_string(r.sample.health));
  j["apps"] = r.apps.names();
  return j;
}

/// Serializes a record as one log line, without the trailing newline.
inline std::string encode_line(const LogRecord &r) {
  return to_json(r).dump(-1, ' ', false,
                         nlohmann::json::error_handler_t::replace);
}

namespace detail {

inline const nlohmann::json &require(const nlohmann::json &obj,
                                     const char *key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing \"") + key + "\"");
  return *it;
}

inline std::int64_t require_int(const nlohmann::json &obj, const char *key) {
  const auto &v = require(obj, key);
  if (!v.is_number_integer())
    throw std::invalid_argument(std::string("\"") + key + "\" is not an integer");
  return v.get<std::int64_t>();
}

inline int require_int32(const nlohmann::json &obj, const char *key) {
  auto v = require_int(obj, key);
  if (v < INT32_MIN || v > INT32_MAX)
    throw std::invalid_argument(std::string("\"") + key + "\" out of range");
  return static_cast<int>(v);
}

inline std::string require_string(const nlohmann::json &obj, const char *key) {
  const auto &v = require(obj, key);
  if (!v.is_string())
    throw std::invalid_argument(std::string("\"") + key + "\" is not a string");
  return v.get<std::string>();
}

} // namespace detail

/// Parses one log line. Throws std::invalid_argument describing the defect.
inline LogRecord decode_line(std::string_view line) {
  auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("invalid JSON");
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  static constexpr std::string_view kKeys[] = {
      "ts_ms",  "level_pct", "voltage_mv", "temp_dc",
      "charge_uah", "status", "health",     "apps"};
  for (const auto &[key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw std::invalid_argument("unexpected key \"" + key + "\"");
  }

  LogRecord r;
  r.sample.ts = from_ms(detail::require_int(j, "ts_ms"));
  r.sample.level_pct = detail::require_int32(j, "level_pct");
  r.sample.voltage_mv = detail::require_int32(j, "voltage_mv");
  r.sample.temp_dc = detail::require_int32(j, "temp_dc");
  const auto &charge = detail::require(j, "charge_uah");
  if (charge.is_null()) {
    r.sample.charge_uah.reset();
  } else if (charge.is_number_integer()) {
    r.sample.charge_uah = charge.get<std::int64_t>();
  } else {
    throw std::invalid_argument("\"charge_uah\" is neither integer nor null");
  }
  auto status = status_from_string(detail::require_string(j, "status"));
  if (!status) throw std::invalid_argument("unknown status");
  r.sample.status = *status;
  auto health = health_from_string(detail::require_string(j, "health"));
  if (!health) throw std::invalid_argument("unknown health");
  r.sample.health = *health;

  const auto &apps = detail::require(j, "apps");
  if (!apps.is_array()) throw std::invalid_argument("\"apps\" is not an array");
  std::vector<std::string> names;
  names.reserve(apps.size());
  for (const auto &a : apps) {
    if (!a.is_string() || a.get_ref<const std::string &>().empty())
      throw std::invalid_argument("\"apps\" entries must be non-empty strings");
    names.push_back(a.get<std::string>());
  }
  r.apps = AppSet(std::move(names));
  if (!is_valid(r.sample)) throw std::invalid_argument("sample violates invariants");
  return r;
}

/**
 * @brief Loads a whole log.
 *
 * Strict: the first malformed line, or a timestamp that does not strictly
 * increase, aborts with ParseError carrying its 1-based line number.
 */
inline std::vector<LogRecord> load_log(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
      throw Error(Errc::IoFailure, "file not found: " + path.string());
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::vector<LogRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    LogRecord rec;
    try {
      rec = decode_line(line);
    } catch (const std::exception &e) {
      throw Error(Errc::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what(),
                  lineno);
    }
    if (!out.empty() && rec.sample.ts <= out.back().sample.ts) {
      throw Error(Errc::ParseError,
                  path.string() + ":" + std::to_string(lineno) +
                      ": timestamp does not increase",
                  lineno);
    }
    out.push_back(std::move(rec));
  }
  if (in.bad()) throw Error(Errc::IoFailure, "read failed: " + path.string());
  return out;
}

/**
 * @brief Append-only writer owning one log file.
 *
 * Holds an exclusive advisory lock for its lifetime, so at most one writer
 * per file. Each append issues a single write of the whole line followed by
 * fdatasync; a failed write is truncated back so no partial line survives.
 */
class LogWriter {
public:
  explicit LogWriter(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) fail("cannot open");
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      int err = errno;
      ::close(fd_);
      fd_ = -1;
      throw Error(Errc::IoFailure,
                  path_.string() + ": " +
                      (err == EWOULDBLOCK ? std::string("log is locked by another writer")
                                          : std::strerror(err)));
    }
    try {
      last_ts_ = read_last_ts();
    } catch (...) {
      ::close(fd_);
      fd_ = -1;
      throw;
    }
  }

  LogWriter(const LogWriter &) = delete;
  LogWriter &operator=(const LogWriter &) = delete;
  LogWriter(LogWriter &&other) noexcept
      : path_(std::move(other.path_)), fd_(std::exchange(other.fd_, -1)),
        last_ts_(other.last_ts_) {}
  LogWriter &operator=(LogWriter &&) = delete;

  ~LogWriter() {
    if (fd_ >= 0) ::close(fd_);
  }

  const std::filesystem::path &path() const noexcept { return path_; }
  std::optional<Instant> last_ts() const noexcept { return last_ts_; }

  void append(const LogRecord &record) {
    if (last_ts_ && record.sample.ts <= *last_ts_) {
      throw Error(Errc::NonMonotonicTimestamp,
                  "ts " + std::to_string(to_ms(record.sample.ts)) +
                      " does not follow " + std::to_string(to_ms(*last_ts_)));
    }
    std::string line = encode_line(record);
    line.push_back('\n');

    struct stat st {};
    if (::fstat(fd_, &st) != 0) fail("fstat failed");
    std::size_t done = 0;
    while (done < line.size()) {
      ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        int err = errno;
        [[maybe_unused]] int rc = ::ftruncate(fd_, st.st_size);
        errno = err;
        fail("write failed");
      }
      done += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) fail("fdatasync failed");
    last_ts_ = record.sample.ts;
  }

private:
  [[noreturn]] void fail(const char *what) const {
    throw Error(Errc::IoFailure,
                path_.string() + ": " + what + ": " + std::strerror(errno));
  }

  // Reads the final line of an existing log to resume the timestamp check.
  std::optional<Instant> read_last_ts() const {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) fail("fstat failed");
    if (st.st_size == 0) return std::nullopt;

    const off_t chunk = 64 * 1024;
    off_t begin = st.st_size > chunk ? st.st_size - chunk : 0;
    std::string tail(static_cast<std::size_t>(st.st_size - begin), '\0');
    ssize_t n = ::pread(fd_, tail.data(), tail.size(), begin);
    if (n != static_cast<ssize_t>(tail.size())) fail("read failed");
    if (tail.back() != '\n')
      throw Error(Errc::ParseError, path_.string() + ": log ends with a partial line");
    tail.pop_back();
    auto pos = tail.rfind('\n');
    if (pos == std::string::npos && begin != 0)
      throw Error(Errc::ParseError, path_.string() + ": final line too long");
    std::string_view last = pos == std::string::npos
                                ? std::string_view(tail)
                                : std::string_view(tail).substr(pos + 1);
    try {
      return decode_line(last).sample.ts;
    } catch (const std::exception &e) {
      throw Error(Errc::ParseError, path_.string() + ": final line: " + e.what());
    }
  }

  std::filesystem::path path_;
  int fd_ = -1;
  std::optional<Instant> last_ts_;
};

} // namespace semo

#endif // SEMO__LOG_IO_HPP_
