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

#ifndef SEMO__ANALYZER_HPP_
#define SEMO__ANALYZER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semo/csv.hpp"
#include "semo/error.hpp"
#include "semo/nnls.hpp"
#include "semo/types.hpp"

namespace semo {

/// Whether drops are measured with the µAh charge counter or level percent.
enum class CounterMode { Auto, On, Off };

/// A span between two Discharging samples; one regression row.
struct DischargeInterval {
  Instant t_start{};
  Instant t_end{};
  double duration_h = 0.0;
  double drop_pct = 0.0;
  double rate_pct_per_h = 0.0;
  AppSet active; ///< apps listed at t_start

  bool operator==(const DischargeInterval &) const = default;
};

/// Charge (µAh) corresponding to 100%, inferred as charge/level from the
/// Discharging sample with the highest level that carries a counter
/// reading. Earliest sample wins ties.
inline std::optional<double> infer_full_scale_uah(std::span<const LogRecord> records) {
  const BatterySample *best = nullptr;
  for (const auto &r : records) {
    const auto &s = r.sample;
    if (s.status != Status::Discharging || !s.charge_uah || s.level_pct <= 0) continue;
    if (best == nullptr || s.level_pct > best->level_pct) best = &s;
  }
  if (best == nullptr) return std::nullopt;
  return static_cast<double>(*best->charge_uah) * 100.0 / best->level_pct;
}

/**
 * @brief Full-scale charge to use for counter-based drops, or empty when
 * drops are measured in level percent.
 *
 * Auto enables the counter only when every Discharging sample has a
 * reading; On uses it wherever both ends of a pair have one.
 */
inline std::optional<double> counter_full_scale(std::span<const LogRecord> records,
                                                CounterMode mode) {
  if (mode == CounterMode::Off) return std::nullopt;
  auto full = infer_full_scale_uah(records);
  if (!full || *full <= 0.0) return std::nullopt;
  if (mode == CounterMode::Auto) {
    for (const auto &r : records) {
      if (r.sample.status == Status::Discharging && !r.sample.charge_uah)
        return std::nullopt;
    }
  }
  return full;
}

/**
 * @brief Turns a ts-sorted log into discharge intervals.
 *
 * Only pairs of adjacent samples that are both Discharging qualify. A pair
 * whose level (or counter, when in use) rises is an unlogged recharge and is
 * dropped like any charging span. Consecutive intervals that touch in time
 * and share an active set are coalesced.
 *
 * Throws TooFewSamples with fewer than two Discharging samples.
 */
inline std::vector<DischargeInterval> build_intervals(std::span<const LogRecord> records,
                                                      CounterMode mode = CounterMode::Auto) {
  auto usable = std::count_if(records.begin(), records.end(), [](const LogRecord &r) {
    return r.sample.status == Status::Discharging;
  });
  if (usable < 2)
    throw Error(Errc::TooFewSamples,
                std::to_string(usable) + " discharging sample(s), need at least 2");

  const auto full_scale = counter_full_scale(records, mode);
  std::vector<DischargeInterval> out;

  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const auto &a = records[i].sample;
    const auto &b = records[i + 1].sample;
    if (a.status != Status::Discharging || b.status != Status::Discharging) continue;
    if (b.ts <= a.ts) continue;
    if (b.level_pct > a.level_pct) continue;

    double drop = 0.0;
    if (full_scale && a.charge_uah && b.charge_uah) {
      if (*b.charge_uah > *a.charge_uah) continue;
      drop = static_cast<double>(*a.charge_uah - *b.charge_uah) / *full_scale * 100.0;
    } else {
      drop = static_cast<double>(a.level_pct - b.level_pct);
    }
    drop = std::max(drop, 0.0);

    const auto &active = records[i].apps;
    if (!out.empty() && out.back().t_end == a.ts && out.back().active == active) {
      auto &prev = out.back();
      prev.t_end = b.ts;
      prev.drop_pct += drop;
    } else {
      out.push_back({a.ts, b.ts, 0.0, drop, 0.0, active});
    }
  }

  for (auto &iv : out) {
    iv.duration_h = static_cast<double>((iv.t_end - iv.t_start).count()) / 3.6e6;
    iv.rate_pct_per_h = iv.drop_pct / iv.duration_h;
  }
  return out;
}

/// Regression design: column 0 is the always-on baseline, column k+1
/// belongs to groups[k].
struct DesignMatrix {
  Eigen::MatrixXd columns;
  std::vector<AppSet> groups;
  AppSet baseline_apps; ///< present in every interval, folded into column 0
};

/**
 * @brief Merges applications that cannot be told apart.
 *
 * Apps with identical interval-membership patterns share a group; apps
 * present in every interval are indistinguishable from the baseline and
 * are folded into it. Groups are ordered by their smallest member name.
 */
inline DesignMatrix merge_identifiability_groups(std::span<const DischargeInterval> intervals) {
  if (intervals.empty()) throw Error(Errc::DegenerateSystem, "no discharge intervals");

  // app -> ascending list of interval indices it is active in
  std::map<std::string, std::vector<std::uint32_t>> membership;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    for (const auto &name : intervals[i].active) {
      membership[name].push_back(static_cast<std::uint32_t>(i));
    }
  }

  DesignMatrix d;
  std::map<std::vector<std::uint32_t>, std::vector<std::string>> by_pattern;
  std::vector<std::string> folded;
  for (auto &[name, rows] : membership) {
    if (rows.size() == intervals.size()) {
      folded.push_back(name);
    } else {
      by_pattern[rows].push_back(name);
    }
  }
  d.baseline_apps = AppSet(std::move(folded));

  std::vector<const std::vector<std::uint32_t> *> patterns;
  for (auto &[rows, names] : by_pattern) {
    d.groups.emplace_back(names);
    patterns.push_back(&rows);
  }
  std::vector<std::size_t> order(d.groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d.groups[a].names().front() < d.groups[b].names().front();
  });

  const auto rows = static_cast<Eigen::Index>(intervals.size());
  d.columns = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(d.groups.size()) + 1);
  d.columns.col(0).setOnes();
  std::vector<AppSet> sorted;
  sorted.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (auto r : *patterns[order[k]]) d.columns(r, static_cast<Eigen::Index>(k) + 1) = 1.0;
    sorted.push_back(std::move(d.groups[order[k]]));
  }
  d.groups = std::move(sorted);
  return d;
}

/// Battery constants for converting pct/h into mW.
struct BatteryConstants {
  double capacity_mah = 0.0;
  double nominal_voltage_mv = 0.0;
};

/// rate/100 × capacity_mah × nominal_voltage_mv/1000.
inline double rate_to_power(double rate_pct_per_h, double capacity_mah,
                            double nominal_voltage_mv) {
  if (!(rate_pct_per_h >= 0.0) || !std::isfinite(rate_pct_per_h))
    throw std::invalid_argument("rate must be finite and non-negative");
  if (!(capacity_mah > 0.0) || !(nominal_voltage_mv > 0.0))
    throw std::invalid_argument("capacity and voltage must be positive");
  return rate_pct_per_h / 100.0 * capacity_mah * nominal_voltage_mv / 1000.0;
}

struct GroupFlags {
  bool inseparable_from_baseline = false;
  /// The design leaves this group's rate non-unique (rank deficiency).
  bool ambiguous = false;

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (inseparable_from_baseline) out.emplace_back("inseparable-from-baseline");
    if (ambiguous) out.emplace_back("ambiguous");
    return out;
  }
  bool operator==(const GroupFlags &) const = default;
};

struct GroupRate {
  AppSet apps;
  double rate_pct_per_h = 0.0;
  std::optional<double> power_mw;
  GroupFlags flags;

  std::string label() const { return apps.join(" + "); }
  bool operator==(const GroupRate &) const = default;
};

struct AttributionResult {
  double baseline_pct_per_h = 0.0;
  std::optional<double> baseline_power_mw;
  std::vector<GroupRate> groups; ///< ordered by smallest member name
  AppSet unobserved;             ///< logged apps absent from every interval
  double residual_rms = 0.0;     ///< duration-weighted
  std::vector<std::size_t> ranking; ///< indices into groups, highest rate first
  std::size_t interval_count = 0;
  bool used_charge_counter = false;

  bool operator==(const AttributionResult &) const = default;
};

struct AttributeOptions {
  CounterMode counter = CounterMode::Auto;
  std::optional<BatteryConstants> battery;
};

/// Rate descending, then smallest member name ascending.
inline std::vector<std::size_t> rank_groups(const std::vector<GroupRate> &groups) {
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  // Rates are compared on a 1e-9 %/h grid so solver round-off does not
  // decide ties.
  auto key = [&](std::size_t i) { return std::llround(groups[i].rate_pct_per_h * 1e9); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key(a) != key(b)) return key(a) > key(b);
    return groups[a].apps.names().front() < groups[b].apps.names().front();
  });
  return order;
}

namespace detail {

// Columns touched by the null space of the weighted Gram matrix.
inline std::vector<bool> ambiguous_columns(const Eigen::MatrixXd &X, const Eigen::VectorXd &w) {
  const Eigen::MatrixXd G = X.transpose() * w.asDiagonal() * X;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  lu.setThreshold(1e-10);
  std::vector<bool> out(static_cast<std::size_t>(X.cols()), false);
  if (lu.rank() == X.cols()) return out;
  Eigen::MatrixXd kernel = lu.kernel();
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    double norm = kernel.col(c).norm();
    if (norm == 0.0) continue;
    for (Eigen::Index j = 0; j < kernel.rows(); ++j) {
      if (std::abs(kernel(j, c)) / norm > 1e-8) out[static_cast<std::size_t>(j)] = true;
    }
  }
  return out;
}

} // namespace detail

/**
 * @brief Per-application drain rates from a recorder log.
 *
 * build_intervals → merge_identifiability_groups → duration-weighted NNLS.
 * Each interval contributes one row: its observed rate, weighted by its
 * length in hours. Apps folded into the baseline are reported as one group
 * carrying the baseline rate and the inseparable-from-baseline flag.
 */
inline AttributionResult attribute(std::span<const LogRecord> records,
                                   const AttributeOptions &options = {}) {
  const auto intervals = build_intervals(records, options.counter);
  if (intervals.empty())
    throw Error(Errc::DegenerateSystem, "no usable discharge intervals");
  const auto design = merge_identifiability_groups(intervals);

  const auto rows = static_cast<Eigen::Index>(intervals.size());
  Eigen::VectorXd y(rows), w(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    y[i] = intervals[static_cast<std::size_t>(i)].rate_pct_per_h;
    w[i] = intervals[static_cast<std::size_t>(i)].duration_h;
  }
  const auto fit = solve_nnls(design.columns, y, w);
  const auto ambiguous = detail::ambiguous_columns(design.columns, w);

  AttributionResult res;
  res.interval_count = intervals.size();
  res.used_charge_counter = counter_full_scale(records, options.counter).has_value();
  res.baseline_pct_per_h = fit.coef[0];
  res.residual_rms = std::sqrt(fit.objective / w.sum());

  if (!design.baseline_apps.empty()) {
    GroupRate g;
    g.apps = design.baseline_apps;
    g.rate_pct_per_h = fit.coef[0];
    g.flags.inseparable_from_baseline = true;
    g.flags.ambiguous = ambiguous[0];
    res.groups.push_back(std::move(g));
  }
  for (std::size_t k = 0; k < design.groups.size(); ++k) {
    GroupRate g;
    g.apps = design.groups[k];
    g.rate_pct_per_h = fit.coef[static_cast<Eigen::Index>(k) + 1];
    g.flags.ambiguous = ambiguous[k + 1];
    res.groups.push_back(std::move(g));
  }
  std::sort(res.groups.begin(), res.groups.end(), [](const GroupRate &a, const GroupRate &b) {
    return a.apps.names().front() < b.apps.names().front();
  });

  if (options.battery) {
    const auto &b = *options.battery;
    res.baseline_power_mw = rate_to_power(res.baseline_pct_per_h, b.capacity_mah, b.nominal_voltage_mv);
    for (auto &g : res.groups)
      g.power_mw = rate_to_power(g.rate_pct_per_h, b.capacity_mah, b.nominal_voltage_mv);
  }

  std::vector<std::string> seen;
  for (const auto &r : records) {
    seen.insert(seen.end(), r.apps.begin(), r.apps.end());
  }
  AppSet attributed;
  for (const auto &iv : intervals) attributed = attributed.united(iv.active);
  res.unobserved = AppSet(std::move(seen)).minus(attributed);

  res.ranking = rank_groups(res.groups);
  return res;
}

inline nlohmann::ordered_json to_json(const GroupRate &g) {
  nlohmann::ordered_json j;
  j["label"] = g.label();
  j["apps"] = g.apps.names();
  j["rate_pct_per_h"] = g.rate_pct_per_h;
  j["power_mw"] = g.power_mw ? nlohmann::ordered_json(*g.power_mw) : nlohmann::ordered_json();
  j["flags"] = g.flags.names();
  return j;
}

/// JSON mirror of AttributionResult; `ranking` lists the groups in rank order.
inline nlohmann::ordered_json to_json(const AttributionResult &r) {
  nlohmann::ordered_json j;
  j["baseline_pct_per_h"] = r.baseline_pct_per_h;
  j["baseline_power_mw"] = r.baseline_power_mw ? nlohmann::ordered_json(*r.baseline_power_mw)
                                               : nlohmann::ordered_json();
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto &g : r.groups) j["groups"].push_back(to_json(g));
  j["unobserved"] = r.unobserved.names();
  j["residual_rms"] = r.residual_rms;
  j["ranking"] = nlohmann::ordered_json::array();
  for (auto idx : r.ranking) j["ranking"].push_back(to_json(r.groups[idx]));
  j["interval_count"] = r.interval_count;
  j["used_charge_counter"] = r.used_charge_counter;
  return j;
}

inline void write_records_csv(std::ostream &out, std::span<const LogRecord> records) {
  out << "ts_ms,level_pct,voltage_mv,temp_dc,charge_uah,status,apps\n";
  for (const auto &r : records) {
    const auto &s = r.sample;
    out << to_ms(s.ts) << ',' << s.level_pct << ',' << s.voltage_mv << ',' << s.temp_dc << ','
        << (s.charge_uah ? std::to_string(*s.charge_uah) : std::string()) << ','
        << to_string(s.status) << ',' << csv::field(r.apps.join(";")) << '\n';
  }
}

/// One row per group, in rank order.
inline void write_result_csv(std::ostream &out, const AttributionResult &r) {
  out << "group,rate_pct_per_h,power_mw,flags\n";
  for (auto idx : r.ranking) {
    const auto &g = r.groups[idx];
    std::string flags;
    for (const auto &f : g.flags.names()) flags += (flags.empty() ? "" : ";") + f;
    out << csv::field(g.apps.join(";")) << ',' << csv::number(g.rate_pct_per_h) << ','
        << (g.power_mw ? csv::number(*g.power_mw) : std::string()) << ',' << csv::field(flags)
        << '\n';
  }
}

namespace detail {

template <class Fn>
void write_file(const std::filesystem::path &path, Fn &&fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

} // namespace detail

inline void export_csv(std::span<const LogRecord> records, const std::filesystem::path &path) {
  detail::write_file(path, [&](std::ostream &out) { write_records_csv(out, records); });
}

inline void export_csv(const AttributionResult &result, const std::filesystem::path &path) {
  detail::write_file(path, [&](std::ostream &out) { write_result_csv(out, result); });
}

} // namespace semo

#endif // SEMO__ANALYZER_HPP_
