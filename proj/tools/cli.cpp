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

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semo/semo.hpp"

namespace semo::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fixed(double v, int width, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%*.*f", width, precision, v);
  return buf;
}

nlohmann::ordered_json sample_json(const BatterySample &s) {
  auto j = to_json(LogRecord{s, {}});
  j.erase("apps");
  return j;
}

CounterMode parse_counter_mode(const std::string &s) {
  if (s == "on") return CounterMode::On;
  if (s == "off") return CounterMode::Off;
  return CounterMode::Auto;
}

struct Streams {
  std::ostream &out;
  std::ostream &err;
};

// --- inspect -------------------------------------------------------------

struct InspectArgs {
  std::string source_root;
  bool json = false;
};

int cmd_inspect(const InspectArgs &a, Streams io) {
  fs::path root = a.source_root.empty() ? default_source_root() : fs::path(a.source_root);
  SystemClock clock;
  auto sample = read_battery_sample(root, clock);
  auto warnings = evaluate(sample);

  if (a.json) {
    json j;
    j["sample"] = sample_json(sample);
    j["warnings"] = json::array();
    for (const auto &w : warnings) {
      j["warnings"].push_back({{"kind", std::string(to_string(w.kind))},
                               {"message", w.message},
                               {"threshold", w.threshold ? json(*w.threshold) : json()}});
    }
    io.out << j.dump(2) << '\n';
  } else {
    io.out << describe(sample);
    for (const auto &w : warnings) io.out << "WARNING " << to_string(w.kind) << ": " << w.message << '\n';
  }
  return warnings.empty() ? kOk : kAttention;
}

// --- record --------------------------------------------------------------

struct RecordArgs {
  std::string out;
  std::int64_t interval_s = 60;
  std::string source_root;
  std::size_t count = 0;
  bool json = false;
};

int cmd_record(const RecordArgs &a, Streams io, std::stop_token stop) {
  RecorderConfig cfg;
  cfg.interval_s = a.interval_s;
  cfg.out_path = a.out;
  if (a.count > 0) cfg.max_ticks = a.count;
  FileTreeSource source(a.source_root.empty() ? default_source_root() : fs::path(a.source_root));
  SystemClock clock;
  auto summary = run_loop(cfg, source, clock, stop, io.err);
  if (a.json) {
    io.out << json{{"out", a.out}, {"written", summary.written}, {"skipped", summary.skipped}}.dump()
           << '\n';
  } else {
    io.err << "semo: recorded " << summary.written << " sample(s), skipped " << summary.skipped
           << " into " << a.out << '\n';
  }
  return kOk;
}

// --- curve ---------------------------------------------------------------

struct CurveArgs {
  std::string log;
  std::optional<std::size_t> tail;
  std::string format = "csv";
  bool json = false;
};

int cmd_curve(const CurveArgs &a, Streams io) {
  auto records = load_log(a.log);
  CurveMode mode = History{};
  if (a.tail) mode = Tail{*a.tail};
  auto series = curve_series(records, mode);
  if (a.json || a.format == "json") {
    json arr = json::array();
    for (const auto &p : series) arr.push_back({{"ts_ms", to_ms(p.ts)}, {"level_pct", p.level_pct}});
    io.out << arr.dump() << '\n';
  } else {
    io.out << "ts_ms,level_pct\n";
    for (const auto &p : series) io.out << to_ms(p.ts) << ',' << p.level_pct << '\n';
  }
  return kOk;
}

// --- analyze / export ----------------------------------------------------

struct AnalysisFlags {
  std::optional<double> capacity_mah;
  std::optional<double> voltage_mv;
  std::string counter = "auto";

  AttributeOptions options() const {
    AttributeOptions o;
    o.counter = parse_counter_mode(counter);
    if (capacity_mah && voltage_mv) o.battery = BatteryConstants{*capacity_mah, *voltage_mv};
    return o;
  }

  void add_to(CLI::App *cmd) {
    auto *cap = cmd->add_option("--capacity-mah", capacity_mah, "Battery capacity for mW conversion")
                    ->check(CLI::PositiveNumber);
    auto *volt = cmd->add_option("--voltage-mv", voltage_mv, "Nominal voltage for mW conversion")
                     ->check(CLI::PositiveNumber);
    cap->needs(volt);
    volt->needs(cap);
    cmd->add_option("--use-charge-counter", counter, "Measure drops with the µAh counter")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();
  }
};

void print_table(const AttributionResult &r, std::ostream &out) {
  out << "rank  rate_pct_per_h    power_mw  group\n";
  for (std::size_t i = 0; i < r.ranking.size(); ++i) {
    const auto &g = r.groups[r.ranking[i]];
    char rank[16];
    std::snprintf(rank, sizeof rank, "%4zu", i + 1);
    out << rank << "  " << fixed(g.rate_pct_per_h, 14, 4) << "  "
        << (g.power_mw ? fixed(*g.power_mw, 10, 1) : std::string(9, ' ') + "-") << "  "
        << g.label();
    auto flags = g.flags.names();
    if (!flags.empty()) {
      out << "  [";
      for (std::size_t k = 0; k < flags.size(); ++k) out << (k ? ", " : "") << flags[k];
      out << ']';
    }
    out << '\n';
  }
  out << "baseline: " << fixed(r.baseline_pct_per_h, 0, 4) << " pct/h";
  if (r.baseline_power_mw) out << " (" << fixed(*r.baseline_power_mw, 0, 1) << " mW)";
  out << '\n';
  out << "unobserved: " << (r.unobserved.empty() ? std::string("none") : r.unobserved.join(", "))
      << '\n';
  out << "residual_rms: " << fixed(r.residual_rms, 0, 4) << " pct/h over " << r.interval_count
      << " interval(s), drops from " << (r.used_charge_counter ? "charge counter" : "level percent")
      << '\n';
}

struct AnalyzeArgs {
  std::string log;
  std::string format = "table";
  bool json = false;
  AnalysisFlags flags;
};

int cmd_analyze(const AnalyzeArgs &a, Streams io) {
  auto records = load_log(a.log);
  auto result = attribute(records, a.flags.options());
  if (a.json || a.format == "json") {
    io.out << to_json(result).dump(2) << '\n';
  } else if (a.format == "csv") {
    write_result_csv(io.out, result);
  } else {
    print_table(result, io.out);
  }
  return kOk;
}

struct ExportArgs {
  std::string log;
  std::string csv;
  bool result = false;
  bool json = false;
  AnalysisFlags flags;
};

int cmd_export(const ExportArgs &a, Streams io) {
  auto records = load_log(a.log);
  std::size_t rows = records.size();
  if (a.result) {
    auto result = attribute(records, a.flags.options());
    rows = result.groups.size();
    export_csv(result, a.csv);
  } else {
    export_csv(records, a.csv);
  }
  if (a.json) {
    io.out << json{{"path", a.csv}, {"rows", rows}}.dump() << '\n';
  } else {
    io.err << "semo: wrote " << rows << " row(s) to " << a.csv << '\n';
  }
  return kOk;
}

// --- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  bool table1 = false;
  std::string out;
  bool force = false;
  bool print_scenario = false;
  std::optional<double> sigma_mw;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

int cmd_simulate(const SimulateArgs &a, Streams io) {
  if (a.table1 == !a.scenario.empty()) {
    io.err << "semo simulate: give exactly one of SCENARIO or --table1\n";
    return kUsage;
  }
  Scenario s = a.table1 ? table1_scenario() : load_scenario(a.scenario);
  if (a.sigma_mw) s.noise.sigma_mw = *a.sigma_mw;
  if (a.seed) s.noise.seed = *a.seed;
  validate(s);

  if (a.print_scenario) {
    io.out << to_json(s).dump(2) << '\n';
    return kOk;
  }
  if (a.out.empty()) {
    io.err << "semo simulate: --out is required\n";
    return kUsage;
  }
  std::error_code ec;
  if (fs::exists(a.out, ec)) {
    if (!a.force) {
      io.err << "semo simulate: " << a.out << " exists (use --force to replace it)\n";
      return kUsage;
    }
    fs::remove(a.out, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot remove " + a.out + ": " + ec.message());
  }

  auto records = simulate(s);
  LogWriter log(a.out);
  for (const auto &r : records) log.append(r);
  if (a.json) {
    io.out << json{{"out", a.out}, {"records", records.size()}}.dump() << '\n';
  } else {
    io.err << "semo: simulated " << records.size() << " record(s) into " << a.out << '\n';
  }
  return kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        std::stop_token stop) {
  CLI::App app{"Battery monitoring and per-application energy attribution", "semo"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  InspectArgs inspect;
  auto *c_inspect = app.add_subcommand("inspect", "Show the battery state and critical-condition warnings");
  c_inspect->add_option("--source-root", inspect.source_root,
                        "Power-supply directory (default: $SEMO_SOURCE_ROOT or " +
                            std::string(kDefaultSourceRoot) + ")");
  c_inspect->add_flag("--json", inspect.json, "Machine-readable output");

  RecordArgs record;
  auto *c_record = app.add_subcommand("record", "Append a sample every interval until interrupted");
  c_record->add_option("--out", record.out, "Log file (JSONL, appended)")->required();
  c_record->add_option("--interval", record.interval_s, "Seconds between samples")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{86400 * 365}))
      ->capture_default_str();
  c_record->add_option("--source-root", record.source_root, "Power-supply directory");
  c_record->add_option("--count", record.count, "Stop after this many samples (0 = unbounded)");
  c_record->add_flag("--json", record.json, "Print a JSON summary on exit");

  CurveArgs curve;
  auto *c_curve = app.add_subcommand("curve", "Emit the battery-level curve of a log");
  c_curve->add_option("LOG", curve.log, "Log file")->required();
  c_curve->add_option("--tail", curve.tail, "Only the last N points (real-time view)");
  c_curve->add_option("--format", curve.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  c_curve->add_flag("--json", curve.json, "Same as --format json");

  AnalyzeArgs analyze;
  auto *c_analyze = app.add_subcommand("analyze", "Rank applications by drain rate");
  c_analyze->add_option("LOG", analyze.log, "Log file")->required();
  c_analyze->add_option("--format", analyze.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  c_analyze->add_flag("--json", analyze.json, "Same as --format json");
  analyze.flags.add_to(c_analyze);

  ExportArgs exp;
  auto *c_export = app.add_subcommand("export", "Write a log (or its attribution) as CSV");
  c_export->add_option("LOG", exp.log, "Log file")->required();
  c_export->add_option("--csv", exp.csv, "Destination CSV file")->required();
  c_export->add_flag("--result", exp.result, "Export the attribution result instead of the records");
  c_export->add_flag("--json", exp.json, "Print a JSON summary");
  exp.flags.add_to(c_export);

  SimulateArgs sim;
  auto *c_sim = app.add_subcommand("simulate", "Generate a synthetic log from a scenario");
  c_sim->add_option("SCENARIO", sim.scenario, "Scenario JSON file");
  c_sim->add_flag("--table1", sim.table1, "Use the built-in five-task scenario");
  c_sim->add_option("--out", sim.out, "Destination log file");
  c_sim->add_flag("--force", sim.force, "Replace an existing --out file");
  c_sim->add_flag("--print-scenario", sim.print_scenario, "Print the scenario JSON and exit");
  c_sim->add_option("--sigma-mw", sim.sigma_mw, "Override noise.sigma_mw")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "Override noise.seed");
  c_sim->add_flag("--json", sim.json, "Print a JSON summary");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, err, err);
    return kUsage;
  }

  Streams io{out, err};
  try {
    if (*c_inspect) return cmd_inspect(inspect, io);
    if (*c_record) return cmd_record(record, io, stop);
    if (*c_curve) return cmd_curve(curve, io);
    if (*c_analyze) return cmd_analyze(analyze, io);
    if (*c_export) return cmd_export(exp, io);
    if (*c_sim) return cmd_simulate(sim, io);
  } catch (const Error &e) {
    err << "semo: " << e.what() << '\n';
    if (e.code() == Errc::TooFewSamples || e.code() == Errc::DegenerateSystem) return kAttention;
    return kUsage;
  } catch (const std::exception &e) {
    err << "semo: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

} // namespace semo::cli
