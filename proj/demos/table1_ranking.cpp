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

// Simulates the built-in five-task workload and prints the recovered ranking
// next to the simulated ground truth.

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "semo/semo.hpp"

int main(int argc, char **argv) {
  auto scenario = semo::table1_scenario();
  if (argc > 1) {
    scenario.noise.sigma_mw = std::atof(argv[1]);
    scenario.noise.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  }
  const auto records = semo::simulate(scenario);
  semo::AttributeOptions opts;
  opts.battery = semo::BatteryConstants{scenario.capacity_mah,
                                        static_cast<double>(scenario.nominal_voltage_mv)};
  const auto result = semo::attribute(records, opts);

  std::printf("%-18s %12s %12s\n", "task", "true mW", "estimated mW");
  for (auto idx : result.ranking) {
    const auto &g = result.groups[idx];
    const auto name = g.label();
    std::printf("%-18s %12.1f %12.1f\n", name.c_str(), scenario.apps.at(name), *g.power_mw);
  }
  std::printf("%-18s %12.1f %12.1f\n", "(baseline)", scenario.baseline_mw,
              *result.baseline_power_mw);
  return 0;
}
