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

#include <signal.h>

#include <chrono>
#include <ctime>
#include <iostream>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"

int main(int argc, char **argv) {
  // SIGINT/SIGTERM are consumed by a watcher thread and turned into a stop
  // request, so `record` finishes its current tick and exits cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::stop_source stop;
  std::jthread watcher([&signals, stop](std::stop_token self) mutable {
    const timespec poll{0, 100'000'000};
    while (!self.stop_requested()) {
      if (sigtimedwait(&signals, nullptr, &poll) > 0) {
        stop.request_stop();
        return;
      }
    }
  });

  std::vector<std::string> args(argv + 1, argv + argc);
  return semo::cli::run(args, std::cout, std::cerr, stop.get_token());
}
