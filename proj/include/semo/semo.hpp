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

#ifndef SEMO__SEMO_HPP_
#define SEMO__SEMO_HPP_

#include "semo/analyzer.hpp"
#include "semo/clock.hpp"
#include "semo/error.hpp"
#include "semo/inspector.hpp"
#include "semo/log_io.hpp"
#include "semo/nnls.hpp"
#include "semo/recorder.hpp"
#include "semo/simulator.hpp"
#include "semo/sources.hpp"
#include "semo/types.hpp"

#endif // SEMO__SEMO_HPP_
