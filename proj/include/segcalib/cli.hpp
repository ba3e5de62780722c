// Copyright 2026 The segcalib Authors
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

#pragma once

#include "segcalib/scoring.hpp"

#include <ostream>
#include <string>

namespace segcalib::cli
{

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitNoOverlap = 2;
constexpr int kExitUsage = 64;

/// Entry point behind the `segcalib` binary; subcommands calibrate, score, overlay, synth.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

/// Plain-text, byte-stable rendering of a score report (no timing).
std::string format_score_report(const ScoreReport & report);

}  // namespace segcalib::cli
