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

#include "segcalib/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace segcalib
{

struct HuberDeltas
{
  double translation_m{0.10};
  double rotation_deg{0.5};
};

/// Calibration error between an estimate and a reference. Huber columns report sqrt(2 h(x))
/// so they share units with the L2 columns.
struct ErrorReport
{
  double trans_l2{0.0};
  double rot_l2{0.0};
  double trans_huber{0.0};
  double rot_huber{0.0};
  std::vector<ErrorReport> trials;
};

/// h(x) = x^2 / 2 for x <= delta, delta (x - delta / 2) otherwise.
double huber(double x, double delta);

/// sqrt(2 h(x)): identity below delta, sub-linear above.
double huber_distance(double x, double delta);

ErrorReport extrinsic_error(
  const Extrinsic & estimate, const Extrinsic & reference, const HuberDeltas & deltas = {});

/// Field-wise arithmetic mean; keeps the inputs as `trials`. Throws EmptyInput.
ErrorReport aggregate(std::span<const ErrorReport> reports);

/// Aligned text table: translation in cm, rotation in degrees, L2 and Huber columns.
std::string format_error_table(const ErrorReport & report, const std::string & label);

}  // namespace segcalib
