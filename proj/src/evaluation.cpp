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

#include "segcalib/evaluation.hpp"

#include "segcalib/errors.hpp"

#include <cmath>
#include <cstdio>

namespace segcalib
{

double huber(double x, double delta)
{
  return x <= delta ? 0.5 * x * x : delta * (x - 0.5 * delta);
}

double huber_distance(double x, double delta)
{
  return std::sqrt(2.0 * huber(x, delta));
}

ErrorReport extrinsic_error(
  const Extrinsic & estimate, const Extrinsic & reference, const HuberDeltas & deltas)
{
  ErrorReport r;
  r.trans_l2 = (estimate.translation() - reference.translation()).norm();
  r.rot_l2 = rotation_angle_between(estimate, reference);
  r.trans_huber = huber_distance(r.trans_l2, deltas.translation_m);
  r.rot_huber = huber_distance(r.rot_l2, deltas.rotation_deg);
  return r;
}

ErrorReport aggregate(std::span<const ErrorReport> reports)
{
  if (reports.empty()) {
    throw EmptyInput("cannot aggregate zero error reports");
  }
  ErrorReport mean;
  for (const auto & r : reports) {
    mean.trans_l2 += r.trans_l2;
    mean.rot_l2 += r.rot_l2;
    mean.trans_huber += r.trans_huber;
    mean.rot_huber += r.rot_huber;
  }
  const auto n = static_cast<double>(reports.size());
  mean.trans_l2 /= n;
  mean.rot_l2 /= n;
  mean.trans_huber /= n;
  mean.rot_huber /= n;
  for (const auto & r : reports) {
    ErrorReport copy = r;
    copy.trials.clear();
    mean.trials.push_back(copy);
  }
  return mean;
}

std::string format_error_table(const ErrorReport & report, const std::string & label)
{
  char line[256];
  std::string out;
  std::snprintf(
    line, sizeof(line), "%-16s | %12s | %12s | %12s | %12s\n", "run", "L2 |dt| cm",
    "L2 |da| deg", "Huber dt cm", "Huber da deg");
  out += line;
  out += std::string(76, '-') + "\n";
  std::snprintf(
    line, sizeof(line), "%-16s | %12.3f | %12.4f | %12.3f | %12.4f\n", label.c_str(),
    100.0 * report.trans_l2, report.rot_l2, 100.0 * report.trans_huber, report.rot_huber);
  out += line;
  return out;
}

}  // namespace segcalib
