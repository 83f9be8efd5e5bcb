// Copyright 2026 The hpmstack Authors
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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hpmstack
{

  /// One computed ratio plus the events it was built from.
  struct MetricLine
  {
    std::string label;
    double value = 0.0;
    bool is_percent = true;   // false -> plain ratio (IPC)
    std::string events;       // "numerator / denominator" note
  };

  struct MetricReport
  {
    std::optional<double> branch_missrate;
    std::optional<double> l1d_missrate;
    std::optional<double> l1i_missrate;
    std::optional<double> sb_full_frac;
    std::optional<double> if_empty_frac;
    std::optional<double> ipc;
    std::optional<double> dtlb_missrate;
    std::optional<double> itlb_missrate;

    std::vector<MetricLine> lines;    // present metrics in display order
    std::vector<std::string> notes;   // omitted metrics and why

    bool empty() const { return lines.empty(); }
  };

  /// Map an event name onto the metric role it feeds (branch_jump, load,
  /// cycles, ...): exact match or longest role suffix on an underscore
  /// boundary, case-insensitive. nullopt for names that feed no metric.
  std::optional<std::string> metric_role(std::string_view event_name);

  /// Compute every ratio whose events are present with nonzero denominators;
  /// the rest are omitted with a note. Counts are keyed by event name (any
  /// vendor prefix) or directly by role.
  MetricReport compute_metrics(const std::map<std::string, uint64_t>& counts);

  /// Render the report as an aligned table (percentages to 2 decimals,
  /// ratios to 4, half-up).
  std::string format_metrics(const MetricReport& report);

  /// Half-up decimal rounding used for metric display.
  double round_half_up(double value, unsigned decimals);

}
