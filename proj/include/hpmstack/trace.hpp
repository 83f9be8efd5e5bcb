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
#include <string>
#include <vector>

#include "hpmstack/platform.hpp"

namespace hpmstack
{

  /// One step of a synthetic workload: how many cycles and retired
  /// instructions elapsed, plus per-event-code occurrence counts.
  struct TraceSlice
  {
    uint64_t cycles = 0;
    uint64_t instructions = 0;
    std::map<uint64_t, uint64_t> deltas;   // event code -> occurrences
  };

  constexpr unsigned default_issue_bound = 8;

  /// Enforce the slice sanity bounds (cycles >= 1, instructions within the
  /// issue bound). Throws ValidationError.
  void validate(const TraceSlice& slice, unsigned issue_bound = default_issue_bound);

  /// Parse the line-oriented trace format:
  ///   cycles=<n> instret=<n> [<0xCODE>:<n>]*
  /// '#' starts a comment, blank lines are skipped. Throws ParseError with a
  /// line number, ValidationError via validate().
  std::vector<TraceSlice> parse_trace(const std::string& text,
                                      unsigned issue_bound = default_issue_bound);

  std::vector<TraceSlice> load_trace(const std::string& path,
                                     unsigned issue_bound = default_issue_bound);

  /// Deterministic CVA6/CoreMark workload: the requested number of slices
  /// whose per-column sums equal the reference run's totals exactly (even
  /// split, remainders folded into the final slice). Event codes follow the
  /// shipped CVA6 catalog. slices must be >= 1.
  std::vector<TraceSlice> coremark_cva6_trace(uint64_t slices);

}
