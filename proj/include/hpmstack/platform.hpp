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
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hpmstack
{

  /// A document could not be tokenized or decoded.
  class ParseError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// A document decoded cleanly but violates an invariant.
  class ValidationError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// Static capabilities of one emulated hart: register widths, how many
  /// event counters exist, identity registers, and the optional fixed
  /// event-to-counter bindings of platforms whose counters are hardwired.
  struct PlatformDescription
  {
    unsigned xlen = 64;                  // 32 or 64
    unsigned base_counter_width = 64;    // cycle/time/instret, 1..64 bits
    unsigned event_counter_width = 64;   // mhpmcounter3..31, 0..64 bits (0 = hardwired to zero)
    unsigned num_event_counters = 0;     // 0..29
    uint64_t marchid = 0;
    uint64_t mimpid = 0;

    /// (event code, counter index) pairs; the counter's mhpmevent resets to
    /// the code and becomes read-only.
    std::vector<std::pair<uint64_t, unsigned>> fixed_bindings;

    /// Generic perf event name -> raw event code.
    std::vector<std::pair<std::string, uint64_t>> hardware_event_map;

    /// Cache event name -> raw event code.
    std::vector<std::pair<std::string, uint64_t>> hardware_cache_event_map;

    /// Counters 0 (cycle), 1 (time) and 2 (instret) always exist; event
    /// counters occupy indices 3 .. 3+num_event_counters-1.
    bool counter_implemented(unsigned idx) const
    {
      return idx < 3 or (idx >= 3 and idx < 3 + num_event_counters);
    }

    /// Bit n set for every implemented counter index n.
    uint32_t implemented_counter_mask() const
    {
      uint32_t hpm = num_event_counters == 0 ? 0 : ((uint32_t(1) << num_event_counters) - 1) << 3;
      return hpm | 0x7;
    }

    /// Bound event code of a fixed counter, if any.
    std::optional<uint64_t> fixed_event_for(unsigned counter_idx) const
    {
      for (const auto& [code, idx] : fixed_bindings)
        if (idx == counter_idx)
          return code;
      return std::nullopt;
    }

    unsigned counter_width(unsigned idx) const
    {
      return idx < 3 ? base_counter_width : event_counter_width;
    }

    /// 2^width - 1 for the given counter (0 when the counter is zero-width).
    uint64_t counter_value_mask(unsigned idx) const
    {
      unsigned w = counter_width(idx);
      if (w == 0)
        return 0;
      if (w >= 64)
        return ~uint64_t(0);
      return (uint64_t(1) << w) - 1;
    }

    uint64_t xlen_mask() const
    {
      return xlen == 32 ? 0xFFFFFFFFull : ~uint64_t(0);
    }

    bool operator==(const PlatformDescription&) const = default;
  };

  /// Check every PlatformDescription invariant, naming the violated one.
  void validate(const PlatformDescription& platform);

  /// Parse a platform-description document (key = value lines, '#' comments,
  /// repeated keys for list entries). Throws ParseError / ValidationError.
  PlatformDescription load_platform(const std::string& document);

  /// Same, reading the document from a file.
  PlatformDescription load_platform_file(const std::string& path);

}
