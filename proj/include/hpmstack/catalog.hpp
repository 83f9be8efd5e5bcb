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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpmstack/platform.hpp"

namespace hpmstack
{

  class DuplicateCpuId : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };

  class DuplicateEventName : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };

  /// Counter mask excludes every counter the platform implements.
  class InvalidMask : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };

  class UnknownEvent : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  class UnknownCpu : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  class Overflow : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// 32-bit CPU identity: low 24 bits of marchid over low 8 bits of mimpid.
  struct CpuId
  {
    uint32_t id = 0;
    auto operator<=>(const CpuId&) const = default;
  };

  constexpr CpuId derive_cpu_id(uint64_t marchid, uint64_t mimpid)
  {
    return CpuId{uint32_t(((marchid & 0xFFFFFF) << 8) | (mimpid & 0xFF))};
  }

  /// One catalog entry. counter_map bit n SET means counter n cannot count
  /// this event.
  struct EventDescriptor
  {
    std::string name;       // canonical UPPER_SNAKE form
    uint64_t event_code = 0;
    uint32_t counter_map = 0;
    std::string brief;
    std::string public_description;
    std::string group;      // source filename stem
  };

  struct MapfileEntry
  {
    CpuId cpu_id;
    int file_version = 0;     // parsed, currently unused
    std::string events_dirname;
    std::string events_type;  // "core"
  };

  /// Parse the CSV mapfile (CPU ID, File Vers., Events Filename, Events
  /// Type). Header row optional, '#' comments allowed, whitespace around
  /// commas trimmed, hex ids accepted with 0x prefix.
  std::vector<MapfileEntry> parse_mapfile(const std::string& text);
  std::vector<MapfileEntry> load_mapfile(const std::string& path);

  /// Immutable set of event descriptors, ordered by name.
  class EventCatalog
  {
  public:
    EventCatalog() = default;
    explicit EventCatalog(std::vector<EventDescriptor> events);

    const std::vector<EventDescriptor>& events() const { return events_; }
    bool empty() const { return events_.empty(); }
    std::size_t size() const { return events_.size(); }

    /// Case-insensitive lookup, nullptr when absent.
    const EventDescriptor* find(std::string_view name) const;

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  private:
    std::vector<EventDescriptor> events_;
    std::vector<std::string> warnings_;
  };

  /// Load every *.json file in a directory (one object or an array of
  /// objects per file; keys "Event Name", "Event Code", "Counter Mask",
  /// "Brief Description", "Public Description"). Unknown keys produce
  /// warnings. When a platform is given, each event must leave at least one
  /// implemented counter usable.
  EventCatalog load_event_dir(const std::string& dir);
  EventCatalog load_event_dir(const std::string& dir, const PlatformDescription& platform);

  /// Implemented counters the mask permits, ascending.
  std::vector<unsigned> usable_counters(uint32_t counter_map, const PlatformDescription& platform);

  inline std::vector<unsigned> usable_counters(const EventDescriptor& event,
                                               const PlatformDescription& platform)
  {
    return usable_counters(event.counter_map, platform);
  }

  struct ResolvedEvent
  {
    std::string name;        // catalog name, or the raw spec itself
    uint64_t event_code = 0;
    uint32_t counter_map = 0;
  };

  /// Counter map applied to raw specs that do not carry one: base counters
  /// excluded, every HPM counter allowed.
  constexpr uint32_t raw_default_counter_map = 0x00000007;

  /// Resolve an event spec: a catalog name (case-insensitive) or a raw spec
  /// "r<hexcode>[:<mask>]". Throws UnknownEvent.
  ResolvedEvent resolve(const EventCatalog& catalog, std::string_view spec);

  /// Pack (event code, counter map) into the 64-bit raw config:
  /// high 32 bits = counter map, low 32 bits = event code.
  uint64_t encode_raw(uint64_t event_code, uint32_t counter_map);

  std::pair<uint64_t, uint32_t> decode_raw(uint64_t config);

}
