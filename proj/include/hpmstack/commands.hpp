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
#include <string>
#include <vector>

#include "hpmstack/catalog.hpp"
#include "hpmstack/driver.hpp"
#include "hpmstack/metrics.hpp"
#include "hpmstack/trace.hpp"

namespace hpmstack
{

  /// Look the platform's CPU id up in the mapfile and load its event
  /// directory (events_root/<Events Filename>). Throws UnknownCpu when the
  /// id has no row.
  EventCatalog load_catalog_for(const PlatformDescription& platform,
                                const std::string& mapfile_path,
                                const std::string& events_root);

  /// `list` output: generic hardware/software/cache events, then catalog
  /// events grouped by file stem, names displayed lowercase. Ordering is
  /// deterministic.
  std::string cmd_list(const PlatformDescription& platform, const EventCatalog& catalog);

  struct StatOptions
  {
    uint64_t mux_quantum = EventScheduler::default_mux_quantum;
    double clock_mhz = 100.0;
    bool with_metrics = false;
    bool raw = false;            // add raw count / time columns
    std::string workload_label = "trace";
  };

  struct StatEventResult
  {
    std::string spec;            // as requested
    std::string name;            // resolved name (empty if resolution failed)
    bool ok = false;
    std::string error;
    uint64_t scaled_count = 0;   // count * time_enabled / time_running
    EventCounts counts;          // raw triple
    double scale = 1.0;          // time_running / time_enabled (1 when never multiplexed)
  };

  struct StatResult
  {
    std::vector<StatEventResult> events;
    uint64_t total_cycles = 0;
    double elapsed_sec = 0.0;
    double user_sec = 0.0;
    double sys_sec = 0.0;
    MetricReport metrics;
    bool any_error = false;
  };

  /// Open+enable every spec, replay the trace slice by slice (ticking the
  /// scheduler), disable, read, and scale. Per-event failures are recorded
  /// and the rest still run.
  StatResult run_stat(PmuState& pmu,
                      const EventCatalog& catalog,
                      const std::vector<std::string>& specs,
                      const std::vector<TraceSlice>& trace,
                      const StatOptions& options);

  /// Specs covering the whole catalog, ordered by (group, name); the
  /// default event set for `stat`.
  std::vector<std::string> all_event_specs(const EventCatalog& catalog);

  std::string format_stat(const StatResult& result, const StatOptions& options);

  std::string format_stat_json(const StatResult& result, const StatOptions& options);

}
