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

#include "hpmstack/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hpmstack
{

namespace
{

  std::string to_lower(std::string_view s)
  {
    std::string out(s);
    for (char& c : out)
      c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  // The generic event names perf predefines, listed regardless of platform
  // support.
  constexpr std::string_view generic_hardware_events[] = {
    "branch-instructions OR branches",
    "branch-misses",
    "bus-cycles",
    "cache-misses",
    "cache-references",
    "cpu-cycles OR cycles",
    "instructions",
    "ref-cycles",
    "stalled-cycles-backend OR idle-cycles-backend",
    "stalled-cycles-frontend OR idle-cycles-frontend",
  };

  constexpr std::string_view generic_software_events[] = {
    "alignment-faults",
    "context-switches OR cs",
    "cpu-clock",
    "cpu-migrations OR migrations",
    "emulation-faults",
    "major-faults",
    "minor-faults",
    "page-faults OR faults",
    "task-clock",
  };

  constexpr std::string_view generic_cache_events[] = {
    "L1-dcache-load-misses",
    "L1-dcache-loads",
    "L1-dcache-store-misses",
    "L1-dcache-stores",
    "L1-icache-load-misses",
    "L1-icache-loads",
    "branch-load-misses",
    "branch-loads",
    "dTLB-load-misses",
    "dTLB-loads",
    "iTLB-load-misses",
    "iTLB-loads",
  };

  void print_generic(std::ostream& os, std::string_view name, std::string_view kind)
  {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-48s [%s]\n", std::string(name).c_str(),
                  std::string(kind).c_str());
    os << buf;
  }

  uint64_t scaled_count(const EventCounts& counts)
  {
    if (counts.time_running == 0)
      return 0;
    if (counts.time_running >= counts.time_enabled)
      return counts.count;
    unsigned __int128 scaled =
      (unsigned __int128)counts.count * counts.time_enabled / counts.time_running;
    return scaled > ~uint64_t(0) ? ~uint64_t(0) : uint64_t(scaled);
  }

}


EventCatalog
load_catalog_for(const PlatformDescription& platform,
                 const std::string& mapfile_path,
                 const std::string& events_root)
{
  CpuId id = derive_cpu_id(platform.marchid, platform.mimpid);
  auto entries = load_mapfile(mapfile_path);
  for (const auto& entry : entries)
    if (entry.cpu_id == id)
      {
        auto dir = std::filesystem::path(events_root) / entry.events_dirname;
        return load_event_dir(dir.string(), platform);
      }

  char buf[64];
  std::snprintf(buf, sizeof buf, "no mapfile row for CPU ID 0x%X", id.id);
  throw UnknownCpu(buf);
}


std::string
cmd_list(const PlatformDescription& platform, const EventCatalog& catalog)
{
  (void)platform;
  std::ostringstream os;
  os << "List of pre-defined events (to be used in -e):\n\n";
  for (auto name : generic_hardware_events)
    print_generic(os, name, "Hardware event");
  os << '\n';
  for (auto name : generic_software_events)
    print_generic(os, name, "Software event");
  os << '\n';
  for (auto name : generic_cache_events)
    print_generic(os, name, "Hardware cache event");

  // Catalog events grouped by source file stem.
  std::map<std::string, std::vector<const EventDescriptor*>> groups;
  for (const auto& event : catalog.events())
    groups[event.group].push_back(&event);

  for (const auto& [group, events] : groups)
    {
      os << '\n' << group << ":\n";
      for (const EventDescriptor* event : events)
        {
          os << "  " << to_lower(event->name) << '\n';
          if (not event->brief.empty())
            os << "       [" << event->brief << "]\n";
        }
    }
  return os.str();
}


std::vector<std::string>
all_event_specs(const EventCatalog& catalog)
{
  std::vector<const EventDescriptor*> events;
  for (const auto& event : catalog.events())
    events.push_back(&event);
  std::stable_sort(events.begin(), events.end(),
                   [](const EventDescriptor* a, const EventDescriptor* b) {
                     return std::tie(a->group, a->name) < std::tie(b->group, b->name);
                   });

  std::vector<std::string> specs;
  for (const EventDescriptor* event : events)
    specs.push_back(to_lower(event->name));
  return specs;
}


StatResult
run_stat(PmuState& pmu,
         const EventCatalog& catalog,
         const std::vector<std::string>& specs,
         const std::vector<TraceSlice>& trace,
         const StatOptions& options)
{
  StatResult result;
  EventScheduler scheduler(pmu, options.mux_quantum);

  struct Opened
  {
    size_t result_idx;
    EventHandle handle;
  };
  std::vector<Opened> opened;

  for (const auto& spec : specs)
    {
      StatEventResult ev;
      ev.spec = spec;
      try
        {
          ResolvedEvent resolved = resolve(catalog, spec);
          ev.name = resolved.name;
          EventHandle handle = scheduler.open(resolved.event_code, resolved.counter_map);
          scheduler.enable(handle);
          ev.ok = true;
          opened.push_back(Opened{result.events.size(), handle});
        }
      catch (const std::exception& e)
        {
          ev.ok = false;
          ev.error = e.what();
          result.any_error = true;
        }
      result.events.push_back(std::move(ev));
    }

  uint64_t now = 0;
  for (const auto& slice : trace)
    {
      pmu.advance(slice);
      now += slice.cycles;
      scheduler.multiplex_tick(now);
    }
  result.total_cycles = now;

  for (const auto& [idx, handle] : opened)
    {
      StatEventResult& ev = result.events[idx];
      EventState state = scheduler.state_of(handle);
      if (state == EventState::Running or state == EventState::Enabled)
        scheduler.disable(handle);
      ev.counts = scheduler.read(handle);
      ev.scaled_count = scaled_count(ev.counts);
      ev.scale = ev.counts.time_enabled == 0
                   ? 1.0
                   : double(ev.counts.time_running) / double(ev.counts.time_enabled);
      scheduler.close(handle);
    }

  double hz = options.clock_mhz * 1e6;
  result.elapsed_sec = hz > 0 ? double(result.total_cycles) / hz : 0.0;
  result.user_sec = result.elapsed_sec;   // no OS model: all cycles are user time
  result.sys_sec = 0.0;

  if (options.with_metrics)
    {
      std::map<std::string, uint64_t> counts;
      for (const auto& ev : result.events)
        if (ev.ok)
          counts[ev.name] += ev.scaled_count;
      result.metrics = compute_metrics(counts);
    }
  return result;
}


std::string
format_stat(const StatResult& result, const StatOptions& options)
{
  std::ostringstream os;
  os << "\n Performance counter stats for '" << options.workload_label << "':\n\n";

  for (const auto& ev : result.events)
    {
      if (not ev.ok)
        {
          os << "   <not supported>  " << ev.spec << "  (" << ev.error << ")\n";
          continue;
        }
      char buf[128];
      std::snprintf(buf, sizeof buf, "%18llu", (unsigned long long)ev.scaled_count);
      os << buf << "  " << to_lower(ev.name);
      if (ev.counts.time_running < ev.counts.time_enabled)
        {
          std::snprintf(buf, sizeof buf, "  (%.2f%%)", ev.scale * 100.0);
          os << buf;
        }
      if (options.raw)
        {
          std::snprintf(buf, sizeof buf, "  [raw %llu enabled %llu running %llu]",
                        (unsigned long long)ev.counts.count,
                        (unsigned long long)ev.counts.time_enabled,
                        (unsigned long long)ev.counts.time_running);
          os << buf;
        }
      os << '\n';
    }

  char line[80];
  std::snprintf(line, sizeof line, "\n %17.9f seconds time elapsed\n", result.elapsed_sec);
  os << line;
  std::snprintf(line, sizeof line, "\n %17.9f seconds user\n", result.user_sec);
  os << line;
  std::snprintf(line, sizeof line, " %17.9f seconds sys\n", result.sys_sec);
  os << line;

  if (not result.metrics.lines.empty() or not result.metrics.notes.empty())
    os << '\n' << format_metrics(result.metrics);
  return os.str();
}


std::string
format_stat_json(const StatResult& result, const StatOptions& options)
{
  nlohmann::json doc;
  doc["workload"] = options.workload_label;
  doc["total_cycles"] = result.total_cycles;
  doc["elapsed_sec"] = result.elapsed_sec;
  doc["user_sec"] = result.user_sec;
  doc["sys_sec"] = result.sys_sec;

  doc["events"] = nlohmann::json::array();
  for (const auto& ev : result.events)
    {
      nlohmann::json entry;
      entry["spec"] = ev.spec;
      if (ev.ok)
        {
          entry["name"] = to_lower(ev.name);
          entry["count"] = ev.scaled_count;
          entry["raw_count"] = ev.counts.count;
          entry["time_enabled"] = ev.counts.time_enabled;
          entry["time_running"] = ev.counts.time_running;
          entry["scale"] = ev.scale;
        }
      else
        entry["error"] = ev.error;
      doc["events"].push_back(std::move(entry));
    }

  auto metric = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  doc["metrics"] = {
    {"branch_missrate", metric(result.metrics.branch_missrate)},
    {"l1d_missrate", metric(result.metrics.l1d_missrate)},
    {"l1i_missrate", metric(result.metrics.l1i_missrate)},
    {"sb_full_frac", metric(result.metrics.sb_full_frac)},
    {"if_empty_frac", metric(result.metrics.if_empty_frac)},
    {"ipc", metric(result.metrics.ipc)},
    {"dtlb_missrate", metric(result.metrics.dtlb_missrate)},
    {"itlb_missrate", metric(result.metrics.itlb_missrate)},
  };
  return doc.dump(2) + "\n";
}

}
