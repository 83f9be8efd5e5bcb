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

#include "hpmstack/metrics.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hpmstack
{

namespace
{

  // Longest roles first so ariane_exception_ret never classifies as "ret"
  // and riscv_instret never classifies as "instret"-vs-"ret" wrongly.
  constexpr std::array<std::string_view, 16> roles = {
    "l1_dcache_miss", "l1_icache_miss", "exception_ret",
    "branch_jump", "mis_predict",
    "dtlb_miss", "itlb_miss", "exception",
    "if_empty", "sb_full", "instret", "cycles",
    "store", "load", "call", "ret",
  };

  std::string to_lower(std::string_view s)
  {
    std::string out(s);
    for (char& c : out)
      c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  struct RoleCounts
  {
    std::map<std::string, uint64_t> by_role;

    std::optional<uint64_t> get(std::string_view role) const
    {
      auto it = by_role.find(std::string(role));
      if (it == by_role.end())
        return std::nullopt;
      return it->second;
    }

    std::optional<uint64_t> sum(std::initializer_list<std::string_view> parts) const
    {
      uint64_t total = 0;
      for (auto part : parts)
        {
          auto v = get(part);
          if (not v)
            return std::nullopt;
          total += *v;
        }
      return total;
    }
  };

}


std::optional<std::string>
metric_role(std::string_view event_name)
{
  std::string name = to_lower(event_name);
  for (auto role : roles)
    {
      if (name == role)
        return std::string(role);
      if (name.size() > role.size() + 1 and name.ends_with(role) and
          name[name.size() - role.size() - 1] == '_')
        return std::string(role);
    }
  return std::nullopt;
}


double
round_half_up(double value, unsigned decimals)
{
  double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5) / scale;
}


MetricReport
compute_metrics(const std::map<std::string, uint64_t>& counts)
{
  RoleCounts rc;
  for (const auto& [name, count] : counts)
    if (auto role = metric_role(name))
      rc.by_role[*role] += count;

  MetricReport report;

  auto ratio = [&](std::optional<uint64_t> num, std::optional<uint64_t> den,
                   const char* label, const char* events,
                   std::optional<double>& slot, bool percent) {
    if (not num or not den)
      {
        report.notes.push_back(std::string(label) + ": required events not monitored");
        return;
      }
    if (*den == 0)
      {
        report.notes.push_back(std::string(label) + ": zero denominator");
        return;
      }
    double value = double(*num) / double(*den);
    slot = value;
    report.lines.push_back(MetricLine{label, value, percent, events});
  };

  ratio(rc.get("mis_predict"), rc.sum({"branch_jump", "call", "ret"}),
        "Branch MissRate", "Mispredictions / Branches, Calls, Returns",
        report.branch_missrate, true);
  ratio(rc.get("l1_dcache_miss"), rc.sum({"load", "store"}),
        "L1D MissRate", "L1D Misses / Loads, Stores",
        report.l1d_missrate, true);
  ratio(rc.get("l1_icache_miss"), rc.get("instret"),
        "L1I MissRate", "L1I Misses / Instructions",
        report.l1i_missrate, true);
  ratio(rc.get("sb_full"), rc.get("cycles"),
        "ScoreBoard Full (cycles)", "ScoreBoard Full Cycles / Cycles",
        report.sb_full_frac, true);
  ratio(rc.get("if_empty"), rc.get("cycles"),
        "Instruction Fetch Empty (cycles)", "IF Empty Cycles / Cycles",
        report.if_empty_frac, true);
  ratio(rc.get("instret"), rc.get("cycles"),
        "Instructions Per Cycle", "Instructions / Cycles",
        report.ipc, false);
  ratio(rc.get("dtlb_miss"), rc.sum({"load", "store"}),
        "Translation MissRate (Data)", "Data TLB Misses / Loads, Stores",
        report.dtlb_missrate, true);
  ratio(rc.get("itlb_miss"), rc.get("instret"),
        "Translation MissRate (Instructions)", "Instructions TLB Misses / Instructions",
        report.itlb_missrate, true);

  return report;
}


std::string
format_metrics(const MetricReport& report)
{
  std::ostringstream os;
  os << "Computed metrics:\n";
  for (const auto& line : report.lines)
    {
      char value[32];
      if (line.is_percent)
        std::snprintf(value, sizeof value, "%.2f%%", round_half_up(line.value * 100.0, 2));
      else
        std::snprintf(value, sizeof value, "%.4f", round_half_up(line.value, 4));

      char buf[160];
      std::snprintf(buf, sizeof buf, "  %-36s %8s   %s\n",
                    line.label.c_str(), value, line.events.c_str());
      os << buf;
    }
  for (const auto& note : report.notes)
    os << "  (" << note << ")\n";
  return os.str();
}

}
