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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpmstack/commands.hpp"

namespace
{

  constexpr int exit_ok = 0;
  constexpr int exit_event_error = 1;
  constexpr int exit_usage = 2;

  std::vector<std::string> split_specs(const std::vector<std::string>& args)
  {
    std::vector<std::string> specs;
    for (const auto& arg : args)
      {
        size_t start = 0;
        while (start <= arg.size())
          {
            size_t comma = arg.find(',', start);
            std::string spec = arg.substr(start, comma - start);
            if (not spec.empty())
              specs.push_back(spec);
            if (comma == std::string::npos)
              break;
            start = comma + 1;
          }
      }
    return specs;
  }

}


int
main(int argc, char** argv)
{
  CLI::App app{"RISC-V hardware-performance-monitoring stack over an emulated hart PMU"};
  app.require_subcommand(1);
  app.fallthrough();   // global options may follow the subcommand

  std::string platform_path = "data/platforms/cva6.platform";
  std::string events_dir = "data/events";
  std::string mapfile_path = "data/events/mapfile.csv";
  app.add_option("--platform", platform_path, "Platform description file")
    ->capture_default_str();
  app.add_option("--events-dir", events_dir, "Root directory of per-CPU event directories")
    ->capture_default_str();
  app.add_option("--mapfile", mapfile_path, "CPU ID to events-directory mapfile (CSV)")
    ->capture_default_str();

  auto* list_cmd = app.add_subcommand("list", "List events available on the platform");

  auto* stat_cmd = app.add_subcommand("stat", "Count events over a trace replay");
  std::vector<std::string> event_args;
  std::string trace_path, builtin;
  uint64_t builtin_slices = 1000;
  bool with_metrics = false, json_output = false, raw_output = false;
  double clock_mhz = 100.0;
  uint64_t mux_quantum = hpmstack::EventScheduler::default_mux_quantum;
  stat_cmd->add_option("-e,--event", event_args,
                       "Event specs (names or rCODE[:mask]), comma-separated or repeated; "
                       "default: the whole catalog");
  auto* trace_opt = stat_cmd->add_option("--trace", trace_path, "Trace file to replay");
  auto* builtin_opt =
    stat_cmd->add_option("--builtin", builtin, "Built-in workload (coremark-cva6)");
  stat_cmd->add_option("--slices", builtin_slices, "Slice count for the built-in workload")
    ->capture_default_str()
    ->check(CLI::PositiveNumber);
  stat_cmd->add_flag("--metrics", with_metrics, "Compute derived metrics");
  stat_cmd->add_flag("--json", json_output, "Machine-readable output");
  stat_cmd->add_flag("--raw", raw_output, "Show raw counts and enabled/running times");
  stat_cmd->add_option("--clock-mhz", clock_mhz, "Clock used to derive time lines")
    ->capture_default_str()
    ->check(CLI::PositiveNumber);
  stat_cmd->add_option("--mux-quantum", mux_quantum, "Multiplex rotation quantum in cycles")
    ->capture_default_str();
  trace_opt->excludes(builtin_opt);

  auto* sbi_cmd = app.add_subcommand("sbi", "Dispatch one HPM extension call against a reset hart");
  std::vector<std::string> sbi_args;
  sbi_cmd->add_option("call", sbi_args, "Function (name or id) and up to two arguments")
    ->expected(-1);

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::CallForHelp& e)
    {
      return app.exit(e);
    }
  catch (const CLI::ParseError& e)
    {
      app.exit(e);
      return exit_usage;
    }

  try
    {
      auto platform = hpmstack::load_platform_file(platform_path);

      if (list_cmd->parsed())
        {
          auto catalog = hpmstack::load_catalog_for(platform, mapfile_path, events_dir);
          for (const auto& warning : catalog.warnings())
            std::cerr << "warning: " << warning << '\n';
          std::cout << hpmstack::cmd_list(platform, catalog);
          return exit_ok;
        }

      if (stat_cmd->parsed())
        {
          std::vector<hpmstack::TraceSlice> trace;
          hpmstack::StatOptions options;
          options.mux_quantum = mux_quantum;
          options.clock_mhz = clock_mhz;
          options.with_metrics = with_metrics;
          options.raw = raw_output;

          if (not builtin.empty())
            {
              if (builtin != "coremark-cva6")
                {
                  std::cerr << "unknown builtin workload: " << builtin << '\n';
                  return exit_usage;
                }
              trace = hpmstack::coremark_cva6_trace(builtin_slices);
              options.workload_label = builtin;
            }
          else if (not trace_path.empty())
            {
              trace = hpmstack::load_trace(trace_path);
              options.workload_label = trace_path;
            }
          else
            {
              std::cerr << "stat needs --trace <file> or --builtin coremark-cva6\n";
              return exit_usage;
            }

          auto catalog = hpmstack::load_catalog_for(platform, mapfile_path, events_dir);
          std::vector<std::string> specs = split_specs(event_args);
          if (specs.empty())
            specs = hpmstack::all_event_specs(catalog);

          hpmstack::PmuState pmu(platform);
          auto result = hpmstack::run_stat(pmu, catalog, specs, trace, options);
          std::cout << (json_output ? hpmstack::format_stat_json(result, options)
                                    : hpmstack::format_stat(result, options));
          return result.any_error ? exit_event_error : exit_ok;
        }

      if (sbi_cmd->parsed())
        {
          // Accept both `sbi <fn> ...` and `sbi call <fn> ...`.
          std::vector<std::string> args = sbi_args;
          if (not args.empty() and args.front() == "call")
            args.erase(args.begin());
          if (args.empty() or args.size() > 3)
            {
              std::cerr << "usage: hpmstack sbi [call] <function> [arg0] [arg1]\n";
              return exit_usage;
            }

          uint32_t function_id = 0;
          if (auto fn = hpmstack::hpm_function_from_name(args[0]))
            function_id = uint32_t(*fn);
          else
            {
              try
                {
                  function_id = uint32_t(std::stoul(args[0], nullptr, 0));
                }
              catch (const std::exception&)
                {
                  std::cerr << "unknown HPM function: " << args[0] << '\n';
                  return exit_usage;
                }
            }

          uint64_t arg0 = 0, arg1 = 0;
          try
            {
              arg0 = args.size() > 1 ? std::stoull(args[1], nullptr, 0) : 0;
              arg1 = args.size() > 2 ? std::stoull(args[2], nullptr, 0) : 0;
            }
          catch (const std::exception&)
            {
              std::cerr << "bad numeric argument for " << args[0] << '\n';
              return exit_usage;
            }

          hpmstack::PmuState pmu(platform);
          auto ret = hpmstack::sbi_dispatch(
            hpmstack::SbiCall{hpmstack::hpm_extension_id, function_id, arg0, arg1}, pmu);
          std::printf("value=0x%llx error=%lld\n", (unsigned long long)ret.value,
                      (long long)ret.error);
          return exit_ok;
        }
    }
  catch (const std::exception& e)
    {
      std::cerr << "error: " << e.what() << '\n';
      return exit_event_error;
    }
  return exit_usage;
}
