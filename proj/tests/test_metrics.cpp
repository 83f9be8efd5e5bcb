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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "hpmstack/metrics.hpp"

using namespace hpmstack;

namespace
{

  // The reference CoreMark/CVA6 run.
  const std::map<std::string, uint64_t> coremark_counts = {
    {"ariane_branch_jump", 236'011'286},  {"ariane_call", 5'312'578},
    {"ariane_mis_predict", 44'038'701},   {"ariane_ret", 1'406'812},
    {"ariane_dtlb_miss", 1'118},          {"ariane_itlb_miss", 6'869'722},
    {"ariane_l1_dcache_miss", 2'786'559}, {"ariane_l1_icache_miss", 8'443'755},
    {"ariane_load", 229'104'327},         {"ariane_store", 64'628'214},
    {"ariane_exception", 22'486},         {"ariane_exception_ret", 22'486},
    {"ariane_if_empty", 239'773'306},     {"ariane_sb_full", 9'094'173},
    {"riscv_cycles", 2'368'685'119},      {"riscv_instret", 1'467'339'227},
  };

  // Oracle: percentage points by exact integer arithmetic, rounded half-up
  // to two decimals and returned as 10000 * pp.
  uint64_t pp_times_100_oracle(uint64_t num, uint64_t den)
  {
    // round(num * 10000 / den) half-up, all in integers.
    unsigned __int128 scaled = (unsigned __int128)num * 10000;
    return uint64_t((scaled + den / 2) / den);
  }

}


TEST_CASE("role classification strips vendor prefixes without collisions")
{
  CHECK(metric_role("ariane_branch_jump") == "branch_jump");
  CHECK(metric_role("ARIANE_BRANCH_JUMP") == "branch_jump");
  CHECK(metric_role("riscv_cycles") == "cycles");
  CHECK(metric_role("riscv_instret") == "instret");
  CHECK(metric_role("ariane_ret") == "ret");
  CHECK(metric_role("ariane_exception_ret") == "exception_ret");   // not "ret"
  CHECK(metric_role("ariane_l1_dcache_miss") == "l1_dcache_miss");
  CHECK(metric_role("ariane_itlb_miss") == "itlb_miss");           // not "dtlb_miss"
  CHECK(metric_role("cycles") == "cycles");
  CHECK(metric_role("boom_upload") == std::nullopt);               // no '_' boundary
  CHECK(metric_role("something_else") == std::nullopt);
}

TEST_CASE("reference counts reproduce the reference metrics table")
{
  MetricReport report = compute_metrics(coremark_counts);

  // Frozen two-decimal percentages and four-decimal IPC.
  REQUIRE(report.branch_missrate.has_value());
  CHECK(round_half_up(*report.branch_missrate * 100, 2) == doctest::Approx(18.14).epsilon(1e-12));
  CHECK(round_half_up(*report.l1d_missrate * 100, 2) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(round_half_up(*report.l1i_missrate * 100, 2) == doctest::Approx(0.58).epsilon(1e-12));
  CHECK(round_half_up(*report.sb_full_frac * 100, 2) == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(round_half_up(*report.if_empty_frac * 100, 2) == doctest::Approx(10.12).epsilon(1e-12));
  CHECK(round_half_up(*report.ipc, 4) == doctest::Approx(0.6195).epsilon(1e-12));
  CHECK(round_half_up(*report.dtlb_missrate * 100, 2) == doctest::Approx(0.00).epsilon(1e-12));
  CHECK(round_half_up(*report.itlb_missrate * 100, 2) == doctest::Approx(0.47).epsilon(1e-12));

  CHECK(report.lines.size() == 8);
  CHECK(report.notes.empty());

  std::string table = format_metrics(report);
  CHECK(table.find("Branch MissRate") != std::string::npos);
  CHECK(table.find("18.14%") != std::string::npos);
  CHECK(table.find("0.6195") != std::string::npos);
  CHECK(table.find("10.12%") != std::string::npos);
}

TEST_CASE("metric arithmetic matches the arbitrary-precision oracle within rounding")
{
  MetricReport report = compute_metrics(coremark_counts);

  auto check_pp = [](double value, uint64_t num, uint64_t den) {
    uint64_t oracle = pp_times_100_oracle(num, den);
    double computed = round_half_up(value * 100, 2) * 100;   // pp * 100
    // Within 0.005 percentage points means within 0.5 units of pp*100.
    CHECK(std::abs(computed - double(oracle)) <= 0.5 + 1e-9);
  };

  check_pp(*report.branch_missrate, 44'038'701, 236'011'286ull + 5'312'578 + 1'406'812);
  check_pp(*report.l1d_missrate, 2'786'559, 229'104'327ull + 64'628'214);
  check_pp(*report.l1i_missrate, 8'443'755, 1'467'339'227);
  check_pp(*report.sb_full_frac, 9'094'173, 2'368'685'119);
  check_pp(*report.if_empty_frac, 239'773'306, 2'368'685'119);
  check_pp(*report.dtlb_missrate, 1'118, 229'104'327ull + 64'628'214);
  check_pp(*report.itlb_missrate, 6'869'722, 1'467'339'227);

  // IPC against the same style of oracle at 4 decimals.
  unsigned __int128 ipc_scaled = (unsigned __int128)1'467'339'227 * 10000;
  uint64_t ipc_oracle = uint64_t((ipc_scaled + 2'368'685'119ull / 2) / 2'368'685'119ull);
  CHECK(uint64_t(round_half_up(*report.ipc, 4) * 10000 + 0.5) == ipc_oracle);
}

TEST_CASE("randomized counts: computed ratios match exact rational arithmetic")
{
  testutil::Rng rng(0x4E7);
  for (int round = 0; round < 2000; ++round)
    {
      uint64_t cycles = rng.below(1'000'000'000) + 1;
      uint64_t instret = rng.below(cycles) + 1;
      uint64_t sb = rng.below(cycles);
      auto report = compute_metrics({{"cycles", cycles}, {"instret", instret}, {"sb_full", sb}});

      REQUIRE(report.ipc.has_value());
      REQUIRE(report.sb_full_frac.has_value());
      CHECK(*report.ipc == doctest::Approx(double(instret) / double(cycles)).epsilon(1e-12));

      uint64_t oracle = pp_times_100_oracle(sb, cycles);
      double computed = round_half_up(*report.sb_full_frac * 100, 2) * 100;
      CHECK(std::abs(computed - double(oracle)) <= 0.5 + 1e-9);

      CHECK(*report.sb_full_frac >= 0.0);
      CHECK(*report.sb_full_frac <= 1.0);
      CHECK(*report.ipc > 0.0);
    }
}

TEST_CASE("missing or zero denominators omit the metric with a note")
{
  auto empty = compute_metrics({});
  CHECK(empty.lines.empty());
  CHECK(empty.notes.size() == 8);

  auto zeros = compute_metrics({{"cycles", 0}, {"instret", 0}});
  CHECK(not zeros.ipc.has_value());
  bool found = false;
  for (const auto& note : zeros.notes)
    if (note.find("Instructions Per Cycle") != std::string::npos and
        note.find("zero denominator") != std::string::npos)
      found = true;
  CHECK(found);

  // Partial counts: only the computable rows appear.
  auto partial = compute_metrics({{"cycles", 100}, {"instret", 50}, {"if_empty", 10}});
  CHECK(partial.ipc == doctest::Approx(0.5));
  CHECK(partial.if_empty_frac == doctest::Approx(0.1));
  CHECK(not partial.branch_missrate.has_value());
}

TEST_CASE("boundary: mispredictions equal to all branch events give 100.00%")
{
  auto report = compute_metrics({{"mis_predict", 300},
                                 {"branch_jump", 100},
                                 {"call", 100},
                                 {"ret", 100}});
  REQUIRE(report.branch_missrate.has_value());
  CHECK(round_half_up(*report.branch_missrate * 100, 2) == doctest::Approx(100.00));
  std::string table = format_metrics(report);
  CHECK(table.find("100.00%") != std::string::npos);
}
