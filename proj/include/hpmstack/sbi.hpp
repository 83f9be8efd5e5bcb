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
#include <functional>
#include <optional>
#include <string_view>

#include "hpmstack/pmu.hpp"

namespace hpmstack
{

  /// "HPM" in ASCII, placed in the experimental extension space.
  constexpr uint32_t hpm_extension_id = 0x0848504D;

  constexpr int64_t sbi_success = 0;
  constexpr int64_t sbi_err_not_supported = -2;
  constexpr int64_t sbi_err_denied = -4;

  /// The two-field return contract of every call. value is the register-width
  /// result bit pattern (low 32 bits on xlen=32 platforms); it is 0 whenever
  /// error is nonzero.
  struct SbiRet
  {
    int64_t value = 0;
    int64_t error = sbi_success;

    bool ok() const { return error == sbi_success; }

    static SbiRet success(uint64_t v)
    { return SbiRet{static_cast<int64_t>(v), sbi_success}; }

    static SbiRet failure(int64_t e)
    { return SbiRet{0, e}; }

    bool operator==(const SbiRet&) const = default;
  };

  /// Extension functions, ids assigned sequentially: selector access,
  /// machine/user counter access, machine/supervisor enable masks, inhibit.
  enum class HpmFunction : uint32_t
  {
    GetMevent = 0,
    SetMevent = 1,
    GetMcounter = 2,
    SetMcounter = 3,
    GetUcounter = 4,
    SetUcounter = 5,
    GetMcounteren = 6,
    SetMcounteren = 7,
    GetScounteren = 8,
    SetScounteren = 9,
    GetMcountinhibit = 10,
    SetMcountinhibit = 11,
  };

  constexpr uint32_t hpm_function_count = 12;

  std::string_view hpm_function_name(HpmFunction fn);
  std::optional<HpmFunction> hpm_function_from_name(std::string_view name);

  struct SbiCall
  {
    uint32_t extension_id = hpm_extension_id;
    uint32_t function_id = 0;
    uint64_t arg0 = 0;
    uint64_t arg1 = 0;
  };

  /// Route one environment call. Unknown extension or function ids return
  /// SBI_ERR_NOT_SUPPORTED; the dispatcher never faults.
  ///
  /// Counter ids: 0=cycle, 1=time, 2=instret, 3..31=hpmcounter. On xlen=32
  /// platforms ids 32..63 address the high 32 bits of counter id-32 (the
  /// counterh pairing); those ids are not supported on xlen=64.
  SbiRet sbi_dispatch(const SbiCall& call, PmuState& state);

  inline SbiRet hpm_call(PmuState& state, HpmFunction fn,
                         uint64_t arg0 = 0, uint64_t arg1 = 0)
  {
    return sbi_dispatch(SbiCall{hpm_extension_id, uint32_t(fn), arg0, arg1}, state);
  }

  /// Seam over the call interface so harnesses can interleave work between
  /// the half-reads of read_counter64_rv32.
  using SbiInvoker = std::function<SbiRet(HpmFunction fn, uint64_t arg0, uint64_t arg1)>;

  inline SbiInvoker direct_invoker(PmuState& state)
  {
    return [&state](HpmFunction fn, uint64_t a0, uint64_t a1)
    { return hpm_call(state, fn, a0, a1); };
  }

  /// Assemble a 64-bit machine counter value on an xlen=32 platform from
  /// high/low/high half-reads, retrying (at most 3 attempts) when the low
  /// half overflowed between them. The returned value (full 64 bits) is one
  /// the counter held at some instant during the call window. SBI errors
  /// from the half-reads propagate.
  SbiRet read_counter64_rv32(const SbiInvoker& invoke, unsigned counter_idx);

}
