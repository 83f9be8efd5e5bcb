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

#include "hpmstack/sbi.hpp"

#include <array>

namespace hpmstack
{

namespace
{

  constexpr std::array<std::string_view, hpm_function_count> function_names = {
    "hpm_get_mevent",        "hpm_set_mevent",
    "hpm_get_mcounter",      "hpm_set_mcounter",
    "hpm_get_ucounter",      "hpm_set_ucounter",
    "hpm_get_mcounteren",    "hpm_set_mcounteren",
    "hpm_get_scounteren",    "hpm_set_scounteren",
    "hpm_get_mcountinhibit", "hpm_set_mcountinhibit",
  };

  SbiRet ok_masked(const PmuState& state, uint64_t value)
  {
    return SbiRet::success(value & state.platform().xlen_mask());
  }

  // Counter id decoding: 0..31 as-is; on xlen=32, 32..63 address the high
  // half of id-32.
  struct CounterRef
  {
    unsigned idx;
    bool high;
  };

  std::optional<CounterRef> decode_counter_id(const PmuState& state, uint64_t id)
  {
    const auto& platform = state.platform();
    if (id < 32)
      {
        if (not platform.counter_implemented(unsigned(id)))
          return std::nullopt;
        return CounterRef{unsigned(id), false};
      }
    if (platform.xlen == 32 and id < 64)
      {
        unsigned idx = unsigned(id - 32);
        if (not platform.counter_implemented(idx))
          return std::nullopt;
        return CounterRef{idx, true};
      }
    return std::nullopt;
  }

  SbiRet get_event(PmuState& state, uint64_t idx)
  {
    if (idx < 3 or idx > 31 or not state.platform().counter_implemented(unsigned(idx)))
      return SbiRet::failure(sbi_err_not_supported);
    return ok_masked(state, state.event_selector(unsigned(idx)));
  }

  SbiRet set_event(PmuState& state, uint64_t idx, uint64_t event_code)
  {
    if (idx < 3 or idx > 31 or not state.platform().counter_implemented(unsigned(idx)))
      return SbiRet::failure(sbi_err_not_supported);
    if (state.platform().fixed_event_for(unsigned(idx)))
      return SbiRet::failure(sbi_err_denied);
    state.csr_write(mhpmevent_csr(unsigned(idx)), event_code, Privilege::Machine);
    return SbiRet::success(0);
  }

  SbiRet get_counter(PmuState& state, uint64_t id)
  {
    auto ref = decode_counter_id(state, id);
    if (not ref)
      return SbiRet::failure(sbi_err_not_supported);
    uint64_t value = state.counter_value(ref->idx);
    if (ref->high)
      value >>= 32;
    return ok_masked(state, value);
  }

  SbiRet set_counter(PmuState& state, uint64_t id, uint64_t value)
  {
    auto ref = decode_counter_id(state, id);
    if (not ref)
      return SbiRet::failure(sbi_err_not_supported);
    if (ref->idx == 1)
      return SbiRet::failure(sbi_err_denied);   // time is not writable

    uint64_t next = value;
    if (state.platform().xlen == 32)
      {
        uint64_t current = state.counter_value(ref->idx);
        if (ref->high)
          next = (current & 0xFFFFFFFFull) | ((value & 0xFFFFFFFFull) << 32);
        else
          next = (current & ~0xFFFFFFFFull) | (value & 0xFFFFFFFFull);
      }
    Csr csr = ref->idx == 0 ? Csr::Mcycle
            : ref->idx == 2 ? Csr::Minstret
                            : mhpmcounter_csr(ref->idx);
    state.csr_write(csr, next, Privilege::Machine);
    return SbiRet::success(0);
  }

}


std::string_view
hpm_function_name(HpmFunction fn)
{
  return function_names.at(uint32_t(fn));
}


std::optional<HpmFunction>
hpm_function_from_name(std::string_view name)
{
  for (uint32_t i = 0; i < hpm_function_count; ++i)
    if (function_names[i] == name)
      return HpmFunction(i);
  // The counter accessors are also known by their m/u and m/s shorthands.
  if (name == "hpm_get_counter")
    return HpmFunction::GetMcounter;
  if (name == "hpm_set_counter")
    return HpmFunction::SetMcounter;
  return std::nullopt;
}


SbiRet
sbi_dispatch(const SbiCall& call, PmuState& state)
{
  if (call.extension_id != hpm_extension_id)
    return SbiRet::failure(sbi_err_not_supported);

  switch (HpmFunction(call.function_id))
    {
    case HpmFunction::GetMevent:
      return get_event(state, call.arg0);
    case HpmFunction::SetMevent:
      return set_event(state, call.arg0, call.arg1);

    case HpmFunction::GetMcounter:
    case HpmFunction::GetUcounter:
      // u-space reads alias the machine counters in this model.
      return get_counter(state, call.arg0);
    case HpmFunction::SetMcounter:
    case HpmFunction::SetUcounter:
      return set_counter(state, call.arg0, call.arg1);

    case HpmFunction::GetMcounteren:
      return ok_masked(state, state.mcounteren());
    case HpmFunction::SetMcounteren:
      state.csr_write(Csr::Mcounteren, call.arg0, Privilege::Machine);
      return SbiRet::success(0);

    case HpmFunction::GetScounteren:
      return ok_masked(state, state.scounteren());
    case HpmFunction::SetScounteren:
      state.csr_write(Csr::Scounteren, call.arg0, Privilege::Machine);
      return SbiRet::success(0);

    case HpmFunction::GetMcountinhibit:
      return ok_masked(state, state.mcountinhibit());
    case HpmFunction::SetMcountinhibit:
      if (call.arg0 & 0x2)
        return SbiRet::failure(sbi_err_denied);   // time cannot be inhibited
      state.csr_write(Csr::Mcountinhibit, call.arg0, Privilege::Machine);
      return SbiRet::success(0);
    }
  return SbiRet::failure(sbi_err_not_supported);
}


SbiRet
read_counter64_rv32(const SbiInvoker& invoke, unsigned counter_idx)
{
  uint64_t assembled = 0;
  for (int attempt = 0; attempt < 3; ++attempt)
    {
      SbiRet high1 = invoke(HpmFunction::GetMcounter, counter_idx + 32, 0);
      if (not high1.ok())
        return high1;
      SbiRet low = invoke(HpmFunction::GetMcounter, counter_idx, 0);
      if (not low.ok())
        return low;
      SbiRet high2 = invoke(HpmFunction::GetMcounter, counter_idx + 32, 0);
      if (not high2.ok())
        return high2;

      assembled = (uint64_t(high2.value) << 32) | (uint64_t(low.value) & 0xFFFFFFFFull);
      if (high1.value == high2.value)
        break;   // low half did not overflow between the half-reads
    }
  return SbiRet{int64_t(assembled), sbi_success};
}

}
