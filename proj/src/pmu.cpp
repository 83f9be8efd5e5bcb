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

#include "hpmstack/pmu.hpp"

#include <charconv>
#include <sstream>

namespace hpmstack
{

namespace
{

  constexpr uint32_t time_inhibit_bit = 1u << 1;

  bool in_family(Csr csr, uint32_t base, unsigned lo, unsigned hi)
  {
    uint32_t n = uint32_t(csr);
    return n >= base + lo and n <= base + hi;
  }

  std::optional<unsigned> parse_index(std::string_view tail, unsigned lo, unsigned hi)
  {
    unsigned idx = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), idx, 10);
    if (ec != std::errc() or ptr != tail.data() + tail.size() or tail.empty())
      return std::nullopt;
    if (idx < lo or idx > hi)
      return std::nullopt;
    return idx;
  }

  uint64_t wrap_add(uint64_t value, uint64_t delta, uint64_t mask)
  {
    return (value + delta) & mask;
  }

}


std::optional<Csr>
csr_from_name(std::string_view name)
{
  if (name == "cycle")         return Csr::Cycle;
  if (name == "time")          return Csr::Time;
  if (name == "instret")       return Csr::Instret;
  if (name == "scounteren")    return Csr::Scounteren;
  if (name == "mcounteren")    return Csr::Mcounteren;
  if (name == "mcountinhibit") return Csr::Mcountinhibit;
  if (name == "mcycle")        return Csr::Mcycle;
  if (name == "minstret")      return Csr::Minstret;
  if (name == "marchid")       return Csr::Marchid;
  if (name == "mimpid")        return Csr::Mimpid;

  for (auto [prefix, base] : {std::pair<std::string_view, uint32_t>{"mhpmcounter", 0xB00},
                              {"mhpmevent", 0x320},
                              {"hpmcounter", 0xC00}})
    if (name.starts_with(prefix))
      if (auto idx = parse_index(name.substr(prefix.size()), 3, 31))
        return Csr(base + *idx);
  return std::nullopt;
}


std::string
csr_name(Csr csr)
{
  switch (csr)
    {
    case Csr::Cycle:         return "cycle";
    case Csr::Time:          return "time";
    case Csr::Instret:       return "instret";
    case Csr::Scounteren:    return "scounteren";
    case Csr::Mcounteren:    return "mcounteren";
    case Csr::Mcountinhibit: return "mcountinhibit";
    case Csr::Mcycle:        return "mcycle";
    case Csr::Minstret:      return "minstret";
    case Csr::Marchid:       return "marchid";
    case Csr::Mimpid:        return "mimpid";
    default:
      break;
    }
  uint32_t n = uint32_t(csr);
  std::ostringstream os;
  if (in_family(csr, 0xB00, 3, 31))
    os << "mhpmcounter" << (n - 0xB00);
  else if (in_family(csr, 0x320, 3, 31))
    os << "mhpmevent" << (n - 0x320);
  else if (in_family(csr, 0xC00, 3, 31))
    os << "hpmcounter" << (n - 0xC00);
  else
    os << "csr_0x" << std::hex << n;
  return os.str();
}


PmuState::PmuState(PlatformDescription platform)
  : platform_(std::move(platform))
{
  validate(platform_);
  for (const auto& [code, idx] : platform_.fixed_bindings)
    hpm_events_[idx - 3] = code & platform_.xlen_mask();
}


uint64_t
PmuState::counter_value(unsigned counter_idx) const
{
  switch (counter_idx)
    {
    case 0: return mcycle_;
    case 1: return mtime_;
    case 2: return minstret_;
    default:
      if (counter_idx <= 31 and platform_.counter_implemented(counter_idx))
        return hpm_counters_[counter_idx - 3];
      return 0;
    }
}


uint64_t
PmuState::event_selector(unsigned counter_idx) const
{
  if (counter_idx >= 3 and counter_idx <= 31 and platform_.counter_implemented(counter_idx))
    return hpm_events_[counter_idx - 3];
  return 0;
}


bool
PmuState::counter_readable(unsigned counter_idx, Privilege priv) const
{
  if (priv == Privilege::Machine)
    return true;
  if (not((mcounteren_ >> counter_idx) & 1))
    return false;
  if (priv == Privilege::User and not((scounteren_ >> counter_idx) & 1))
    return false;
  return true;
}


uint64_t
PmuState::legal_mask(Csr csr) const
{
  if (csr == Csr::Mcycle or csr == Csr::Minstret)
    return platform_.counter_value_mask(0);
  if (in_family(csr, 0xB00, 3, 31))
    {
      unsigned idx = uint32_t(csr) - 0xB00;
      return platform_.counter_implemented(idx) ? platform_.counter_value_mask(idx) : 0;
    }
  if (in_family(csr, 0x320, 3, 31))
    {
      unsigned idx = uint32_t(csr) - 0x320;
      if (not platform_.counter_implemented(idx))
        return 0;
      if (platform_.fixed_event_for(idx))
        return 0;   // selector is read-only under a fixed binding
      return platform_.xlen_mask();
    }
  if (csr == Csr::Mcounteren or csr == Csr::Scounteren)
    return platform_.implemented_counter_mask();
  if (csr == Csr::Mcountinhibit)
    return platform_.implemented_counter_mask() & ~uint64_t(time_inhibit_bit);
  return 0;
}


uint64_t
PmuState::csr_read(Csr csr, Privilege priv) const
{
  if (unsigned(priv) < unsigned(csr_min_privilege(csr)))
    throw CsrAccessFault("read of " + csr_name(csr) + " needs higher privilege");

  // Unprivileged counter shadows, gated by mcounteren/scounteren.
  if (in_family(csr, 0xC00, 0, 31))
    {
      unsigned idx = uint32_t(csr) - 0xC00;
      if (not counter_readable(idx, priv))
        throw CsrAccessFault("read of " + csr_name(csr) + " blocked by counter-enable mask");
      return counter_value(idx);
    }

  switch (csr)
    {
    case Csr::Mcycle:        return mcycle_;
    case Csr::Minstret:      return minstret_;
    case Csr::Mcounteren:    return mcounteren_;
    case Csr::Scounteren:    return scounteren_;
    case Csr::Mcountinhibit: return mcountinhibit_;
    case Csr::Marchid:       return platform_.marchid;
    case Csr::Mimpid:        return platform_.mimpid;
    default:
      break;
    }
  if (in_family(csr, 0xB00, 3, 31))
    return counter_value(uint32_t(csr) - 0xB00);
  if (in_family(csr, 0x320, 3, 31))
    return event_selector(uint32_t(csr) - 0x320);

  throw CsrNotImplemented("no register named " + csr_name(csr));
}


void
PmuState::csr_write(Csr csr, uint64_t value, Privilege priv)
{
  if (priv != Privilege::Machine)
    throw CsrAccessFault("write of " + csr_name(csr) + " needs machine privilege");
  if (csr_read_only(csr))
    throw CsrAccessFault(csr_name(csr) + " is read-only");

  uint64_t masked = value & legal_mask(csr);
  switch (csr)
    {
    case Csr::Mcycle:        mcycle_ = masked; return;
    case Csr::Minstret:      minstret_ = masked; return;
    case Csr::Mcounteren:    mcounteren_ = uint32_t(masked); return;
    case Csr::Scounteren:    scounteren_ = uint32_t(masked); return;
    case Csr::Mcountinhibit: mcountinhibit_ = uint32_t(masked); return;
    default:
      break;
    }
  if (in_family(csr, 0xB00, 3, 31))
    {
      unsigned idx = uint32_t(csr) - 0xB00;
      if (platform_.counter_implemented(idx))
        hpm_counters_[idx - 3] = masked;
      return;   // unimplemented: ignored
    }
  if (in_family(csr, 0x320, 3, 31))
    {
      unsigned idx = uint32_t(csr) - 0x320;
      if (platform_.counter_implemented(idx) and not platform_.fixed_event_for(idx))
        hpm_events_[idx - 3] = masked;
      return;
    }

  throw CsrNotImplemented("no register named " + csr_name(csr));
}


void
PmuState::advance(const TraceSlice& slice)
{
  uint64_t base_mask = platform_.counter_value_mask(0);
  if (not(mcountinhibit_ & 1u))
    mcycle_ = wrap_add(mcycle_, slice.cycles, base_mask);
  mtime_ = wrap_add(mtime_, slice.cycles, base_mask);   // time cannot be inhibited
  if (not(mcountinhibit_ & 4u))
    minstret_ = wrap_add(minstret_, slice.instructions, base_mask);

  uint64_t event_mask = platform_.counter_value_mask(3);
  for (unsigned idx = 3; idx < 3 + platform_.num_event_counters; ++idx)
    {
      uint64_t selector = hpm_events_[idx - 3];
      if (selector == 0)
        continue;   // null event
      if ((mcountinhibit_ >> idx) & 1)
        continue;
      auto it = slice.deltas.find(selector);
      if (it == slice.deltas.end())
        continue;
      hpm_counters_[idx - 3] = wrap_add(hpm_counters_[idx - 3], it->second, event_mask);
    }
}

}
