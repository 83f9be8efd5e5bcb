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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hpmstack/platform.hpp"
#include "hpmstack/trace.hpp"

namespace hpmstack
{

  enum class Privilege : unsigned
  {
    User = 0,
    Supervisor = 1,
    Machine = 3,
  };

  /// Control and status register numbers, privileged-architecture addresses.
  /// Bits [9:8] encode the minimum privilege, bits [11:10] == 0b11 marks a
  /// read-only register.
  enum class Csr : uint32_t
  {
    // Unprivileged counter shadows.
    Cycle = 0xC00,
    Time = 0xC01,
    Instret = 0xC02,
    Hpmcounter3 = 0xC03,     // .. hpmcounter31 = 0xC1F

    // Supervisor.
    Scounteren = 0x106,

    // Machine counters and configuration.
    Mcounteren = 0x306,
    Mcountinhibit = 0x320,
    Mhpmevent3 = 0x323,      // .. mhpmevent31 = 0x33F
    Mcycle = 0xB00,
    Minstret = 0xB02,
    Mhpmcounter3 = 0xB03,    // .. mhpmcounter31 = 0xB1F

    // Machine identity (read-only).
    Marchid = 0xF12,
    Mimpid = 0xF13,
  };

  constexpr Csr hpmcounter_csr(unsigned counter_idx)
  {
    return Csr(0xC00 + counter_idx);
  }

  constexpr Csr mhpmcounter_csr(unsigned counter_idx)
  {
    return Csr(0xB00 + counter_idx);
  }

  constexpr Csr mhpmevent_csr(unsigned counter_idx)
  {
    return Csr(0x320 + counter_idx);
  }

  constexpr Privilege csr_min_privilege(Csr csr)
  {
    return Privilege((uint32_t(csr) >> 8) & 3);
  }

  constexpr bool csr_read_only(Csr csr)
  {
    return ((uint32_t(csr) >> 10) & 3) == 3;
  }

  /// Name -> CSR number ("mcycle", "mhpmcounter17", "hpmcounter4", ...).
  std::optional<Csr> csr_from_name(std::string_view name);

  std::string csr_name(Csr csr);

  /// Privilege check failed; models the illegal-instruction trap.
  class CsrAccessFault : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// The named register does not exist in this model.
  class CsrNotImplemented : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// The machine-level HPM register file of one hart: counters, event
  /// selectors, enable/inhibit masks and identity registers, with WARL
  /// masking and the counting semantics driven by trace slices.
  ///
  /// A PmuState is owned by one logical execution context at a time; it is
  /// never mutated concurrently.
  class PmuState
  {
  public:
    explicit PmuState(PlatformDescription platform);

    const PlatformDescription& platform() const
    { return platform_; }

    /// Read a register at the given privilege. Machine reads always succeed;
    /// supervisor reads of counter shadows require the mcounteren bit; user
    /// reads require the bit in both mcounteren and scounteren.
    uint64_t csr_read(Csr csr, Privilege priv) const;

    /// Machine-level write, WARL-masked. Writes to unimplemented hpm
    /// registers are silently ignored; read-only registers fault.
    void csr_write(Csr csr, uint64_t value, Privilege priv);

    /// Apply one trace slice: cycle/time/instret advance by the slice's
    /// cycles/instructions, and every implemented event counter whose
    /// selector matches a delta key counts it. mcountinhibit bits freeze
    /// individual counters; time always runs; event 0 never counts.
    void advance(const TraceSlice& slice);

    uint32_t mcounteren() const    { return mcounteren_; }
    uint32_t scounteren() const    { return scounteren_; }
    uint32_t mcountinhibit() const { return mcountinhibit_; }

    /// Current machine value of counter idx (0=cycle, 1=time, 2=instret,
    /// 3..31 = mhpmcounter). Unimplemented counters read 0.
    uint64_t counter_value(unsigned counter_idx) const;

    /// Current mhpmevent selector (0 for unimplemented indices).
    uint64_t event_selector(unsigned counter_idx) const;

    bool operator==(const PmuState& other) const = default;

  private:
    uint64_t legal_mask(Csr csr) const;
    bool counter_readable(unsigned counter_idx, Privilege priv) const;

    PlatformDescription platform_;
    uint64_t mcycle_ = 0;
    uint64_t mtime_ = 0;
    uint64_t minstret_ = 0;
    std::array<uint64_t, 29> hpm_counters_{};   // mhpmcounter3..31
    std::array<uint64_t, 29> hpm_events_{};     // mhpmevent3..31
    uint32_t mcounteren_ = 0;
    uint32_t scounteren_ = 0;
    uint32_t mcountinhibit_ = 0;
  };

}
