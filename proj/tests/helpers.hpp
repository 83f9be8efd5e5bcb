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
#include <map>
#include <random>
#include <string>

#include "hpmstack/platform.hpp"

namespace testutil
{

  inline std::string data_dir()
  {
#ifdef HPMSTACK_DATA_DIR
    return HPMSTACK_DATA_DIR;
#else
    return "data";
#endif
  }

  inline hpmstack::PlatformDescription cva6()
  {
    hpmstack::PlatformDescription p;
    p.xlen = 64;
    p.base_counter_width = 64;
    p.event_counter_width = 64;
    p.num_event_counters = 14;
    p.marchid = 0x3;
    p.mimpid = 0x0;
    for (unsigned idx = 3; idx <= 16; ++idx)
      p.fixed_bindings.emplace_back(idx, idx);   // code = counter index
    return p;
  }

  inline hpmstack::PlatformDescription generic(unsigned num_event_counters,
                                               unsigned event_width = 64,
                                               unsigned base_width = 64)
  {
    hpmstack::PlatformDescription p;
    p.xlen = 64;
    p.base_counter_width = base_width;
    p.event_counter_width = event_width;
    p.num_event_counters = num_event_counters;
    p.marchid = 0x5;
    p.mimpid = 0x0;
    return p;
  }

  inline hpmstack::PlatformDescription rv32(unsigned num_event_counters = 4,
                                            unsigned width = 64)
  {
    hpmstack::PlatformDescription p;
    p.xlen = 32;
    p.base_counter_width = width;
    p.event_counter_width = width;
    p.num_event_counters = num_event_counters;
    p.marchid = 0x7;
    p.mimpid = 0x1;
    return p;
  }

  // Oracle: (value + delta) mod 2^width through 128-bit arithmetic, kept
  // independent of the model's masking path.
  inline uint64_t wrap_oracle(uint64_t value, uint64_t delta, unsigned width)
  {
    unsigned __int128 sum = (unsigned __int128)value + delta;
    if (width >= 64)
      return uint64_t(sum);
    unsigned __int128 modulus = (unsigned __int128)1 << width;
    return uint64_t(sum % modulus);
  }

  struct Rng
  {
    std::mt19937_64 engine;

    explicit Rng(uint64_t seed) : engine(seed) {}

    uint64_t next_u64() { return engine(); }

    uint64_t below(uint64_t bound)
    {
      return std::uniform_int_distribution<uint64_t>(0, bound - 1)(engine);
    }

    bool chance(double p)
    {
      return std::uniform_real_distribution<double>(0.0, 1.0)(engine) < p;
    }
  };

}
