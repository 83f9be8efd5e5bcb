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
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

#include "hpmstack/sbi.hpp"

namespace hpmstack
{

  class NoUsableCounter : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  class StateError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// An SBI call made by the scheduler failed; hardware state was rolled
  /// back and the event queued.
  class SbiCallError : public std::runtime_error
  {
  public:
    SbiCallError(const std::string& what, SbiRet ret)
      : std::runtime_error(what), ret(ret) {}
    SbiRet ret;
  };

  enum class EventState
  {
    Open,      // registered, hardware untouched
    Enabled,   // wants to run, queued for a counter
    Running,   // installed on a counter and counting
    Stopped,   // disabled, counts folded
    Closed,    // terminal
  };

  std::string_view event_state_name(EventState state);

  using EventHandle = uint64_t;

  struct EventCounts
  {
    uint64_t count = 0;          // accumulated + live delta, unscaled
    uint64_t time_enabled = 0;   // cycles the event wanted to run
    uint64_t time_running = 0;   // cycles it held a counter
  };

  /// Event lifecycle and counter allocation under counter-map constraints,
  /// with round-robin multiplexing when events outnumber usable counters.
  ///
  /// Counters 0 (cycle) and 2 (instret) are allocatable when an event's map
  /// permits them; they need no selector programming. Counter 1 (time) is
  /// never allocated. On fixed-binding platforms a bound counter only
  /// accepts events carrying the bound code, and selector writes are
  /// skipped there.
  ///
  /// All operations are serialized by the owning context; the scheduler has
  /// no internal threading.
  class EventScheduler
  {
  public:
    static constexpr uint64_t default_mux_quantum = 10'000;

    explicit EventScheduler(PmuState& pmu, uint64_t mux_quantum = default_mux_quantum);

    /// Replace the call path with a shim (testing/auditing). The shim must
    /// ultimately dispatch against the same PmuState.
    void set_sbi_invoker(SbiInvoker invoker);

    /// Register an event. Throws NoUsableCounter when the map excludes every
    /// schedulable counter.
    EventHandle open(uint64_t event_code, uint32_t counter_map);

    /// Open/Stopped -> Running (counter allocated, selector programmed,
    /// counter zeroed, inhibit cleared, mcounteren bit set) or Enabled
    /// (queued) when all usable counters are busy.
    void enable(EventHandle handle);

    /// Running/Enabled -> Stopped. Folds the final delta, inhibits and frees
    /// the counter, resets the selector to the null event, and promotes a
    /// queued event that fits the freed counter.
    void disable(EventHandle handle);

    /// Any live state -> Closed (terminal).
    void close(EventHandle handle);

    /// Unscaled count plus enabled/running times. Valid in any state but
    /// Closed.
    EventCounts read(EventHandle handle);

    /// Advance time accounting to now (cycles since the last tick count as
    /// enabled for Enabled+Running events, as running for Running ones) and
    /// rotate oversubscribed counters once per elapsed quantum.
    void multiplex_tick(uint64_t now_cycles);

    EventState state_of(EventHandle handle) const;
    std::optional<unsigned> assigned_counter(EventHandle handle) const;
    uint64_t mux_quantum() const { return quantum_; }
    uint32_t free_counters() const { return free_counters_; }

    /// Lowest implemented HPM counter (index >= 3) that is free and not
    /// excluded by the map.
    static std::optional<unsigned> allocate_counter(uint32_t counter_map,
                                                    uint32_t free_mask,
                                                    const PlatformDescription& platform);

  private:
    struct Event
    {
      uint64_t code = 0;
      uint32_t map = 0;
      EventState state = EventState::Open;
      std::optional<unsigned> counter;
      uint64_t accumulated = 0;    // saturating
      uint64_t last_raw = 0;
      uint64_t time_enabled = 0;
      uint64_t time_running = 0;
    };

    Event& live(EventHandle handle);
    const Event& live(EventHandle handle) const;
    uint32_t usable_mask(const Event& ev) const;
    std::optional<unsigned> pick_counter(const Event& ev) const;
    SbiRet call(HpmFunction fn, uint64_t a0 = 0, uint64_t a1 = 0);
    void call_or_throw(HpmFunction fn, uint64_t a0, uint64_t a1, const char* what);
    void install(EventHandle handle, unsigned counter_idx);
    void uninstall(EventHandle handle);
    void fold(Event& ev);
    uint64_t read_raw(unsigned counter_idx);
    void write_counter(unsigned counter_idx, uint64_t value);
    void promote_for(unsigned counter_idx);
    void rotate();
    void dequeue(EventHandle handle);

    PmuState& pmu_;
    SbiInvoker sbi_;
    uint64_t quantum_;
    uint64_t last_tick_ = 0;
    uint64_t last_rotation_ = 0;
    uint32_t schedulable_;       // implemented counters minus time
    uint32_t free_counters_;
    std::deque<EventHandle> run_queue_;
    std::map<EventHandle, Event> events_;
    std::map<unsigned, EventHandle> occupants_;
    EventHandle next_handle_ = 1;
  };

}
