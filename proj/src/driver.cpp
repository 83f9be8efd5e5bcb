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

#include "hpmstack/driver.hpp"

#include <algorithm>
#include <bit>

namespace hpmstack
{

namespace
{

  constexpr uint32_t bit(unsigned n)
  {
    return uint32_t(1) << n;
  }

  uint64_t saturating_add(uint64_t a, uint64_t b)
  {
    uint64_t sum = a + b;
    return sum < a ? ~uint64_t(0) : sum;
  }

}


std::string_view
event_state_name(EventState state)
{
  switch (state)
    {
    case EventState::Open:    return "open";
    case EventState::Enabled: return "enabled";
    case EventState::Running: return "running";
    case EventState::Stopped: return "stopped";
    case EventState::Closed:  return "closed";
    }
  return "?";
}


EventScheduler::EventScheduler(PmuState& pmu, uint64_t mux_quantum)
  : pmu_(pmu), sbi_(direct_invoker(pmu)), quantum_(mux_quantum)
{
  // Counter 1 (time) is never schedulable: it cannot be zeroed or inhibited.
  schedulable_ = pmu_.platform().implemented_counter_mask() & ~bit(1);
  free_counters_ = schedulable_;
}


void
EventScheduler::set_sbi_invoker(SbiInvoker invoker)
{
  sbi_ = std::move(invoker);
}


uint32_t
EventScheduler::usable_mask(const Event& ev) const
{
  uint32_t usable = ~ev.map & schedulable_;
  // A fixed-bound counter only counts its bound code.
  for (const auto& [code, idx] : pmu_.platform().fixed_bindings)
    if (code != ev.code)
      usable &= ~bit(idx);
  return usable;
}


std::optional<unsigned>
EventScheduler::pick_counter(const Event& ev) const
{
  uint32_t candidates = usable_mask(ev) & free_counters_;
  if (candidates == 0)
    return std::nullopt;
  return std::countr_zero(candidates);
}


std::optional<unsigned>
EventScheduler::allocate_counter(uint32_t counter_map, uint32_t free_mask,
                                 const PlatformDescription& platform)
{
  uint32_t candidates = ~counter_map & free_mask & platform.implemented_counter_mask();
  candidates &= ~uint32_t(0x7);   // HPM counters only
  if (candidates == 0)
    return std::nullopt;
  return std::countr_zero(candidates);
}


EventScheduler::Event&
EventScheduler::live(EventHandle handle)
{
  auto it = events_.find(handle);
  if (it == events_.end())
    throw StateError("unknown event handle");
  return it->second;
}


const EventScheduler::Event&
EventScheduler::live(EventHandle handle) const
{
  auto it = events_.find(handle);
  if (it == events_.end())
    throw StateError("unknown event handle");
  return it->second;
}


EventHandle
EventScheduler::open(uint64_t event_code, uint32_t counter_map)
{
  Event ev;
  ev.code = event_code;
  ev.map = counter_map;
  if (usable_mask(ev) == 0)
    throw NoUsableCounter("counter map leaves no usable counter for this event");
  EventHandle handle = next_handle_++;
  events_.emplace(handle, ev);
  return handle;
}


SbiRet
EventScheduler::call(HpmFunction fn, uint64_t a0, uint64_t a1)
{
  return sbi_(fn, a0, a1);
}


void
EventScheduler::call_or_throw(HpmFunction fn, uint64_t a0, uint64_t a1, const char* what)
{
  SbiRet ret = call(fn, a0, a1);
  if (not ret.ok())
    throw SbiCallError(what, ret);
}


void
EventScheduler::write_counter(unsigned counter_idx, uint64_t value)
{
  if (pmu_.platform().xlen == 32)
    {
      call_or_throw(HpmFunction::SetMcounter, counter_idx, value & 0xFFFFFFFFull,
                    "counter write (low half)");
      call_or_throw(HpmFunction::SetMcounter, counter_idx + 32, value >> 32,
                    "counter write (high half)");
      return;
    }
  call_or_throw(HpmFunction::SetMcounter, counter_idx, value, "counter write");
}


uint64_t
EventScheduler::read_raw(unsigned counter_idx)
{
  // Supervisor fast path once the driver set the mcounteren bit; SBI
  // otherwise.
  if ((pmu_.mcounteren() >> counter_idx) & 1)
    return pmu_.csr_read(hpmcounter_csr(counter_idx), Privilege::Supervisor);
  if (pmu_.platform().xlen == 32)
    {
      SbiRet ret = read_counter64_rv32(sbi_, counter_idx);
      if (not ret.ok())
        throw SbiCallError("counter read", ret);
      return uint64_t(ret.value);
    }
  SbiRet ret = call(HpmFunction::GetMcounter, counter_idx, 0);
  if (not ret.ok())
    throw SbiCallError("counter read", ret);
  return uint64_t(ret.value);
}


void
EventScheduler::install(EventHandle handle, unsigned counter_idx)
{
  Event& ev = live(handle);
  bool fixed = pmu_.platform().fixed_event_for(counter_idx).has_value();
  bool selector_written = false;

  try
    {
      if (counter_idx >= 3 and not fixed)
        {
          call_or_throw(HpmFunction::SetMevent, counter_idx, ev.code, "event selector write");
          selector_written = true;
        }
      write_counter(counter_idx, 0);

      SbiRet inhibit = call(HpmFunction::GetMcountinhibit, 0, 0);
      if (not inhibit.ok())
        throw SbiCallError("mcountinhibit read", inhibit);
      call_or_throw(HpmFunction::SetMcountinhibit,
                    uint64_t(inhibit.value) & ~uint64_t(bit(counter_idx)), 0,
                    "mcountinhibit write");

      SbiRet counteren = call(HpmFunction::GetMcounteren, 0, 0);
      if (not counteren.ok())
        throw SbiCallError("mcounteren read", counteren);
      call_or_throw(HpmFunction::SetMcounteren,
                    uint64_t(counteren.value) | bit(counter_idx), 0, "mcounteren write");
    }
  catch (const SbiCallError&)
    {
      // Roll back: re-inhibit the counter, clear the selector, queue the
      // event instead of leaving partial hardware state.
      SbiRet inhibit = call(HpmFunction::GetMcountinhibit, 0, 0);
      if (inhibit.ok())
        call(HpmFunction::SetMcountinhibit, uint64_t(inhibit.value) | bit(counter_idx), 0);
      if (selector_written)
        call(HpmFunction::SetMevent, counter_idx, 0);
      ev.state = EventState::Enabled;
      ev.counter.reset();
      run_queue_.push_back(handle);
      throw;
    }

  ev.counter = counter_idx;
  ev.last_raw = 0;
  ev.state = EventState::Running;
  occupants_[counter_idx] = handle;
  free_counters_ &= ~bit(counter_idx);
}


void
EventScheduler::fold(Event& ev)
{
  if (not ev.counter)
    return;
  unsigned idx = *ev.counter;
  uint64_t raw = read_raw(idx);
  uint64_t mask = pmu_.platform().counter_value_mask(idx);
  uint64_t delta = (raw - ev.last_raw) & mask;
  ev.accumulated = saturating_add(ev.accumulated, delta);
  ev.last_raw = raw;
}


void
EventScheduler::uninstall(EventHandle handle)
{
  Event& ev = live(handle);
  unsigned idx = *ev.counter;

  SbiRet inhibit = call(HpmFunction::GetMcountinhibit, 0, 0);
  if (inhibit.ok())
    call(HpmFunction::SetMcountinhibit, uint64_t(inhibit.value) | bit(idx), 0);

  if (idx >= 3 and not pmu_.platform().fixed_event_for(idx))
    call(HpmFunction::SetMevent, idx, 0);   // back to the null event

  SbiRet counteren = call(HpmFunction::GetMcounteren, 0, 0);
  if (counteren.ok())
    call(HpmFunction::SetMcounteren, uint64_t(counteren.value) & ~uint64_t(bit(idx)), 0);

  ev.counter.reset();
  occupants_.erase(idx);
  free_counters_ |= bit(idx);
}


void
EventScheduler::enable(EventHandle handle)
{
  Event& ev = live(handle);
  if (ev.state != EventState::Open and ev.state != EventState::Stopped)
    throw StateError(std::string("enable in state ") + std::string(event_state_name(ev.state)));

  if (auto counter = pick_counter(ev))
    {
      install(handle, *counter);
      return;
    }
  ev.state = EventState::Enabled;
  run_queue_.push_back(handle);
}


void
EventScheduler::dequeue(EventHandle handle)
{
  run_queue_.erase(std::remove(run_queue_.begin(), run_queue_.end(), handle), run_queue_.end());
}


void
EventScheduler::promote_for(unsigned counter_idx)
{
  for (auto it = run_queue_.begin(); it != run_queue_.end(); ++it)
    {
      Event& candidate = live(*it);
      if ((usable_mask(candidate) >> counter_idx) & 1)
        {
          EventHandle handle = *it;
          run_queue_.erase(it);
          try
            {
              install(handle, counter_idx);
            }
          catch (const SbiCallError&)
            {
              // install() already rolled back and re-queued the candidate;
              // the counter simply stays free until the next opportunity.
            }
          return;
        }
    }
}


void
EventScheduler::disable(EventHandle handle)
{
  Event& ev = live(handle);
  if (ev.state == EventState::Running)
    {
      fold(ev);
      unsigned freed = *ev.counter;
      uninstall(handle);
      ev.state = EventState::Stopped;
      promote_for(freed);
      return;
    }
  if (ev.state == EventState::Enabled)
    {
      dequeue(handle);
      ev.state = EventState::Stopped;
      return;
    }
  throw StateError(std::string("disable in state ") + std::string(event_state_name(ev.state)));
}


void
EventScheduler::close(EventHandle handle)
{
  Event& ev = live(handle);
  if (ev.state == EventState::Closed)
    throw StateError("event already closed");
  if (ev.state == EventState::Running)
    {
      fold(ev);
      unsigned freed = *ev.counter;
      uninstall(handle);
      promote_for(freed);
    }
  else if (ev.state == EventState::Enabled)
    dequeue(handle);
  ev.state = EventState::Closed;
}


EventCounts
EventScheduler::read(EventHandle handle)
{
  Event& ev = live(handle);
  if (ev.state == EventState::Closed)
    throw StateError("read of a closed event");

  uint64_t count = ev.accumulated;
  if (ev.state == EventState::Running)
    {
      unsigned idx = *ev.counter;
      uint64_t raw = read_raw(idx);
      uint64_t mask = pmu_.platform().counter_value_mask(idx);
      count = saturating_add(count, (raw - ev.last_raw) & mask);
    }
  return EventCounts{count, ev.time_enabled, ev.time_running};
}


void
EventScheduler::rotate()
{
  if (run_queue_.empty())
    return;

  // Snapshot: installs during this pass must not be rotated again.
  std::vector<std::pair<unsigned, EventHandle>> running(occupants_.begin(), occupants_.end());
  for (const auto& [counter_idx, handle] : running)
    {
      // Someone queued must actually fit this counter.
      bool fits = std::any_of(run_queue_.begin(), run_queue_.end(), [&](EventHandle h) {
        return (usable_mask(live(h)) >> counter_idx) & 1;
      });
      if (not fits)
        continue;

      Event& ev = live(handle);
      fold(ev);
      uninstall(handle);
      ev.state = EventState::Enabled;
      promote_for(counter_idx);
      run_queue_.push_back(handle);   // parked at the tail: round-robin
    }
}


void
EventScheduler::multiplex_tick(uint64_t now_cycles)
{
  if (now_cycles < last_tick_)
    throw StateError("multiplex_tick time went backwards");
  uint64_t elapsed = now_cycles - last_tick_;
  last_tick_ = now_cycles;

  for (auto& [handle, ev] : events_)
    {
      if (ev.state == EventState::Running)
        {
          ev.time_enabled += elapsed;
          ev.time_running += elapsed;
          // Fold per tick so counter wraps between ticks stay recoverable.
          fold(ev);
        }
      else if (ev.state == EventState::Enabled)
        ev.time_enabled += elapsed;
    }

  if (now_cycles - last_rotation_ >= quantum_)
    {
      rotate();
      last_rotation_ = now_cycles;
    }
}


EventState
EventScheduler::state_of(EventHandle handle) const
{
  return live(handle).state;
}


std::optional<unsigned>
EventScheduler::assigned_counter(EventHandle handle) const
{
  return live(handle).counter;
}

}
