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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hpmstack/commands.hpp"

namespace py = pybind11;

namespace
{

  hpmstack::Privilege privilege_from(const std::string& p)
  {
    if (p == "m" or p == "machine")
      return hpmstack::Privilege::Machine;
    if (p == "s" or p == "supervisor")
      return hpmstack::Privilege::Supervisor;
    if (p == "u" or p == "user")
      return hpmstack::Privilege::User;
    throw py::value_error("privilege must be one of m/s/u");
  }

  hpmstack::Csr csr_from(const std::string& name)
  {
    auto csr = hpmstack::csr_from_name(name);
    if (not csr)
      throw py::value_error("unknown CSR: " + name);
    return *csr;
  }

  py::dict event_to_dict(const hpmstack::EventDescriptor& event)
  {
    py::dict d;
    d["name"] = event.name;
    d["event_code"] = event.event_code;
    d["counter_map"] = event.counter_map;
    d["brief"] = event.brief;
    d["public_description"] = event.public_description;
    d["group"] = event.group;
    return d;
  }

  std::vector<hpmstack::TraceSlice> slices_from(const py::iterable& it)
  {
    std::vector<hpmstack::TraceSlice> out;
    for (auto item : it)
      {
        auto tuple = item.cast<py::tuple>();
        hpmstack::TraceSlice slice;
        slice.cycles = tuple[0].cast<uint64_t>();
        slice.instructions = tuple[1].cast<uint64_t>();
        if (tuple.size() > 2)
          for (auto [code, count] : tuple[2].cast<py::dict>())
            slice.deltas[code.cast<uint64_t>()] = count.cast<uint64_t>();
        out.push_back(std::move(slice));
      }
    return out;
  }

  py::list slices_to_python(const std::vector<hpmstack::TraceSlice>& slices)
  {
    py::list out;
    for (const auto& slice : slices)
      {
        py::dict deltas;
        for (const auto& [code, count] : slice.deltas)
          deltas[py::int_(code)] = count;
        out.append(py::make_tuple(slice.cycles, slice.instructions, deltas));
      }
    return out;
  }

}


PYBIND11_MODULE(_hpmstack, m)
{
  using namespace hpmstack;

  m.doc() = "RISC-V hardware-performance-monitoring stack over an emulated hart PMU";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<CsrAccessFault>(m, "CsrAccessFault");
  py::register_exception<CsrNotImplemented>(m, "CsrNotImplemented");
  py::register_exception<UnknownEvent>(m, "UnknownEventError");
  py::register_exception<UnknownCpu>(m, "UnknownCpuError");
  py::register_exception<NoUsableCounter>(m, "NoUsableCounterError");
  py::register_exception<StateError>(m, "StateError");

  m.attr("HPM_EXTENSION_ID") = hpm_extension_id;
  m.attr("SBI_SUCCESS") = sbi_success;
  m.attr("SBI_ERR_NOT_SUPPORTED") = sbi_err_not_supported;
  m.attr("SBI_ERR_DENIED") = sbi_err_denied;

  py::class_<PlatformDescription>(m, "PlatformDescription")
    .def(py::init<>())
    .def_readwrite("xlen", &PlatformDescription::xlen)
    .def_readwrite("base_counter_width", &PlatformDescription::base_counter_width)
    .def_readwrite("event_counter_width", &PlatformDescription::event_counter_width)
    .def_readwrite("num_event_counters", &PlatformDescription::num_event_counters)
    .def_readwrite("marchid", &PlatformDescription::marchid)
    .def_readwrite("mimpid", &PlatformDescription::mimpid)
    .def_readwrite("fixed_bindings", &PlatformDescription::fixed_bindings)
    .def("counter_implemented", &PlatformDescription::counter_implemented)
    .def("implemented_counter_mask", &PlatformDescription::implemented_counter_mask);

  m.def("load_platform", &load_platform, py::arg("document"),
        "Parse a platform description document");
  m.def("load_platform_file", &load_platform_file, py::arg("path"));

  py::class_<PmuState>(m, "PmuState")
    .def(py::init<PlatformDescription>(), py::arg("platform"))
    .def("csr_read",
         [](const PmuState& state, const std::string& csr, const std::string& priv) {
           return state.csr_read(csr_from(csr), privilege_from(priv));
         },
         py::arg("csr"), py::arg("priv") = "m")
    .def("csr_write",
         [](PmuState& state, const std::string& csr, uint64_t value, const std::string& priv) {
           state.csr_write(csr_from(csr), value, privilege_from(priv));
         },
         py::arg("csr"), py::arg("value"), py::arg("priv") = "m")
    .def("advance",
         [](PmuState& state, uint64_t cycles, uint64_t instructions,
            const std::map<uint64_t, uint64_t>& deltas) {
           TraceSlice slice;
           slice.cycles = cycles;
           slice.instructions = instructions;
           slice.deltas = deltas;
           state.advance(slice);
         },
         py::arg("cycles"), py::arg("instructions") = 0,
         py::arg("deltas") = std::map<uint64_t, uint64_t>{})
    .def("sbi",
         [](PmuState& state, py::object fn, uint64_t arg0, uint64_t arg1) {
           uint32_t function_id;
           if (py::isinstance<py::str>(fn))
             {
               auto named = hpm_function_from_name(fn.cast<std::string>());
               if (not named)
                 throw py::value_error("unknown HPM function: " + fn.cast<std::string>());
               function_id = uint32_t(*named);
             }
           else
             function_id = fn.cast<uint32_t>();
           SbiRet ret = sbi_dispatch(SbiCall{hpm_extension_id, function_id, arg0, arg1}, state);
           return py::make_tuple(ret.value, ret.error);
         },
         py::arg("fn"), py::arg("arg0") = 0, py::arg("arg1") = 0,
         "Dispatch one HPM extension call; returns (value, error)")
    .def("read_counter64_rv32",
         [](PmuState& state, unsigned counter_idx) {
           SbiRet ret = read_counter64_rv32(direct_invoker(state), counter_idx);
           if (not ret.ok())
             throw py::value_error("SBI error " + std::to_string(ret.error));
           return uint64_t(ret.value);
         },
         py::arg("counter_idx"))
    .def("counter_value", &PmuState::counter_value)
    .def("event_selector", &PmuState::event_selector)
    .def_property_readonly("mcounteren", &PmuState::mcounteren)
    .def_property_readonly("scounteren", &PmuState::scounteren)
    .def_property_readonly("mcountinhibit", &PmuState::mcountinhibit);

  m.def("derive_cpu_id",
        [](uint64_t marchid, uint64_t mimpid) { return derive_cpu_id(marchid, mimpid).id; },
        py::arg("marchid"), py::arg("mimpid"));

  py::class_<EventCatalog>(m, "EventCatalog")
    .def("__len__", &EventCatalog::size)
    .def("events",
         [](const EventCatalog& catalog) {
           py::list out;
           for (const auto& event : catalog.events())
             out.append(event_to_dict(event));
           return out;
         })
    .def("find",
         [](const EventCatalog& catalog, const std::string& name) -> py::object {
           const EventDescriptor* event = catalog.find(name);
           return event ? py::object(event_to_dict(*event)) : py::none();
         })
    .def("warnings", &EventCatalog::warnings);

  m.def("load_event_dir", py::overload_cast<const std::string&>(&load_event_dir),
        py::arg("dir"));
  m.def("load_event_dir",
        py::overload_cast<const std::string&, const PlatformDescription&>(&load_event_dir),
        py::arg("dir"), py::arg("platform"));
  m.def("load_catalog_for", &load_catalog_for, py::arg("platform"), py::arg("mapfile"),
        py::arg("events_root"));
  m.def("parse_mapfile",
        [](const std::string& text) {
          py::list out;
          for (const auto& entry : parse_mapfile(text))
            {
              py::dict d;
              d["cpu_id"] = entry.cpu_id.id;
              d["file_version"] = entry.file_version;
              d["events_dirname"] = entry.events_dirname;
              d["events_type"] = entry.events_type;
              out.append(d);
            }
          return out;
        },
        py::arg("text"));
  m.def("resolve",
        [](const EventCatalog& catalog, const std::string& spec) {
          ResolvedEvent r = resolve(catalog, spec);
          return py::make_tuple(r.event_code, r.counter_map);
        },
        py::arg("catalog"), py::arg("spec"));
  m.def("usable_counters",
        [](uint32_t counter_map, const PlatformDescription& platform) {
          return usable_counters(counter_map, platform);
        },
        py::arg("counter_map"), py::arg("platform"));
  m.def("encode_raw", &encode_raw, py::arg("event_code"), py::arg("counter_map"));
  m.def("decode_raw",
        [](uint64_t config) {
          auto [code, map] = decode_raw(config);
          return py::make_tuple(code, map);
        },
        py::arg("config"));

  m.def("load_trace",
        [](const std::string& path) { return slices_to_python(load_trace(path)); },
        py::arg("path"));
  m.def("coremark_cva6_trace",
        [](uint64_t slices) { return slices_to_python(coremark_cva6_trace(slices)); },
        py::arg("slices") = 1000);

  py::class_<EventScheduler>(m, "EventScheduler")
    .def(py::init<PmuState&, uint64_t>(), py::arg("pmu"),
         py::arg("mux_quantum") = EventScheduler::default_mux_quantum,
         py::keep_alive<1, 2>())
    .def("open", &EventScheduler::open, py::arg("event_code"), py::arg("counter_map"))
    .def("enable", &EventScheduler::enable)
    .def("disable", &EventScheduler::disable)
    .def("close", &EventScheduler::close)
    .def("read",
         [](EventScheduler& scheduler, EventHandle handle) {
           EventCounts counts = scheduler.read(handle);
           return py::make_tuple(counts.count, counts.time_enabled, counts.time_running);
         })
    .def("multiplex_tick", &EventScheduler::multiplex_tick)
    .def("state_of",
         [](const EventScheduler& scheduler, EventHandle handle) {
           return std::string(event_state_name(scheduler.state_of(handle)));
         })
    .def("assigned_counter", &EventScheduler::assigned_counter);

  m.def("compute_metrics",
        [](const std::map<std::string, uint64_t>& counts) {
          MetricReport report = compute_metrics(counts);
          py::dict d;
          auto set = [&](const char* key, const std::optional<double>& v) {
            d[key] = v ? py::object(py::float_(*v)) : py::object(py::none());
          };
          set("branch_missrate", report.branch_missrate);
          set("l1d_missrate", report.l1d_missrate);
          set("l1i_missrate", report.l1i_missrate);
          set("sb_full_frac", report.sb_full_frac);
          set("if_empty_frac", report.if_empty_frac);
          set("ipc", report.ipc);
          set("dtlb_missrate", report.dtlb_missrate);
          set("itlb_missrate", report.itlb_missrate);
          d["notes"] = report.notes;
          return d;
        },
        py::arg("counts"));

  m.def("cmd_list", &cmd_list, py::arg("platform"), py::arg("catalog"));

  m.def("run_stat",
        [](PmuState& pmu, const EventCatalog& catalog, const std::vector<std::string>& specs,
           const py::iterable& trace, uint64_t mux_quantum, double clock_mhz, bool metrics) {
          StatOptions options;
          options.mux_quantum = mux_quantum;
          options.clock_mhz = clock_mhz;
          options.with_metrics = metrics;
          auto slices = slices_from(trace);
          auto specs_or_all = specs.empty() ? all_event_specs(catalog) : specs;
          StatResult result = run_stat(pmu, catalog, specs_or_all, slices, options);

          py::dict out;
          py::list events;
          for (const auto& ev : result.events)
            {
              py::dict entry;
              entry["spec"] = ev.spec;
              entry["ok"] = ev.ok;
              if (ev.ok)
                {
                  entry["name"] = ev.name;
                  entry["count"] = ev.scaled_count;
                  entry["raw_count"] = ev.counts.count;
                  entry["time_enabled"] = ev.counts.time_enabled;
                  entry["time_running"] = ev.counts.time_running;
                }
              else
                entry["error"] = ev.error;
              events.append(entry);
            }
          out["events"] = events;
          out["total_cycles"] = result.total_cycles;
          out["elapsed_sec"] = result.elapsed_sec;
          auto set = [&](const char* key, const std::optional<double>& v) {
            if (v)
              out[key] = *v;
          };
          set("branch_missrate", result.metrics.branch_missrate);
          set("l1d_missrate", result.metrics.l1d_missrate);
          set("l1i_missrate", result.metrics.l1i_missrate);
          set("sb_full_frac", result.metrics.sb_full_frac);
          set("if_empty_frac", result.metrics.if_empty_frac);
          set("ipc", result.metrics.ipc);
          set("dtlb_missrate", result.metrics.dtlb_missrate);
          set("itlb_missrate", result.metrics.itlb_missrate);
          return out;
        },
        py::arg("pmu"), py::arg("catalog"), py::arg("specs"), py::arg("trace"),
        py::arg("mux_quantum") = EventScheduler::default_mux_quantum,
        py::arg("clock_mhz") = 100.0, py::arg("metrics") = false);
}
