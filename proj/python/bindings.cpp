#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mstcam/cli.hpp"
#include "mstcam/compaction.hpp"
#include "mstcam/engine.hpp"
#include "mstcam/metrics.hpp"
#include "mstcam/routing_table.hpp"
#include "mstcam/workload.hpp"

namespace py = pybind11;
using namespace mstcam;

namespace {

StageConfig to_config(const py::object& stages, int width) {
  if (stages.is_none()) return StageConfig::single(width);
  StageConfig c = py::isinstance<py::str>(stages) ? StageConfig::parse(stages.cast<std::string>())
                                                  : StageConfig(stages.cast<std::vector<int>>());
  c.validate(width);
  return c;
}

Prefix to_prefix(const std::string& bits, Port port, int width) {
  const auto p = parse_prefix_token(bits, port, width);
  if (!p) throw Error("malformed prefix '" + bits + "'");
  return *p;
}

Word to_address(const py::object& address, int width) {
  if (py::isinstance<py::str>(address)) {
    const auto a = parse_address(address.cast<std::string>(), width);
    if (!a) throw Error("malformed address '" + address.cast<std::string>() + "'");
    return *a;
  }
  const auto v = address.cast<std::uint64_t>();
  if (v & ~static_cast<std::uint64_t>(low_mask(width))) throw Error("address wider than the table");
  return static_cast<Word>(v);
}

std::vector<Word> to_trace(const py::iterable& trace, int width) {
  std::vector<Word> out;
  for (const auto& a : trace) out.push_back(to_address(py::reinterpret_borrow<py::object>(a), width));
  return out;
}

py::dict report_dict(const PowerReport& r) {
  py::dict d;
  d["config"] = r.config.widths();
  d["trace_length"] = r.trace_length;
  d["rows"] = r.rows;
  d["width"] = r.width;
  d["eps_sum"] = r.eps_sum;
  d["eps_max"] = r.eps_max;
  d["meps"] = r.meps;
  d["pof"] = r.pof;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-stage TCAM routing table compaction and power model";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<TernaryCube>(m, "TernaryCube")
      .def(py::init(&TernaryCube::parse), py::arg("pattern"))
      .def_property_readonly("width", &TernaryCube::width)
      .def_property_readonly("specified_bits", &TernaryCube::specified_bits)
      .def("matches", &TernaryCube::matches)
      .def("contains", &TernaryCube::contains)
      .def("intersects", &TernaryCube::intersects)
      .def("__str__", &TernaryCube::to_string)
      .def("__repr__", [](const TernaryCube& c) { return "TernaryCube('" + c.to_string() + "')"; })
      .def("__eq__", [](const TernaryCube& a, const TernaryCube& b) { return a == b; })
      .def("__hash__", [](const TernaryCube& c) { return std::hash<TernaryCube>{}(c); });

  m.def("try_merge", &try_merge);

  py::class_<RoutingTable>(m, "RoutingTable")
      .def(py::init<int>(), py::arg("width") = kDefaultWidth)
      .def_static("parse", [](const std::string& text, int width) { return parse_routing_table(text, width); },
                  py::arg("text"), py::arg("width") = kDefaultWidth)
      .def_property_readonly("width", &RoutingTable::width)
      .def("__len__", &RoutingTable::size)
      .def("add",
           [](RoutingTable& t, const std::string& bits, Port port) {
             return t.add(to_prefix(bits, port, t.width())) == RoutingTable::AddResult::kAdded;
           })
      .def("remove",
           [](RoutingTable& t, const std::string& bits) {
             const auto p = to_prefix(bits, 0, t.width());
             return t.remove(p.bits, p.length).has_value();
           })
      .def("entries",
           [](const RoutingTable& t) {
             std::vector<std::pair<std::string, Port>> out;
             for (const auto& e : t.entries()) out.emplace_back(prefix_bits_string(e, t.width()), e.port);
             return out;
           })
      .def("ports", &RoutingTable::ports)
      .def("lookup", [](const RoutingTable& t, const py::object& a) {
        return LpmTrie::build(t).lookup(to_address(a, t.width()));
      })
      .def("to_text", [](const RoutingTable& t) {
        std::ostringstream s;
        write_routing_table(s, t);
        return s.str();
      });

  py::class_<MinimizedTable>(m, "MinimizedTable")
      .def_readonly("width", &MinimizedTable::width)
      .def_readonly("strict", &MinimizedTable::strict)
      .def("__len__", &MinimizedTable::row_count)
      .def("rows",
           [](const MinimizedTable& t) {
             std::vector<std::pair<std::string, Port>> out;
             for (const auto& r : t.rows) out.emplace_back(r.cube.to_string(), r.port);
             return out;
           })
      .def("ranges",
           [](const MinimizedTable& t) {
             std::map<Port, std::pair<std::size_t, std::size_t>> out;
             for (const auto& [p, r] : t.ranges) out[p] = {r.begin, r.end};
             return out;
           })
      .def("to_text", [](const MinimizedTable& t) {
        std::ostringstream s;
        write_minimized_table(s, t);
        return s.str();
      });

  m.def("eliminate_overlaps", &eliminate_overlaps);
  m.def("compact", [](const RoutingTable& t, bool strict) { return compact(t, strict); }, py::arg("table"),
        py::arg("strict") = false, py::call_guard<py::gil_scoped_release>());

  py::class_<MstcamEngine>(m, "Engine")
      .def(py::init([](const RoutingTable& t, const py::object& stages, bool strict) {
             return MstcamEngine::from_table(t, to_config(stages, t.width()), strict);
           }),
           py::arg("table"), py::arg("stages") = py::none(), py::arg("strict") = false)
      .def_property_readonly("width", &MstcamEngine::width)
      .def_property_readonly("strict", &MstcamEngine::strict)
      .def_property_readonly("stages", [](const MstcamEngine& e) { return e.config().widths(); })
      .def_property_readonly("row_count", &MstcamEngine::row_count)
      .def_property_readonly("eps_max", &MstcamEngine::eps_max)
      .def("minimized", &MstcamEngine::minimized)
      .def("reconfigured",
           [](const MstcamEngine& e, const py::object& stages) { return e.reconfigured(to_config(stages, e.width())); })
      .def("lookup",
           [](const MstcamEngine& e, const py::object& a) {
             const auto r = e.lookup(to_address(a, e.width()));
             return py::make_tuple(r.port ? py::cast(*r.port) : py::none(), r.eps);
           })
      .def("insert",
           [](MstcamEngine& e, const std::string& bits, Port port) {
             return e.insert(to_prefix(bits, port, e.width())) == MstcamEngine::UpdateEffect::kRowsChanged;
           })
      .def("withdraw",
           [](MstcamEngine& e, const std::string& bits) {
             const auto p = to_prefix(bits, 0, e.width());
             return e.withdraw(p.bits, p.length) == MstcamEngine::UpdateEffect::kRowsChanged;
           })
      .def("measure",
           [](const MstcamEngine& e, const py::iterable& trace) {
             const auto words = to_trace(trace, e.width());
             PowerReport r;
             {
               py::gil_scoped_release release;
               r = measure(e, words);
             }
             return report_dict(r);
           })
      .def("sweep", [](const MstcamEngine& e, const std::vector<std::vector<int>>& configs, const py::iterable& trace) {
        std::vector<StageConfig> cs(configs.begin(), configs.end());
        const auto words = to_trace(trace, e.width());
        std::vector<PowerReport> reports;
        {
          py::gil_scoped_release release;
          reports = sweep_stage_configs(e, cs, words);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      });

  m.def("eps_max", &eps_max, py::arg("rows"), py::arg("width"));
  m.def("meps", [](const std::vector<std::uint64_t>& s) { return meps(s); });
  m.def("pof", &pof, py::arg("meps"), py::arg("eps_max"));
  m.def("total_pof", &total_pof, py::arg("minimization_pof"), py::arg("enabling_pof"));
  m.def("minimization_pof", &minimization_pof, py::arg("rows_before"), py::arg("rows_after"));
  m.def("equal_split_configs", [](int width) {
    std::vector<std::vector<int>> out;
    for (const auto& c : equal_split_configs(width)) out.push_back(c.widths());
    return out;
  });

  m.def(
      "generate_table",
      [](int width, std::size_t entries, Port ports, std::uint64_t seed) {
        TableParams p = TableParams::defaults_for(width, entries);
        p.ports = ports;
        return generate_table(width, p, seed);
      },
      py::arg("width"), py::arg("entries"), py::arg("ports") = 8, py::arg("seed") = 1);
  m.def("generate_trace", &generate_trace, py::arg("table"), py::arg("count"), py::arg("hit_ratio") = 0.9,
        py::arg("seed") = 1);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
