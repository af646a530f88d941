#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hjc/cli.hpp"
#include "hjc/error.hpp"

namespace py = pybind11;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

hjc::SystemSpec load_any(const std::string& path, bool is_text) {
  return is_text ? hjc::parse_system(path) : hjc::load_system(path);
}

py::dict trajectory_dict(const hjc::Trajectory& tr) {
  py::dict d;
  d["columns"] = tr.columns;
  d["rows"] = tr.rows;
  d["method"] = tr.method;
  d["step"] = tr.step;
  d["steps"] = tr.steps;
  d["estimated_error"] = tr.estimated_error;
  d["drift"] = tr.drift;
  d["flagged"] = tr.flagged;
  d["action"] = tr.action();
  return d;
}

}  // namespace

PYBIND11_MODULE(hjcanon, m) {
  m.doc() = "Hamilton-Jacobi analysis of singular Lagrangians";

  static py::exception<hjc::Error> base(m, "HjcError");
  static py::exception<hjc::ParseError> parse_exc(m, "ParseError", base.ptr());
  static py::exception<hjc::OffSurfaceError> off_exc(m, "OffSurfaceError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const hjc::ParseError& e) {
      py::set_error(parse_exc, e.what());
    } catch (const hjc::OffSurfaceError& e) {
      py::set_error(off_exc, e.what());
    } catch (const hjc::Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<hjc::Pipeline>(m, "Analysis")
      .def_property_readonly("name", [](const hjc::Pipeline& p) { return p.spec.name; })
      .def_property_readonly("coordinates", [](const hjc::Pipeline& p) { return p.spec.coordinates; })
      .def_property_readonly("verdict", [](const hjc::Pipeline& p) { return hjc::verdict_name(p.active().verdict); })
      .def_property_readonly("constraints",
                             [](const hjc::Pipeline& p) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& e : p.active().constraints.entries) {
                                 out.emplace_back(e.label, e.expr.str());
                               }
                               return out;
                             })
      .def("report", [](const hjc::Pipeline& p) { return json_loads(hjc::report_to_json(p.make_report())); })
      .def("text", [](const hjc::Pipeline& p) { return hjc::report_to_text(p.make_report()); })
      .def(
          "integrate",
          [](const hjc::Pipeline& p, const std::map<std::string, double>& ic, double t0, double t1, double step,
             const std::vector<std::string>& params, const std::vector<std::string>& consts,
             const std::vector<std::string>& defines) {
            const auto ctx = hjc::make_context(p.spec, consts, defines);
            hjc::IntegrateOptions o;
            o.t0 = t0;
            o.t1 = t1;
            o.step = step;
            const auto paths = hjc::parse_paths(params, p.active(), p.active_table());
            return trajectory_dict(hjc::integrate(p.active(), paths, ic, ctx, o));
          },
          py::arg("ic"), py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("step") = 1e-3,
          py::arg("params") = std::vector<std::string>{"determined"}, py::arg("consts") = std::vector<std::string>{},
          py::arg("defines") = std::vector<std::string>{})
      .def(
          "propagator",
          [](const hjc::Pipeline& p, const std::map<std::string, double>& initial,
             const std::map<std::string, double>& final, double t0, double t1, const std::vector<int>& slices,
             const std::vector<std::string>& consts, const std::vector<std::string>& defines) {
            const auto ctx = hjc::make_context(p.spec, consts, defines);
            hjc::SlicingPlan plan;
            plan.t0 = t0;
            plan.t1 = t1;
            if (!slices.empty()) plan.slices = slices;
            for (const auto& [k, v] : initial) plan.initial[p.active_table().lookup(k)] = v;
            for (const auto& [k, v] : final) plan.final[p.active_table().lookup(k)] = v;
            const auto r = hjc::propagate_quadratic(p.active().constraints, ctx, plan);
            py::dict d;
            d["value"] = r.value;
            d["error"] = r.error;
            d["n_sequence"] = r.n_sequence;
            d["raw"] = r.raw;
            d["warnings"] = r.warnings;
            return d;
          },
          py::arg("initial"), py::arg("final"), py::arg("t0") = 0.0, py::arg("t1") = 1.0,
          py::arg("slices") = std::vector<int>{}, py::arg("consts") = std::vector<std::string>{},
          py::arg("defines") = std::vector<std::string>{})
      .def(
          "ground_state_energy",
          [](const hjc::Pipeline& p, int slices, double beta, long sweeps, std::uint64_t seed,
             const std::vector<std::string>& consts, const std::vector<std::string>& defines) {
            const auto ctx = hjc::make_context(p.spec, consts, defines);
            hjc::MonteCarloOptions o;
            o.slices = slices;
            o.beta = beta;
            o.sweeps = sweeps;
            o.seed = seed;
            const auto r = hjc::propagate_euclidean_mc(p.active().constraints, ctx, o);
            return py::make_tuple(r.value.real(), r.error, r.acceptance);
          },
          py::arg("slices") = 64, py::arg("beta") = 8.0, py::arg("sweeps") = 100000, py::arg("seed") = 1,
          py::arg("consts") = std::vector<std::string>{}, py::arg("defines") = std::vector<std::string>{});

  m.def(
      "analyze",
      [](const std::string& source, std::optional<std::string> transform, int max_iter, bool waive, bool is_text) {
        return hjc::run_pipeline(load_any(source, is_text), transform, max_iter, waive);
      },
      py::arg("source"), py::arg("transform") = py::none(), py::arg("max_iter") = 16,
      py::arg("waive_canonicity") = false, py::arg("is_text") = false,
      "Analyze a system file, or system text when is_text is set.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = hjc::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
