#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dce/config.hpp"
#include "dce/errors.hpp"
#include "dce/perturbation.hpp"
#include "dce/runner.hpp"

namespace py = pybind11;
using namespace dce;

namespace {

// Configs cross the boundary as JSON text; the Python side owns (de)serialization.
RunConfig parse(const std::string& text, const std::vector<std::string>& overrides) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = config_from_json(j);
  for (const auto& o : overrides) apply_override(c, o);
  validate_config(c);
  return c;
}

py::dict result_dict(const RunResult& r) {
  py::dict files;
  for (const auto& f : r.files) files[py::str(f.name)] = f.content;
  py::dict out;
  out["config"] = to_json(r.config).dump();
  out["files"] = files;
  out["log"] = r.log;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamical Casimir effect simulator core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<LabelError>(m, "LabelError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());

  m.def("preset_ids", &preset_ids);
  m.def("preset_config", [](const std::string& id) { return to_json(preset_config(id)).dump(); });
  m.def("normalize_config", [](const std::string& text, const std::vector<std::string>& overrides) {
    return to_json(parse(text, overrides)).dump();
  }, py::arg("config"), py::arg("overrides") = std::vector<std::string>{});
  m.def("execute", [](const std::string& text, const std::vector<std::string>& overrides) {
    const RunConfig c = parse(text, overrides);
    RunResult r;
    {
      py::gil_scoped_release release;
      r = execute(c);
    }
    return result_dict(r);
  }, py::arg("config"), py::arg("overrides") = std::vector<std::string>{});
  m.def("execute_to", [](const std::string& text, const std::string& dir, const std::vector<std::string>& overrides) {
    const RunConfig c = parse(text, overrides);
    std::vector<std::string> paths;
    {
      py::gil_scoped_release release;
      for (const auto& p : write_outputs(execute(c), dir)) paths.push_back(p.string());
    }
    return paths;
  }, py::arg("config"), py::arg("out"), py::arg("overrides") = std::vector<std::string>{});

  auto pt = m.def_submodule("perturbation", "closed-form qubit results");
  pt.def("c4_far", &perturbation::c4_far, py::arg("nu"), py::arg("E1"), py::arg("g1"), py::arg("k"));
  pt.def("c_near", &perturbation::c_near, py::arg("nu"), py::arg("E1"), py::arg("g1"), py::arg("k"));
  pt.def("a_near", &perturbation::a_near, py::arg("nu"), py::arg("E1"), py::arg("g1"), py::arg("k"));
  pt.def("theta_near", &perturbation::theta_near, py::arg("nu"), py::arg("E1"), py::arg("g1"), py::arg("eps"),
         py::arg("k"));
  pt.def("degenerate_E1", &perturbation::degenerate_E1, py::arg("nu"), py::arg("g1"), py::arg("k"),
         py::arg("lo") = 2.5, py::arg("hi") = 3.5);
  pt.def("theta_max_bound", &perturbation::theta_max_bound, py::arg("nu"), py::arg("g1"), py::arg("eps"),
         py::arg("k"));
}
