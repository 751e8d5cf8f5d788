#include "dcmba/baseline.hpp"
#include "dcmba/driver.hpp"
#include "dcmba/instances.hpp"
#include "dcmba/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace dcmba;

namespace {

// stl.h converts std::variant to a Python union, so the instance travels in a holder.
struct PyInstance {
  Instance inst;
};

// Reports and configs cross the boundary as JSON text; the Python side parses them.
std::string solve(const PyInstance& holder, const std::string& algo, const std::string& config,
                  const std::optional<Vector>& x0, bool trace) {
  const Instance& inst = holder.inst;
  const json cfg = config.empty() ? json::object() : json::parse(config);
  json run_config;
  SolveReport rep;
  {
    py::gil_scoped_release release;
    if (algo == "dca") {
      const auto* q = std::get_if<QCQPInstance>(&inst);
      if (!q) throw std::invalid_argument("algo 'dca' supports qcqp instances only");
      const DcaConfig c = dca_config_from_json(cfg);
      rep = dca_run(*q, x0.value_or(q->x0), c);
      run_config = {{"algo", algo}, {"solver", to_json(c)}};
    } else if (algo == "imba") {
      const IMBAConfig c = imba_config_from_json(cfg);
      rep = run(make_problem(inst), x0.value_or(instance_x0(inst)), c);
      run_config = {{"algo", algo}, {"solver", to_json(c)}};
    } else {
      throw std::invalid_argument("unknown algo '" + algo + "'");
    }
  }
  return report_to_json(rep, run_config, instance_checksum(inst), trace).dump();
}

}  // namespace

PYBIND11_MODULE(_dcmba, m) {
  m.doc() = "Inexact moving balls for constrained DC problems";

  py::register_exception<InfeasibleStartError>(m, "InfeasibleStartError", PyExc_ValueError);
  py::register_exception<InstanceFormatError>(m, "InstanceFormatError", PyExc_ValueError);

  py::class_<PyInstance>(m, "Instance")
      .def_property_readonly("kind", [](const PyInstance& i) { return instance_kind(i.inst); })
      .def_property_readonly("n", [](const PyInstance& i) { return instance_x0(i.inst).size(); })
      .def_property_readonly("m", [](const PyInstance& i) {
        return std::visit([](const auto& v) { return v.cons.size(); }, i.inst);
      })
      .def_property_readonly("x0", [](const PyInstance& i) { return instance_x0(i.inst); })
      .def_property_readonly("checksum", [](const PyInstance& i) { return instance_checksum(i.inst); })
      .def("constraints", [](const PyInstance& i, const Vector& x) {
        return std::visit([&](const auto& v) { return v.cons.value(x); }, i.inst);
      })
      .def("objective", [](const PyInstance& i, const Vector& x) { return eval_F(make_problem(i.inst), x); })
      .def("__repr__", [](const PyInstance& i) {
        return "<Instance " + instance_kind(i.inst) + " n=" + std::to_string(instance_x0(i.inst).size()) + " " +
               instance_checksum(i.inst) + ">";
      });

  m.def(
      "gen_qcqp",
      [](int n, int m, double omega0, double p_scale, double phi_weight, std::optional<double> psi_weight,
         double cond_exponent, std::uint64_t seed) {
        QCQPParams p;
        p.n = n;
        p.m = m;
        p.omega0 = omega0;
        p.P_scale = p_scale;
        p.phi_weight = phi_weight;
        p.psi_weight = psi_weight.value_or(p_scale > 0.0 ? 0.01 : 0.0);
        p.cond_exponent = cond_exponent;
        p.seed = seed;
        return PyInstance{gen_qcqp(p)};
      },
      py::arg("n") = 30, py::arg("m") = 10, py::arg("omega0") = 10.0, py::arg("p_scale") = 0.0,
      py::arg("phi_weight") = 0.01, py::arg("psi_weight") = py::none(), py::arg("cond_exponent") = 4.0,
      py::arg("seed") = 1);

  m.def(
      "gen_student_t",
      [](int n, int m, double p_scale, double phi_weight, double psi_weight, double cond_exponent,
         std::uint64_t seed) {
        StudentTParams p;
        p.n = n;
        p.m = m;
        p.P_scale = p_scale;
        p.phi_weight = phi_weight;
        p.psi_weight = psi_weight;
        p.cond_exponent = cond_exponent;
        p.seed = seed;
        return PyInstance{gen_student_t(p)};
      },
      py::arg("n") = 80, py::arg("m") = 10, py::arg("p_scale") = 0.0, py::arg("phi_weight") = 0.01,
      py::arg("psi_weight") = 0.01, py::arg("cond_exponent") = 4.0, py::arg("seed") = 1);

  m.def("load_instance", [](const std::filesystem::path& p) { return PyInstance{load_instance(p)}; }, py::arg("path"));
  m.def("save_instance", [](const PyInstance& i, const std::filesystem::path& p) { save_instance(i.inst, p); },
        py::arg("instance"), py::arg("path"));
  m.def("solve_json", &solve, py::arg("instance"), py::arg("algo") = "imba", py::arg("config") = "",
        py::arg("x0") = py::none(), py::arg("trace") = false);
  m.def("default_config", [](const std::string& algo) {
    return algo == "dca" ? to_json(DcaConfig{}).dump() : to_json(IMBAConfig{}).dump();
  }, py::arg("algo") = "imba");
}
