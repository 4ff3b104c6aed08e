#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectrace/experiments.hpp"

namespace py = pybind11;
using namespace spectrace;

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

TraceVector stabilized(const std::vector<double>& values, double alpha0) {
  return {values, TraceKind::stabilized, alpha0};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Damping recovery for the 1-D damped wave equation from its spectrum";

  py::class_<FourierDamping>(m, "FourierDamping")
      .def(py::init<std::vector<double>>(), py::arg("coeffs"))
      .def_static("constant", &FourierDamping::constant)
      .def_static(
          "project",
          [](const std::function<double(double)>& alpha, int m, const std::vector<double>& bp,
             int quad_nodes) { return FourierDamping::project(alpha, m, bp, quad_nodes); },
          py::arg("alpha"), py::arg("m"),
                  py::arg("breakpoints") = std::vector<double>{}, py::arg("quad_nodes") = 2048)
      .def("__call__", [](const FourierDamping& a, double x) { return a(x); }, py::arg("x"))
      .def(
          "__call__",
          [](const FourierDamping& a, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
            py::array_t<double> out(x.request().shape);
            const double* in = x.data();
            double* o = out.mutable_data();
            for (py::ssize_t i = 0; i < x.size(); ++i) o[i] = a(in[i]);
            return out;
          },
          py::arg("x"))
      .def("resized", &FourierDamping::resized)
      .def_property_readonly("coeffs", &FourierDamping::coeffs)
      .def_property_readonly("mean", &FourierDamping::mean)
      .def("__len__", &FourierDamping::size)
      .def("__eq__", [](const FourierDamping& a, const FourierDamping& b) { return a == b; })
      .def("__repr__", [](const FourierDamping& a) {
        return "FourierDamping(" + py::repr(py::cast(a.coeffs())).cast<std::string>() + ")";
      });

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("eigs", &Spectrum::eigs)
      .def_readonly("labels", &Spectrum::labels)
      .def_readonly("warnings", &Spectrum::warnings)
      .def("pair_count", &Spectrum::pair_count)
      .def("at", &Spectrum::at, py::arg("label"))
      .def("truncated", &Spectrum::truncated)
      .def("__len__", &Spectrum::pair_count);

  m.def("make_spectrum", &make_spectrum, py::arg("positive"), py::arg("negative"));
  m.def(
      "forward_spectrum",
      [](const std::function<double(double)>& alpha, int n_cheb, int k) {
        const GridOperator g = build_grid_operator(n_cheb);
        std::vector<double> vals(static_cast<std::size_t>(g.interior_size()));
        for (int i = 0; i < g.interior_size(); ++i) vals[i] = alpha(g.grid_x(i));
        return forward_spectrum(g, vals, k);
      },
      py::arg("alpha"), py::arg("n_cheb") = 400, py::arg("k") = 0,
      "Eigenvalues of the collocated damped wave operator; alpha is any callable on [0,1].");
  m.def("example_spectrum",
        [](const std::string& example, int n_cheb) {
          ExperimentConfig cfg;
          cfg.example = example_from_string(example);
          cfg.n_cheb = n_cheb;
          return generate_spectrum(cfg);
        },
        py::arg("example"), py::arg("n_cheb") = 400);
  m.def("example_damping",
        [](const std::string& example) { return example_damping(example_from_string(example)).alpha; },
        py::arg("example"), "Closed-form damping profile of a reference example as a callable.");
  m.def("constant_damping_spectrum", &constant_damping_spectrum, py::arg("c"), py::arg("k"));
  m.def("add_noise",
        [](const Spectrum& s, double delta, std::uint64_t seed) { return add_noise(s, {delta, seed}); },
        py::arg("spectrum"), py::arg("delta"), py::arg("seed") = 0);

  m.def("mn_traces",
        [](const FourierDamping& a, int j_trunc, int n_max) {
          return to_eigen(mn_traces(ModalMatrixSet(a, j_trunc), n_max).values);
        },
        py::arg("a"), py::arg("j_trunc"), py::arg("n_max"));
  m.def("tn_matrix_traces",
        [](const FourierDamping& a, int j_trunc, double alpha0, int n_max) {
          return to_eigen(tn_matrix_traces(ModalMatrixSet(a, j_trunc), alpha0, n_max).values);
        },
        py::arg("a"), py::arg("j_trunc"), py::arg("alpha0"), py::arg("n_max"));
  m.def("trace_jacobian",
        [](const FourierDamping& a, int j_trunc, double alpha0, int n_max) {
          return trace_jacobian(ModalMatrixSet(a, j_trunc), alpha0, n_max);
        },
        py::arg("a"), py::arg("j_trunc"), py::arg("alpha0"), py::arg("n_max"));
  m.def("spectral_traces",
        [](const Spectrum& s, double alpha0, int n_max, int k_meas, int k_tail) {
          return to_eigen(spectral_traces(s, alpha0, n_max, k_meas, k_tail).values);
        },
        py::arg("spectrum"), py::arg("alpha0"), py::arg("n_max"), py::arg("k_meas"),
        py::arg("k_tail"));
  m.def("raw_power_traces",
        [](const Spectrum& s, int n_max, int k_meas, int k_tail, double alpha0) {
          return to_eigen(raw_power_traces(s, n_max, k_meas, k_tail, alpha0).values);
        },
        py::arg("spectrum"), py::arg("n_max"), py::arg("k_meas"), py::arg("k_tail"),
        py::arg("alpha0"));
  m.def("tn_scalar", &tn_scalar, py::arg("z"), py::arg("n"), py::arg("alpha0"));
  m.def("estimate_alpha0", &estimate_alpha0, py::arg("spectrum"), py::arg("k_use"));

  py::enum_<StepControl>(m, "StepControl")
      .value("full_step", StepControl::full_step)
      .value("damped", StepControl::damped);

  py::class_<GNConfig>(m, "GNConfig")
      .def(py::init<>())
      .def_readwrite("k_meas", &GNConfig::k_meas)
      .def_readwrite("m_modes", &GNConfig::m_modes)
      .def_readwrite("j_trunc", &GNConfig::j_trunc)
      .def_readwrite("n_polys", &GNConfig::n_polys)
      .def_readwrite("k_tail", &GNConfig::k_tail)
      .def_readwrite("max_iter", &GNConfig::max_iter)
      .def_readwrite("tol", &GNConfig::tol)
      .def_readwrite("initial_guess", &GNConfig::initial_guess)
      .def_readwrite("step_control", &GNConfig::step_control)
      .def_readwrite("damping_factor", &GNConfig::damping_factor)
      .def_readwrite("max_halvings", &GNConfig::max_halvings)
      .def_readwrite("div_limit", &GNConfig::div_limit)
      .def("tolerance", &GNConfig::tolerance);

  py::class_<InversionRun>(m, "InversionRun")
      .def_readonly("final", &InversionRun::final)
      .def_readonly("converged", &InversionRun::converged)
      .def_readonly("status", &InversionRun::status)
      .def_readonly("alpha0", &InversionRun::alpha0)
      .def_readonly("warnings", &InversionRun::warnings)
      .def_property_readonly("residual_norms", &InversionRun::residual_norms)
      .def_property_readonly("steps", &InversionRun::steps);

  m.def("gauss_newton",
        [](const std::vector<double>& target, double alpha0, const GNConfig& cfg) {
          return gauss_newton(stabilized(target, alpha0), cfg);
        },
        py::arg("target"), py::arg("alpha0"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("multistep_schedule",
        [](const std::vector<double>& target, double alpha0, const GNConfig& cfg,
           const std::vector<int>& schedule) {
          return multistep_schedule(stabilized(target, alpha0), cfg, schedule);
        },
        py::arg("target"), py::arg("alpha0"), py::arg("config"), py::arg("schedule"),
        py::call_guard<py::gil_scoped_release>());
  m.def("l2_error",
        [](const FourierDamping& a, const std::function<double(double)>& alpha,
           const std::vector<double>& breakpoints) { return l2_error(a, alpha, breakpoints); },
        py::arg("a"), py::arg("alpha_true"), py::arg("breakpoints") = std::vector<double>{});
}
