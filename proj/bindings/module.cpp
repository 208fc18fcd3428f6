#include "cnls/acceptance.hpp"
#include "cnls/cli.hpp"
#include "cnls/errors.hpp"
#include "cnls/linearized.hpp"
#include "cnls/mass.hpp"
#include "cnls/pipeline.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cnls;

namespace {

py::array_t<double> array(const std::vector<double>& v, const Grid& g)
{
    std::vector<py::ssize_t> shape;
    for (int d = 0; d < g.dim; ++d) shape.push_back(g.n[d]);
    py::array_t<double> a(shape);
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict state_dict(const SolvedState& st)
{
    py::dict d;
    d["u"] = array(st.fields.u, st.fields.grid);
    d["v"] = array(st.fields.v, st.fields.grid);
    std::vector<double> x0(st.fields.grid.x0.begin(), st.fields.grid.x0.begin() + st.fields.grid.dim);
    d["x0"] = x0;
    d["h"] = st.fields.grid.h;
    d["meta"] = st.to_json();
    return d;
}

} // namespace

PYBIND11_MODULE(_impl, m)
{
    m.doc() = "coupled NLS concentration solver";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<NotApplicable>(m, "NotApplicable", PyExc_ValueError);

    py::class_<GroundState, std::shared_ptr<GroundState>>(m, "GroundState")
        .def_readonly("dim", &GroundState::dim)
        .def_readonly("r_max", &GroundState::r_max)
        .def_readonly("r", &GroundState::r_grid)
        .def_readonly("values", &GroundState::values)
        .def_readonly("tail_constant", &GroundState::tail_constant)
        .def_readonly("residual", &GroundState::residual)
        .def_property_readonly("w0", &GroundState::w0)
        .def("w",
             [](const GroundState& g, py::array_t<double, py::array::c_style | py::array::forcecast> r) {
                 py::array_t<double> out(r.request().shape);
                 for (py::ssize_t i = 0; i < r.size(); ++i) out.mutable_data()[i] = g.w(r.data()[i]);
                 return out;
             })
        .def("moment", &GroundState::moment, py::arg("p"), py::arg("m") = 0)
        .def("table", [](const GroundState& g) {
            std::ostringstream os;
            write_ground_state(os, g);
            return os.str();
        });

    m.def(
        "solve_ground_state",
        [](int dim, double r_max, int n_nodes) {
            py::gil_scoped_release release;
            return std::make_shared<GroundState>(solve_ground_state(dim, r_max, n_nodes));
        },
        py::arg("dim") = 2, py::arg("r_max") = 20.0, py::arg("n_nodes") = 400);
    m.def("shoot_w0", [](int dim) { return shoot_w0(dim); }, py::arg("dim") = 2);

    py::class_<CouplingParams>(m, "CouplingParams")
        .def_readonly("mu1", &CouplingParams::mu1)
        .def_readonly("mu2", &CouplingParams::mu2)
        .def_readonly("beta", &CouplingParams::beta)
        .def_readonly("sigma1", &CouplingParams::sigma1)
        .def_readonly("sigma2", &CouplingParams::sigma2);
    m.def("coupling_sigmas", &coupling_sigmas, py::arg("mu1"), py::arg("mu2"), py::arg("beta"));
    m.def("admissible", &admissible, py::arg("mu1"), py::arg("mu2"), py::arg("beta"));
    m.def("admissible_intervals", &admissible_intervals, py::arg("mu1"), py::arg("mu2"));

    m.def(
        "kernel_diagnostics",
        [](std::shared_ptr<GroundState> gs, double mu1, double mu2, double beta, int n_modes) {
            return kernel_diagnostics(make_profiles(gs, coupling_sigmas(mu1, mu2, beta)), n_modes).to_json();
        },
        py::arg("ground_state"), py::arg("mu1"), py::arg("mu2"), py::arg("beta"), py::arg("n_modes") = 6);

    m.def("wz0_integral", [](const GroundState& g) { return solve_z0_radial(g).wz0_integral; });
    m.def("scalar_virial_check", [](const GroundState& g) { return scalar_virial_check(g).to_json(); });
    m.def("sigma_identity_check", [](const CouplingParams& c) { return sigma_identity_check(c).to_json(); });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init(&default_config))
        .def_readwrite("mode", &RunConfig::mode)
        .def_readwrite("dim", &RunConfig::dim)
        .def_readwrite("mu1", &RunConfig::mu1)
        .def_readwrite("mu2", &RunConfig::mu2)
        .def_readwrite("beta", &RunConfig::beta)
        .def_readwrite("margin", &RunConfig::margin_y)
        .def_readwrite("spacing", &RunConfig::h_y)
        .def_readwrite("epsilon", &RunConfig::epsilon)
        .def_readwrite("sweep_parameter", &RunConfig::sweep_parameter)
        .def_readwrite("sweep_values", &RunConfig::sweep_values)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("jobs", &RunConfig::jobs)
        .def_readwrite("out", &RunConfig::out)
        .def_property_readonly("n_wells", [](const RunConfig& c) { return c.spec.wells.size(); })
        .def("validate", &RunConfig::validate);
    m.def("load_config", &load_config, py::arg("path"));

    m.def(
        "solve",
        [](const RunConfig& cfg, std::optional<double> eps) {
            py::gil_scoped_release release;
            cfg.validate();
            auto gs = std::make_shared<const GroundState>(solve_ground_state(cfg.dim, cfg.r_max, cfg.n_nodes));
            Problem pr = make_problem(cfg, gs);
            SolvedState st = solve_at(eps.value_or(cfg.epsilon), pr, cfg.solver, cfg.margin_y, cfg.h_y);
            py::gil_scoped_acquire acquire;
            return state_dict(st);
        },
        py::arg("config"), py::arg("epsilon") = py::none());

    m.def(
        "sweep_csv",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            cfg.validate();
            auto gs = std::make_shared<const GroundState>(solve_ground_state(cfg.dim, cfg.r_max, cfg.n_nodes));
            SweepOutcome s = epsilon_sweep(make_problem(cfg, gs), cfg.sweep_values, cfg);
            std::ostringstream os;
            write_sweep_csv(os, s);
            return std::make_pair(os.str(), reports_json(s.reports));
        },
        py::arg("config"));

    m.def(
        "run_mode",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            std::ostringstream log;
            const int rc = run_mode(cfg, log);
            return std::make_pair(rc, log.str());
        },
        py::arg("config"));

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            py::gil_scoped_release release;
            std::ostringstream out, err;
            const int rc = cli_main(args, out, err);
            return std::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"));
}
