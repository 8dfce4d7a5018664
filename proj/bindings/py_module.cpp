#include "nrlab/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nrlab;

namespace {

using carray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

Field field_from_numpy(const Grid& g, const carray& a) {
    if (a.size() != g.size()) throw std::invalid_argument("array size does not match grid");
    std::vector<cplx> v(a.data(), a.data() + a.size());
    return Field::from_physical(g, std::move(v));
}

carray numpy_from_field(const Field& f, bool spectral) {
    const auto& v = spectral ? f.spectral() : f.physical();
    const Grid& g = f.grid();
    std::vector<py::ssize_t> shape(g.dim(), g.n());
    carray out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_nrlab, m) {
    m.doc() = "pseudospectral laboratory for the nonrelativistic limit of the "
              "nonlinear Klein-Gordon equation";

    py::class_<Grid>(m, "Grid")
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("n", &Grid::n)
        .def_property_readonly("length", &Grid::length)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("cell_volume", &Grid::cell_volume)
        .def("axis_wavenumbers", &Grid::axis_wavenumbers);

    m.def("make_grid", &make_grid, py::arg("dim"), py::arg("n"), py::arg("length"));

    py::class_<Field>(m, "Field")
        .def_property_readonly("grid", &Field::grid)
        .def("physical", [](const Field& f) { return numpy_from_field(f, false); })
        .def("spectral", [](const Field& f) { return numpy_from_field(f, true); });

    m.def("field", &field_from_numpy, py::arg("grid"), py::arg("values"),
          "field from a physical-space complex array");

    m.def("norm_l2", &norm_l2);
    m.def("norm_hk", &norm_hk, py::arg("f"), py::arg("k"));
    m.def("norm_lp", &norm_lp, py::arg("f"), py::arg("p"));
    m.def("norm_hck", &norm_hck, py::arg("f"), py::arg("c"), py::arg("k"),
          "relativistic Sobolev norm ||c^-k <nabla>_c^k u||_L2");

    m.def("japc_apply", &japc_apply, py::arg("f"), py::arg("c"), py::arg("k"));
    m.def("smoothing_apply", &smoothing_apply, py::arg("f"), py::arg("c"), py::arg("k"));
    m.def("lp_projector", &lp_projector, py::arg("f"), py::arg("j"));
    m.def("lp_cutoff", &lp_cutoff, py::arg("f"), py::arg("N"));
    m.def("sharp_projector", &sharp_projector, py::arg("f"), py::arg("N"));
    m.def("to_complex", &to_complex, py::arg("u"), py::arg("v"), py::arg("c"));
    m.def("from_complex", &from_complex, py::arg("psi"), py::arg("c"));

    m.def("kg_linear_flow", &kg_linear_flow, py::arg("psi0"), py::arg("c"), py::arg("t"));
    m.def("ur_linear_flow", &ur_linear_flow, py::arg("psi0"), py::arg("c"), py::arg("r"),
          py::arg("t"));

    m.def(
        "normal_form",
        [](int l, int r, bool complex_case) {
            const NormalForm nf = normal_form(l, r, complex_case);
            py::dict out;
            py::list Z, chi;
            for (const auto& z : nf.Z) Z.append(z.str());
            for (const auto& c : nf.chi) chi.append(c.str());
            out["Z"] = Z;
            out["chi"] = chi;
            out["certified"] = nf.certified;
            return out;
        },
        py::arg("l"), py::arg("r"), py::arg("complex_case") = false,
        "order-r normal form; Z_j and chi_j in canonical text form");

    m.def(
        "lie_transform",
        [](const Field& f, double c, double lambda, int l, bool forward) {
            PhysicalParams p{c, lambda, l};
            return lie_transform(f, p, forward ? LieDirection::forward : LieDirection::inverse);
        },
        py::arg("f"), py::arg("c"), py::arg("lambda"), py::arg("l") = 2,
        py::arg("forward") = true);

    m.def(
        "evolve",
        [](const Field& psi0, const std::string& system, double c, double lambda, int l,
           double dt, double t_end, int r) {
            EvolutionSpec spec;
            spec.system = system_from_string(system);
            spec.params = {c, lambda, l};
            spec.r = r;
            spec.dt = dt;
            spec.t_end = t_end;
            const Trajectory tr = evolve(spec, psi0);
            py::dict out;
            out["times"] = tr.times;
            py::list fields;
            for (const auto& f : tr.samples) fields.append(numpy_from_field(f, false));
            out["fields"] = fields;
            out["hamiltonian"] = tr.hamiltonian;
            out["mass"] = tr.mass;
            return out;
        },
        py::arg("psi0"), py::arg("system"), py::arg("c"), py::arg("lambda"), py::arg("l") = 2,
        py::arg("dt") = 1e-3, py::arg("t_end") = 1.0, py::arg("r") = 1);

    m.def(
        "run_experiment",
        [](const std::string& config_text) {
            const ExperimentConfig cfg = parse_config_text(config_text);
            py::dict out;
            switch (cfg.experiment) {
                case ExperimentTag::linear_longtime: {
                    const auto rep = exp_linear_longtime(cfg);
                    out["csv"] = rep.csv();
                    out["slope"] = rep.slope;
                    out["pass"] = rep.pass;
                    break;
                }
                case ExperimentTag::nonlinear_locuniform: {
                    const auto rep = exp_nonlinear_locuniform(cfg);
                    out["csv"] = rep.csv();
                    out["slope"] = rep.slope;
                    out["pass"] = rep.pass;
                    break;
                }
                case ExperimentTag::transform_gain: {
                    const auto rep = exp_transform_gain(cfg);
                    out["csv"] = rep.transformed.csv();
                    out["slope"] = rep.transformed.slope;
                    out["untransformed_slope"] = rep.untransformed.slope;
                    out["pass"] = rep.transformed.pass && rep.untransformed.pass;
                    break;
                }
                case ExperimentTag::global_bound: {
                    const auto rep = exp_global_bound(cfg);
                    out["csv"] = rep.csv();
                    out["pass"] = rep.pass;
                    break;
                }
                case ExperimentTag::scaling_identity: {
                    const auto rep = exp_scaling_identity(cfg);
                    out["csv"] = rep.csv();
                    out["pass"] = rep.pass;
                    break;
                }
                case ExperimentTag::galerkin_tail: {
                    const auto rep = exp_galerkin_tail(cfg);
                    out["csv"] = rep.csv();
                    out["pass"] = rep.pass;
                    break;
                }
            }
            return out;
        },
        py::arg("config_text"), "run an experiment from flat key=value config text");

    m.def("validate", [] {
        const ValidationResult res = run_validation_suite();
        py::dict out;
        out["summary"] = res.summary();
        out["pass"] = res.all_pass();
        return out;
    });
}
