#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alh/cli.hpp"
#include "alh/cohomology.hpp"
#include "alh/errors.hpp"
#include "alh/geometry.hpp"
#include "alh/hk.hpp"
#include "alh/indicial.hpp"
#include "alh/operators.hpp"

namespace py = pybind11;
using namespace alh;

namespace {

ModeReducedOp op_by_name(const std::string& s) {
    if (s == "scalar") return reduced_scalar_b();
    if (s == "d00-even") return reduced_D00(Parity::even);
    if (s == "d00-odd") return reduced_D00(Parity::odd);
    throw UsageError("unknown operator '" + s + "'");
}

} // namespace

PYBIND11_MODULE(_alhlab, m) {
    m.doc() = "Exact and numerical checks for the ALH* model geometry.";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release nogil;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the alh-lab front end; returns (exit_code, stdout, stderr).");

    m.def("json_to_csv", &json_to_csv);

    m.def("l2_hodge_dim", &l2_hodge_dim, py::arg("b"), py::arg("k"));
    m.def(
        "moduli_dim",
        [](int b) {
            auto d = moduli_dim(b);
            return py::dict(py::arg("total") = d.total, py::arg("anti_self_dual") = d.anti_self_dual,
                            py::arg("at_infinity") = d.at_infinity);
        },
        py::arg("b"));
    m.def("wh_interval", &wh_interval, py::arg("degree"), py::arg("gamma"));

    m.def(
        "indicial_roots",
        [](const std::string& name) {
            py::list out;
            for (auto& r : indicial_roots(indicial_poly(op_by_name(name))))
                out.append(py::make_tuple(r.value, r.imag, r.multiplicity));
            return out;
        },
        py::arg("operator"), "Roots of the indicial determinant as (real, imag, multiplicity).");

    m.def(
        "is_ricci_flat",
        [](const std::string& metric) {
            if (metric == "gh") return is_ricci_flat(curvature(metric_gh()));
            if (metric == "a") return is_ricci_flat(curvature(metric_a()));
            if (metric == "model") return is_ricci_flat(curvature(metric_model()));
            throw UsageError("unknown metric '" + metric + "'");
        },
        py::arg("metric"));

    m.def(
        "symmetrize",
        [](const Eigen::Matrix3d& A, const Eigen::Matrix3d& B) {
            auto s = symmetrize(A, B);
            return py::make_tuple(s.U, s.At, s.Bt);
        },
        py::arg("A"), py::arg("B"), "Polar normal form (U, U A, U B) with U A symmetric positive definite.");
}
