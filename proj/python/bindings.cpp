#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/iostream.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "toalab/distribution.hpp"
#include "toalab/expectation.hpp"
#include "toalab/runner.hpp"
#include "toalab/semiclassical.hpp"

namespace py = pybind11;
using namespace toalab;

namespace {

Spectrum make_spectrum(const PhysicalParams& p, double box_lo, double box_hi, int n, Frame frame, int gregory,
                       int threads) {
    py::gil_scoped_release nogil;
    return eigensystem(discretize({p, frame}, Box{box_lo, box_hi}, n, gregory, threads));
}

py::dict expectation(const WavepacketSpec& s, const PhysicalParams& p, Frame frame, bool centered, double tol,
                     int threads) {
    QuadControl q;
    q.tol = tol;
    q.threads = threads;
    ExpectationResult r;
    {
        py::gil_scoped_release nogil;
        ComplexAmplitude phi = gaussian(s, p);
        r = centered ? expect_toa_centered(phi, {p, frame}, q) : expect_toa_exact(phi, {p, frame}, q);
    }
    py::dict d;
    d["value"] = r.value;
    d["imag_residue"] = r.imag_residue;
    d["change"] = r.change;
    d["panels"] = r.panels;
    d["warnings"] = r.warnings;
    return d;
}

py::dict leading(const WavepacketSpec& s, const PhysicalParams& p, CutSide side) {
    Warnings w;
    LeadingExpansion le = leading_expansion(s, p, side, &w);
    py::dict d;
    d["tau0"] = le.classical;
    d["alpha2_hbar2"] = le.correction2;
    d["total"] = le.total;
    d["complex_regime"] = le.complex_regime;
    d["warnings"] = w.items;
    return d;
}

py::dict distribution(const WavepacketSpec& s, const PhysicalParams& p, const Spectrum& sp,
                      const std::vector<double>& grid) {
    TOADistribution d = toa_distribution(gaussian(s, p), sp, grid);
    py::dict o;
    o["tau"] = d.tau;
    o["density"] = d.density;
    o["cdf"] = d.cdf;
    o["eig_tau"] = d.eig_tau;
    o["weight"] = d.weight;
    o["total_weight"] = d.total_weight;
    o["mean"] = d.mean;
    o["stddev"] = d.stddev;
    o["mode"] = d.mode;
    o["peak"] = d.peak;
    o["warnings"] = d.warnings;
    return o;
}

py::dict covariance(const WavepacketSpec& s, const PhysicalParams& p, double t, const Spectrum& sp) {
    CovarianceResult r = covariance_check(s, p, t, sp);
    py::dict o;
    o["t"] = r.t;
    o["ks"] = r.ks;
    o["density_sup"] = r.density_sup;
    o["density_l1"] = r.density_l1;
    o["mean_shift"] = r.mean_shift;
    o["box_escape"] = r.box_escape;
    o["warnings"] = r.warnings;
    return o;
}

py::tuple run_cli(const std::string& sub, std::optional<std::string> config, const std::string& out,
                  std::optional<std::string> target, std::optional<int> threads, std::optional<double> tolerance) {
    RunOptions o;
    o.subcommand = sub;
    o.config_path = config;
    o.out_dir = out;
    if (target) o.target = *target;
    o.threads = threads;
    o.tolerance = tolerance;
    std::ostringstream log, err;
    int code;
    {
        py::gil_scoped_release nogil;
        code = run(o, log, err);
    }
    return py::make_tuple(code, log.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_toalab, m) {
    m.doc() = "Quantum time-of-arrival toolkit for a projectile in uniform gravity";
    m.attr("__version__") = kVersion;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<CutSide>(m, "CutSide").value("below", CutSide::below).value("above", CutSide::above);
    py::enum_<Frame>(m, "Frame").value("launch", Frame::launch).value("position", Frame::position);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double hbar, double g, double m_inertial, double m_grav) {
                 PhysicalParams p{hbar, g, m_inertial, m_grav};
                 p.validate();
                 return p;
             }),
             py::arg("hbar") = 1.0, py::arg("g") = 1.0, py::arg("m_inertial") = 1.0, py::arg("m_grav") = 1.0)
        .def_static("natural", &PhysicalParams::natural, py::arg("mu") = 1.0, py::arg("g") = 1.0,
                    py::arg("hbar") = 1.0)
        .def_readwrite("hbar", &PhysicalParams::hbar)
        .def_readwrite("g", &PhysicalParams::g)
        .def_readwrite("m_inertial", &PhysicalParams::m_inertial)
        .def_readwrite("m_grav", &PhysicalParams::m_grav)
        .def("g_eff", &PhysicalParams::g_eff);

    py::class_<WavepacketSpec>(m, "WavepacketSpec")
        .def(py::init([](double q0, double sigma2, double v0) { return WavepacketSpec::from_sigma2(q0, sigma2, v0); }),
             py::arg("q0"), py::arg("sigma2"), py::arg("v0"))
        .def_readwrite("q0", &WavepacketSpec::q0)
        .def_readwrite("sigma", &WavepacketSpec::sigma)
        .def_readwrite("v0", &WavepacketSpec::v0)
        .def_property_readonly("sigma2", &WavepacketSpec::sigma2);

    m.def("bessel_j1", &bessel_j1);
    m.def("hyp0f1", &hyp0f1, py::arg("b"), py::arg("z"));
    m.def("hyp2f1_row", &hyp2f1_row, py::arg("r"), py::arg("z"), py::arg("side") = CutSide::below);
    m.def(
        "classical_toa", [](const PhysicalParams& p, double q0, double v0) { return classical_toa(p, q0, v0); },
        py::arg("params"), py::arg("q0"), py::arg("v0"));
    m.def("kernel_value", [](double q, double qp, const PhysicalParams& p, Frame f) { return kernel_value(q, qp, {p, f}); },
          py::arg("q"), py::arg("qp"), py::arg("params"), py::arg("frame") = Frame::launch);

    m.def("expect_toa", &expectation, py::arg("state"), py::arg("params"), py::arg("frame") = Frame::launch,
          py::arg("centered") = false, py::arg("tol") = 1e-9, py::arg("threads") = 1);
    m.def("leading_expansion", &leading, py::arg("state"), py::arg("params"), py::arg("side") = CutSide::below);
    m.def(
        "alpha_r", [](int r, const WavepacketSpec& s, const PhysicalParams& p, CutSide side) {
            return alpha_r_gaussian(r, s, p, side);
        },
        py::arg("r"), py::arg("state"), py::arg("params"), py::arg("side") = CutSide::below);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("eigenvalues", &Spectrum::eigenvalues)
        .def_readonly("q", &Spectrum::q)
        .def_readonly("h", &Spectrum::h)
        .def_property_readonly("vectors", [](const Spectrum& s) { return s.vectors; })
        .def("__len__", &Spectrum::size)
        .def("orthonormality_residual", &Spectrum::orthonormality_residual)
        .def("nearest", &Spectrum::nearest)
        .def("order_by_magnitude", &Spectrum::order_by_magnitude)
        .def("eigenfunction", [](const Spectrum& s, std::size_t n) {
            GridAmplitude g = s.eigenfunction(n);
            return py::make_tuple(g.q, g.v);
        })
        .def("classify", [](const Spectrum& s, std::size_t n, const PhysicalParams& p) {
            return std::string(to_string(classify(s, n, p)));
        });
    m.def("spectrum", &make_spectrum, py::arg("params"), py::arg("box_lo"), py::arg("box_hi"), py::arg("n"),
          py::arg("frame") = Frame::position, py::arg("gregory_order") = 4, py::arg("threads") = 1);

    m.def("toa_distribution", &distribution, py::arg("state"), py::arg("params"), py::arg("spectrum"),
          py::arg("tau_grid"));
    m.def("covariance_check", &covariance, py::arg("state"), py::arg("params"), py::arg("t"), py::arg("spectrum"));

    m.def("run", &run_cli, py::arg("subcommand"), py::arg("config") = py::none(), py::arg("out") = "toalab-out",
          py::arg("target") = py::none(), py::arg("threads") = py::none(), py::arg("tolerance") = py::none(),
          "Run a CLI subcommand in-process; returns (exit_code, log, error_json).");
}
