#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apfront/eigenvalue.hpp"
#include "apfront/io.hpp"
#include "apfront/modulus.hpp"
#include "apfront/rate_lab.hpp"
#include "apfront/simulate.hpp"
#include "apfront/speed.hpp"

namespace py = pybind11;
using namespace apfront;

namespace {

APFunction make_ap(double constant, const std::vector<std::tuple<double, double, double>>& terms) {
    std::vector<Harmonic> hs;
    hs.reserve(terms.size());
    for (const auto& [w, c, s] : terms) hs.push_back({w, c, s});
    return APFunction(constant, hs);
}

EigenOptions options(double tol, int workers) {
    EigenOptions o;
    o.tol = tol;
    o.workers = workers;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spreading speeds of 1-D KPP fronts in almost periodic media";

    py::class_<APFunction>(m, "APFunction")
        .def(py::init(&make_ap), py::arg("constant") = 0.0,
             py::arg("terms") = std::vector<std::tuple<double, double, double>>{},
             "terms: list of (frequency, cos_amp, sin_amp)")
        .def("__call__", &APFunction::operator())
        .def_property_readonly("mean", &APFunction::mean)
        .def_property_readonly("torus_dim", &APFunction::torus_dim)
        .def("translated", &APFunction::translated)
        .def("scaled_argument", &APFunction::scaled_argument);

    py::class_<CoefficientSet>(m, "CoefficientSet")
        .def_readonly("alpha_m", &CoefficientSet::alpha_m)
        .def_readonly("alpha_M", &CoefficientSet::alpha_M);

    m.def("coefficients", &make_coefficients, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("c_tilde"), py::arg("tol") = 1e-9,
          "assemble and validate a coefficient tuple");
    m.def(
        "coefficients_from_json",
        [](const std::string& text) { return parse_coefficients(nlohmann::json::parse(text)); },
        "parse the CLI coefficient spec");
    m.def("validate", [](const CoefficientSet& cs) {
        ValidationReport rep = validate_coefficients(cs);
        py::dict out;
        for (const auto& it : rep.items) out[it.name.c_str()] = py::make_tuple(it.pass, it.detail);
        out["all_pass"] = rep.all_pass;
        return out;
    });

    m.def(
        "mean_value", [](const APFunction& f) { return f.mean(); },
        "exact Bohr mean of a torus-lift function");
    m.def("harmonic_mean", &harmonic_mean, py::arg("a"), py::arg("tol") = 1e-9);
    m.def(
        "function_bounds",
        [](const APFunction& f, double tol) {
            Bounds b = bounds(f, tol);
            return py::make_tuple(b.lower, b.upper);
        },
        py::arg("f"), py::arg("tol") = 1e-9);
    m.def(
        "rho",
        [](const APFunction& f, double R) { return rho(f, R, ScanParams{}); },
        py::arg("f"), py::arg("R"), "almost-periodicity modulus estimate");
    m.def(
        "theta",
        [](const APFunction& f, double sigma, double r) {
            return theta_estimate({f}, sigma, r).theta_value;
        },
        py::arg("f"), py::arg("sigma"), py::arg("r"));

    m.def(
        "lambda_finite",
        [](const CoefficientSet& cs, double L, double p, double tol, int workers) {
            EigenResult r = lambda_finite(cs, L, p, options(tol, workers));
            return py::make_tuple(r.lambda, r.error_bar);
        },
        py::arg("cs"), py::arg("L"), py::arg("p"), py::arg("tol") = 1e-6,
        py::arg("workers") = 0, "generalized principal eigenvalue lambda(L, p)");
    m.def(
        "lambda_zero",
        [](const CoefficientSet& cs, double p, double tol, int workers) {
            EigenResult r = lambda_zero(cs, p, options(tol, workers));
            return py::make_tuple(r.lambda, r.error_bar);
        },
        py::arg("cs"), py::arg("p"), py::arg("tol") = 1e-6, py::arg("workers") = 0);
    m.def(
        "lambda_infinity",
        [](const CoefficientSet& cs, double p, double tol, int workers) {
            EigenResult r = lambda_infinity(cs, p, options(tol, workers));
            return py::make_tuple(r.lambda, r.error_bar);
        },
        py::arg("cs"), py::arg("p"), py::arg("tol") = 1e-6, py::arg("workers") = 0);

    auto speed_dict = [](const SpeedResult& r) {
        py::dict d;
        d["omega"] = r.omega;
        d["p_star"] = r.p_star;
        d["e"] = r.e;
        d["lambda_at_p_star"] = r.lambda_at_pstar;
        d["error_bar"] = r.error_bar;
        d["bracket"] = py::make_tuple(r.p_lo, r.p_hi);
        return d;
    };
    m.def(
        "speed",
        [speed_dict](const CoefficientSet& cs, double L, int e, double tol, int workers) {
            return speed_dict(speed_finite(cs, L, e, tol, options(tol, workers)));
        },
        py::arg("cs"), py::arg("L"), py::arg("e") = 1, py::arg("tol") = 1e-6,
        py::arg("workers") = 0, "spreading speed omega(e; L)");
    m.def(
        "speed_zero",
        [speed_dict](const CoefficientSet& cs, int e, double tol, int workers) {
            return speed_dict(speed_zero(cs, e, tol, options(tol, workers)));
        },
        py::arg("cs"), py::arg("e") = 1, py::arg("tol") = 1e-6, py::arg("workers") = 0);
    m.def(
        "speed_infinity",
        [speed_dict](const CoefficientSet& cs, int e, double tol, int workers) {
            return speed_dict(speed_infinity(cs, e, tol, options(tol, workers)));
        },
        py::arg("cs"), py::arg("e") = 1, py::arg("tol") = 1e-6, py::arg("workers") = 0);

    m.def(
        "simulate_speed",
        [](const CoefficientSet& cs, double L, double X, int nx, double T, int side) {
            SimConfig cfg;
            cfg.X = X;
            cfg.nx = nx;
            cfg.T = T;
            FrontSeries fs = simulate(cs, L, cfg);
            SpeedFit fit = empirical_speed(fs, side);
            return py::make_tuple(fit.speed, fit.stderr_);
        },
        py::arg("cs"), py::arg("L"), py::arg("X") = 200.0, py::arg("nx") = 4001,
        py::arg("T") = 80.0, py::arg("side") = 1,
        "empirical front speed from a direct simulation");

    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<CoefficientError>(m, "CoefficientError");
    py::register_exception<ConfigError>(m, "ConfigError");
}
