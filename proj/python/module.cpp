#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latetail/background.hpp"
#include "latetail/errors.hpp"
#include "latetail/evolve.hpp"
#include "latetail/spectral.hpp"
#include "latetail/tails.hpp"

namespace py = pybind11;
using namespace latetail;

namespace {

TimeSeries to_series(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                     py::array_t<double, py::array::c_style | py::array::forcecast> v) {
    if (x.ndim() != 1 || v.ndim() != 1 || x.size() != v.size())
        throw DomainError("x and values must be 1-d arrays of equal length");
    TimeSeries s;
    s.x.assign(x.data(), x.data() + x.size());
    s.v.assign(v.data(), v.data() + v.size());
    return s;
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

BackgroundSpec background(const std::string& kind, double mass, const std::string& potential, double amplitude) {
    PotentialSpec p = PotentialSpec::none();
    if (potential == "inverse_cubic")
        p = PotentialSpec::inverse_cubic(amplitude);
    else if (potential == "inverse_quartic")
        p = PotentialSpec::inverse_quartic(amplitude);
    else if (potential != "none")
        throw DomainError("unknown potential '" + potential + "'");
    if (kind == "schwarzschild") {
        if (potential != "none") throw DomainError("potentials are only supported on flat backgrounds");
        return BackgroundSpec::schwarzschild(mass);
    }
    if (kind == "flat") return BackgroundSpec::flat(p);
    throw DomainError("unknown background '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_latetail, m) {
    m.doc() = "Late-time tail tools: tortoise chart, tail fits, predicted constants and model functions";

    // Translators are tried newest first: the subclass goes last.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<RadialProfile>(m, "RadialProfile")
        .def_static("gaussian", [](double a, double c, double w) { return RadialProfile::gaussian(a, c, w); },
                    py::arg("amplitude"), py::arg("center"), py::arg("width"))
        .def_static("bump", [](double a, double c, double w) { return RadialProfile::bump(a, c, w); },
                    py::arg("amplitude"), py::arg("center"), py::arg("width"))
        .def_static("power_law", &RadialProfile::power_law, py::arg("amplitude"), py::arg("start"), py::arg("power"))
        .def("__call__", &RadialProfile::operator());

    m.def("tortoise", [](double r, double m) { return tortoise(r, BackgroundSpec::schwarzschild(m)); },
          py::arg("r"), py::arg("mass") = 1.0);
    m.def("inverse_tortoise", [](double x, double m) { return inverse_tortoise(x, BackgroundSpec::schwarzschild(m)); },
          py::arg("rstar"), py::arg("mass") = 1.0);

    m.def(
        "predicted_constant",
        [](const RadialProfile& phi1, double r_obs, const std::string& kind, double mass,
           const std::string& potential, double amplitude) {
            CauchyData d;
            d.phi1 = phi1;
            auto p = predicted_constant(background(kind, mass, potential, amplitude), d, r_obs);
            return py::make_tuple(p.c, p.at_observer);
        },
        py::arg("phi1"), py::arg("r_obs"), py::arg("background") = "schwarzschild", py::arg("mass") = 1.0,
        py::arg("potential") = "none", py::arg("amplitude") = 0.0,
        "(c, c * u0(r_obs)) for time-symmetric data with time derivative phi1.");

    m.def(
        "local_power_index",
        [](py::array_t<double> x, py::array_t<double> v) {
            auto p = local_power_index(to_series(x, v));
            return py::make_tuple(to_array(p.x), to_array(p.v));
        },
        py::arg("x"), py::arg("values"));

    m.def(
        "tail_fit",
        [](py::array_t<double> x, py::array_t<double> v, std::optional<double> target,
           std::optional<double> predicted, double lo, double hi) {
            TailFitOptions o;
            o.target_exponent = target;
            o.predicted_coeff = predicted;
            o.window_lo = lo;
            o.window_hi = hi;
            auto r = tail_fit(to_series(x, v), o);
            py::dict d;
            d["p_inf"] = r.p_inf;
            d["dp"] = r.dp;
            d["c_hat"] = r.c_hat;
            d["dc"] = r.dc;
            d["exponent_match"] = r.exponent_match;
            d["ratio"] = r.ratio;
            d["within_tolerance"] = r.within_tolerance;
            d["window"] = py::make_tuple(r.window_lo, r.window_hi);
            return d;
        },
        py::arg("x"), py::arg("values"), py::arg("target_exponent") = py::none(),
        py::arg("predicted_coeff") = py::none(), py::arg("window_lo") = 0.0, py::arg("window_hi") = 0.0);

    m.def("u_plus", &u_plus, py::arg("v"));
    m.def("profile_integral", &profile_integral, py::arg("v"));
    m.def("model_bracket", &model_bracket, py::arg("rhat"));
    m.def(
        "model_solution",
        [](const std::vector<double>& rhat, const std::string& method) {
            if (method != "quadrature" && method != "ode") throw DomainError("method must be 'quadrature' or 'ode'");
            auto s = model_solution(method == "ode" ? ModelMethod::Ode : ModelMethod::Quadrature, rhat);
            return py::array_t<cplx>(s.u.size(), s.u.data());
        },
        py::arg("rhat"), py::arg("method") = "quadrature");
}
