#pragma once

// Thin wrappers over Boost.Math quadrature with the tolerances used across
// the library.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace latetail::quad {

// Adaptive Gauss-Kronrod on [a, b]; either end may be infinite.  `breaks`
// are extra split points inside (a, b) (e.g. kinks or scale changes).
template <class F>
auto adaptive(F f, double a, double b, double rtol = 1e-13, const std::vector<double>& breaks = {}) {
    using boost::math::quadrature::gauss_kronrod;
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    decltype(f(a)) total{};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += gauss_kronrod<double, 31>::integrate(f, pts[i], pts[i + 1], 20, rtol);
    return total;
}

// Fixed composite Gauss-Legendre: `panels` equal panels of 20 nodes each.
template <class F>
auto gauss_panels(F f, double a, double b, int panels) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    decltype(f(a)) total{};
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h, s = 0.5 * h;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (x[k] == 0.0) {
                total += w[k] * s * f(c);
            } else {
                total += w[k] * s * (f(c - s * x[k]) + f(c + s * x[k]));
            }
        }
    }
    return total;
}

// Nodes and weights of the composite rule above, for tensor products.
inline void gauss_nodes(double a, double b, int panels, std::vector<double>& xs, std::vector<double>& ws) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    xs.clear();
    ws.clear();
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h, s = 0.5 * h;
        for (std::size_t k = 0; k < x.size(); ++k) {
            xs.push_back(c - s * x[k]);
            ws.push_back(w[k] * s);
            if (x[k] != 0.0) {
                xs.push_back(c + s * x[k]);
                ws.push_back(w[k] * s);
            }
        }
    }
}

}  // namespace latetail::quad
