#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "latetail/background.hpp"
#include "latetail/evolve.hpp"

using namespace latetail;

namespace {
const auto S1 = BackgroundSpec::schwarzschild(1.0);
}

TEST_CASE("tortoise coordinate") {
    CHECK(tortoise(4.0, S1) == doctest::Approx(4.0 + 2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(tortoise(3.0, S1) == doctest::Approx(3.0));
    CHECK(tortoise(5.0, BackgroundSpec::flat(PotentialSpec::none())) == 5.0);
}

TEST_CASE("inverse tortoise") {
    CHECK(inverse_tortoise(3.0, S1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(inverse_tortoise(4.0 + 2.0 * std::log(2.0), S1) == doctest::Approx(4.0).epsilon(1e-12));
    // Deep near the horizon: substitute back through the forward map.
    const double y = inverse_tortoise_offset(-40.0, 1.0);
    CHECK(y == doctest::Approx(7.6e-10).epsilon(0.01));
    CHECK(tortoise_from_offset(y, 1.0) == doctest::Approx(-40.0).epsilon(1e-13));
}

TEST_CASE("effective potential values") {
    CHECK(effective_potential(S1, Mode{0}, 3.0) == doctest::Approx(2.0 / 81.0).epsilon(1e-14));
    CHECK(effective_potential(S1, Mode{1}, 3.0) == doctest::Approx(8.0 / 81.0).epsilon(1e-14));
    CHECK(effective_potential(BackgroundSpec::flat(PotentialSpec::none()), Mode{2}, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("static kernel residuals") {
    CHECK(static_kernel_residual(S1, Mode{0}) < 1e-10);
    CHECK(static_kernel_residual(S1, Mode{1}) < 1e-10);
    CHECK(static_kernel_residual(BackgroundSpec::flat(PotentialSpec::none()), Mode{0}) == 0.0);
    // Three-point stencil: second order.
    const double a = static_kernel_residual(S1, Mode{1}, 0.1), b = static_kernel_residual(S1, Mode{1}, 0.05);
    CHECK(std::log2(a / b) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("effective mass") {
    CHECK(effective_mass(BackgroundSpec::flat(PotentialSpec::inverse_cubic(1.0))) == doctest::Approx(0.5));
    CHECK(effective_mass(BackgroundSpec::flat(PotentialSpec::inverse_quartic(3.0))) == 0.0);
    CHECK(effective_mass(BackgroundSpec::flat(PotentialSpec::none())) == 0.0);
    CHECK(effective_mass(S1) == 1.0);
}

namespace {

// Independent shooting for psi'' = V psi, psi(0) = 0, psi'(0) = 1, by
// classical RK4 with steps growing like 1 + r.  Returns u_(0) at `at`.
std::vector<double> rk4_u0(const PotentialSpec& V, const std::vector<double>& at) {
    const double R = 2e4;
    double r = 0.0, p = 0.0, d = 1.0;
    std::vector<double> psi_at(at.size());
    std::size_t next = 0;
    auto rhs = [&](double rr, double pp) { return V(rr) * pp; };
    while (r < R) {
        double h = 2e-3 * (1.0 + r);
        if (next < at.size() && r + h >= at[next]) h = at[next] - r;
        if (h > 0.0) {
            const double k1p = d, k1d = rhs(r, p);
            const double k2p = d + 0.5 * h * k1d, k2d = rhs(r + 0.5 * h, p + 0.5 * h * k1p);
            const double k3p = d + 0.5 * h * k2d, k3d = rhs(r + 0.5 * h, p + 0.5 * h * k2p);
            const double k4p = d + h * k3d, k4d = rhs(r + h, p + h * k3p);
            p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            d += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
            r += h;
        }
        while (next < at.size() && r >= at[next] - 1e-15) psi_at[next++] = p;
    }
    // psi' -> A with psi'(R) = A - int_R^inf V psi ~ A (1 - V0 / (2 R^2)) for V ~ V0 / r^3.
    const double A = d + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                             [&](double s) { return V(s) * (p + d * (s - R)); }, R, std::numeric_limits<double>::infinity());
    std::vector<double> u(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) u[i] = psi_at[i] / (A * at[i]);
    return u;
}

}  // namespace

TEST_CASE("extended state") {
    SUBCASE("no potential gives u = 1") {
        auto st = solve_extended_state(BackgroundSpec::flat(PotentialSpec::none()));
        CHECK(st.trivial());
        CHECK(st.u0(3.0) == 1.0);
    }
    SUBCASE("inverse cubic against an independent shooting solve") {
        const auto V = PotentialSpec::inverse_cubic(0.1);
        auto st = solve_extended_state(BackgroundSpec::flat(V));
        const std::vector<double> at{0.01, 0.5, 1.0, 5.0, 20.0, 100.0};
        const auto ref = rk4_u0(V, at);
        for (std::size_t i = 0; i < at.size(); ++i) CHECK(st.u0(at[i]) == doctest::Approx(ref[i]).epsilon(1e-6));
    }
    SUBCASE("weak potentials perturb u linearly") {
        double dev[3];
        const double lam[3] = {1e-1, 1e-2, 1e-3};
        for (int k = 0; k < 3; ++k) {
            auto st = solve_extended_state(BackgroundSpec::flat(PotentialSpec::inverse_cubic(lam[k])));
            dev[k] = 0.0;
            for (double r : {0.0, 0.1, 1.0, 10.0}) dev[k] = std::max(dev[k], std::abs(st.u0(r) - 1.0));
        }
        CHECK(dev[0] / dev[1] == doctest::Approx(10.0).epsilon(0.15));
        CHECK(dev[1] / dev[2] == doctest::Approx(10.0).epsilon(0.02));
    }
}

TEST_CASE("kerr tail constant") {
    auto p = RadialProfile::gaussian(1.0, 15.0, 1.5);
    KerrData K;
    K.phi0 = [](double, double, double) { return 0.0; };
    K.phi1 = [&](double r, double, double) { return p(r); };
    K.r_lo = p.support_lo();
    K.r_hi = p.support_hi();
    SUBCASE("a = 0 reduces to the Schwarzschild constant") {
        const double m = 1.0, pi = std::acos(-1.0);
        const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double r) { return p(r) * r * r / (1.0 - 2.0 * m / r); }, K.r_lo, K.r_hi, 15, 1e-14);
        const double ref = -(2.0 * m / pi) * 4.0 * pi * I;
        CHECK(kerr_tail_constant(K, m, 0.0) == doctest::Approx(ref).epsilon(1e-8));
    }
    SUBCASE("zero data") {
        KerrData Z = K;
        Z.phi1 = [](double, double, double) { return 0.0; };
        CHECK(kerr_tail_constant(Z, 1.0, 0.5) == 0.0);
    }
    SUBCASE("a = 0.5 is stable under refinement") {
        KerrData A = K;
        A.phi1 = [&](double r, double th, double) { return p(r) * (1.0 + 0.2 * std::cos(th) * std::cos(th)); };
        const double c1 = kerr_tail_constant(A, 1.0, 0.5);
        const double c2 = kerr_tail_constant(A, 1.0, 0.5, KerrQuadrature{32, 8, 64});
        CHECK(c2 == doctest::Approx(c1).epsilon(1e-6));
        CHECK(c1 != doctest::Approx(kerr_tail_constant(A, 1.0, 0.0)).epsilon(1e-6));
    }
}

TEST_CASE("invalid backgrounds are rejected") {
    CHECK_THROWS(BackgroundSpec::schwarzschild(-1.0).validate());
    CHECK_THROWS(tortoise(1.5, S1));
}
