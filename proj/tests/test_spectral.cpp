#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "latetail/errors.hpp"
#include "latetail/spectral.hpp"

using namespace latetail;

namespace {

const auto FLAT = BackgroundSpec::flat(PotentialSpec::none());
const cplx I{0.0, 1.0};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    return x;
}

double max_rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Spherical Hankel h_l^(1)(z) via the upward recurrence.
cplx hankel1(int l, double z) {
    cplx h0 = -I * std::exp(I * z) / z;
    if (l == 0) return h0;
    cplx h1 = -std::exp(I * z) * (z + I) / (z * z);
    for (int k = 1; k < l; ++k) {
        cplx h2 = double(2 * k + 1) / z * h1 - h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

}  // namespace

TEST_CASE("flat l = 0 homogeneous solutions are the free waves") {
    const double s = 0.3;
    auto x = linspace(0.0, 150.0, 301);
    auto H = homogeneous_solutions(FLAT, Mode{0}, s, x);
    CHECK(std::abs(H.wronskian - cplx(-1.0, 0.0)) < 1e-9);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, max_rel(H.psi_left[i], std::sin(s * x[i]) / s));
        err = std::max(err, max_rel(H.psi_right[i], std::exp(I * s * x[i])));
    }
    CHECK(err < 1e-9);
}

TEST_CASE("flat l = 1 outgoing solution is the spherical Hankel form") {
    const double s = 0.2;
    auto x = linspace(1.0, 240.0, 240);
    auto H = homogeneous_solutions(FLAT, Mode{1}, s, x);
    // -s r h_1(s r) is the outgoing solution normalised to e^{i s r} at infinity.
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x[i];
        cplx exact = std::exp(I * s * r) * (1.0 + I / (s * r));
        CHECK(std::abs(exact - (-s * r) * hankel1(1, s * r)) < 1e-12);
        err = std::max(err, std::abs(H.psi_right[i] - exact) / std::abs(exact));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("Schwarzschild Wronskian is constant") {
    const auto S = BackgroundSpec::schwarzschild(1.0);
    auto x = linspace(-60.0, 600.0, 661);
    auto H = homogeneous_solutions(S, Mode{0}, 0.05, x);
    CHECK(H.wronskian_drift < 1e-8);
    CHECK(std::abs(H.wronskian) > 1e-3);
    CHECK(H.series_error < 1e-6);
}

TEST_CASE("homogeneous solutions reject points beyond R_out") {
    CHECK_THROWS_AS(homogeneous_solutions(FLAT, Mode{0}, 0.1, {1.0, 1e6}), DomainError);
    CHECK_THROWS_AS(homogeneous_solutions(FLAT, Mode{0}, 0.0, {1.0}), DomainError);
}

TEST_CASE("resolvent of zero data vanishes") {
    auto u = resolvent_apply(BackgroundSpec::schwarzschild(1.0), Mode{0}, 0.02, RadialProfile{}, 5.0);
    CHECK(std::abs(u.u_obs) == 0.0);
}

TEST_CASE("flat resolvent tends to the Newtonian potential as sigma -> 0") {
    const auto f = RadialProfile::gaussian(1.0, 5.0, 1.0);
    const double r_obs = 4.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inner = GK::integrate([&](double r) { return r * r * f(r); }, 0.0, r_obs, 15, 1e-14);
    const double outer = GK::integrate([&](double r) { return r * f(r); }, r_obs, 13.0, 15, 1e-14);
    const double newton = inner / r_obs + outer;
    for (double s : {1e-3, 2e-3}) {
        auto u = resolvent_apply(FLAT, Mode{0}, s, f, r_obs);
        CHECK(u.residual < 1e-6);
        CHECK(u.u_obs.real() == doctest::Approx(newton).epsilon(1e-3));
    }
}

TEST_CASE("zero-energy solve") {
    const auto S = BackgroundSpec::schwarzschild(1.0);
    auto z = zero_energy_solve(S, Mode{0}, RadialProfile::power_law(1.0, 2.0, 5.0));
    CHECK(z.c0 == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(z.c0_fit == doctest::Approx(0.125).epsilon(0.01));
    CHECK(z.subleading == doctest::Approx(1.0).epsilon(0.02));

    auto zero = zero_energy_solve(S, Mode{0}, RadialProfile{});
    CHECK(zero.c0 == 0.0);
    for (double v : zero.u) CHECK(v == 0.0);

    CHECK_THROWS_AS(zero_energy_solve(S, Mode{1}, RadialProfile::power_law(1.0, 2.0, 5.0)), DomainError);
}

TEST_CASE("expansion iteration") {
    const double m = 1.0;
    auto e = expansion_iterate(BackgroundSpec::schwarzschild(m), RadialProfile::bump(1.0, 6.0, 2.0));
    CHECK(e.f2_ratio(1e3 * m) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(e.log_lead == doctest::Approx(1.0).epsilon(0.05));
    CHECK(e.cX == doctest::Approx(4.0 * m * e.c0).epsilon(1e-14));
    CHECK(e.cM == doctest::Approx(-2.0 * e.cX).epsilon(1e-14));
    CHECK(e.c0_fit == doctest::Approx(e.c0).epsilon(0.01));

    // The mass term drives f2: shrinking m shrinks c_X in proportion.
    auto small = expansion_iterate(BackgroundSpec::schwarzschild(0.01), RadialProfile::bump(1.0, 6.0, 2.0));
    CHECK(std::abs(small.cX) < 0.02 * std::abs(e.cX));

    CHECK_THROWS_AS(expansion_iterate(FLAT, RadialProfile::bump(1.0, 6.0, 2.0)), DomainError);
    CHECK_THROWS_AS(expansion_iterate(BackgroundSpec::schwarzschild(1.0), RadialProfile{}), DomainError);
}

TEST_CASE("model solution") {
    SUBCASE("no pole at the origin") {
        CHECK(std::abs(model_bracket(1e-12)) < 1e-9);
        CHECK(std::abs(model_bracket(1e-7)) < 1e-5);
    }
    SUBCASE("matches a 30-digit evaluation") {
        auto q = model_solution(ModelMethod::Quadrature, {1e-5, 1e-3});
        CHECK(std::abs(q.u[1] + std::log(1e-3) - I * (M_PI / 2.0) - cplx(-0.268797030141, -0.00713843705729)) < 1e-9);
        CHECK(std::abs(q.u[0] + std::log(1e-5) - I * (M_PI / 2.0) - cplx(-0.270347138303, -0.000117425730911)) <
              1e-9);
    }
    SUBCASE("imaginary remainder decays like r^ log r^") {
        auto q = model_solution(ModelMethod::Quadrature, {1e-6, 1e-4});
        const double a = (q.u[0] + std::log(1e-6)).imag() - M_PI / 2.0;
        const double b = (q.u[1] + std::log(1e-4)).imag() - M_PI / 2.0;
        CHECK(std::abs(a) < 1e-4);
        CHECK(std::abs(b / a) == doctest::Approx(100.0 * std::log(1e-4) / std::log(1e-6)).epsilon(0.1));
    }
    SUBCASE("methods agree and satisfy the model equation") {
        auto r = linspace(0.1, 10.0, 100);
        auto q = model_solution(ModelMethod::Quadrature, r);
        auto o = model_solution(ModelMethod::Ode, r);
        double d = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) d = std::max(d, std::abs(q.u[i] - o.u[i]));
        CHECK(d < 1e-6);
        CHECK(model_operator_residual(r, 1e-3) < 1e-6);
    }
    SUBCASE("bad grids") {
        CHECK_THROWS_AS(model_solution(ModelMethod::Ode, {0.0, 1.0}), DomainError);
        CHECK_THROWS_AS(model_solution(ModelMethod::Ode, {2.0, 1.0}), DomainError);
    }
}

TEST_CASE("profile integral") {
    auto closed = [](double v) { return 2.0 * M_PI * (v + 1.0) / ((v + 2.0) * (v + 2.0)); };
    CHECK(profile_integral(0.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-8));
    CHECK(profile_integral(2.0) == doctest::Approx(3.0 * M_PI / 8.0).epsilon(1e-8));
    CHECK(profile_integral(100.0) == doctest::Approx(closed(100.0)).epsilon(1e-8));
    CHECK(profile_integral(0.37) == doctest::Approx(closed(0.37)).epsilon(1e-8));
    CHECK_THROWS_AS(profile_integral(-1.0), DomainError);
}

TEST_CASE("inverse Fourier transform of sigma^k log sigma") {
    auto pos = inverse_ft_log(2, {200.0});
    CHECK(pos[0] * 200.0 * 200.0 * 200.0 / 2.0 == doctest::Approx(1.0).epsilon(0.05));
    auto neg = inverse_ft_log(2, {-200.0});
    CHECK(std::abs(neg[0]) < 1e-6 * std::abs(pos[0]));

    FourierWindow wide;
    wide.flat = 0.1;
    wide.cut = 0.9;
    auto a = inverse_ft_log(0, {150.0, 300.0});
    auto b = inverse_ft_log(0, {150.0, 300.0}, wide);
    for (int i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-3));
    CHECK(a[0] * 150.0 == doctest::Approx(a[1] * 300.0).epsilon(0.02));
}

TEST_CASE("sigma series fit") {
    auto grid = SigmaGrid::log_spaced(1e-3, 5e-2, 16);
    SUBCASE("planted singular coefficient") {
        std::vector<SigmaValue> v;
        for (double s : grid.values) v.push_back({s, 1.0 + 0.5 * s * s - 3.0 * s * s * std::log(s)});
        auto fit = fit_sigma_series(v);
        CHECK(fit.b.real() == doctest::Approx(-3.0).epsilon(1e-6 / 3.0));
        CHECK(fit.stable);
    }
    SUBCASE("exact on its own span") {
        const cplx a0{0.3, -1.0}, a1{2.0, 0.5}, a2{-1.0, 4.0}, b{0.7, -0.2}, a3{5.0, 1.0}, b3{-2.0, 3.0};
        std::vector<SigmaValue> v;
        for (double s : grid.values) {
            const double L = std::log(s);
            v.push_back({s, a0 + a1 * s + a2 * s * s + b * s * s * L + a3 * s * s * s + b3 * s * s * s * L});
        }
        auto fit = fit_sigma_series(v);
        CHECK(fit.residual < 1e-10);
        CHECK(std::abs(fit.b - b) < 1e-8 * std::abs(b));
        CHECK(std::abs(fit.a2 - a2) < 1e-8 * std::abs(a2));
        CHECK(std::abs(fit.a0 - a0) < 1e-8 * std::abs(a0));
    }
    SUBCASE("needs enough samples over enough range") {
        std::vector<SigmaValue> v;
        for (int i = 0; i < 8; ++i) v.push_back({1e-3 * (i + 1), 1.0});
        CHECK_THROWS_AS(fit_sigma_series(v), DomainError);
        v.clear();
        for (int i = 0; i < 20; ++i) v.push_back({1e-2 * (1.0 + 0.01 * i), 1.0});
        CHECK_THROWS_AS(fit_sigma_series(v), DomainError);
    }
}

// The remainder at r^ = 1e-3 is -7.1e-3 (checked above against an independent
// evaluation), so this threshold is not reachable there.  Kept at the stated
// value and reported.
TEST_CASE("model solution imaginary remainder below 1e-4 at r^ = 1e-3" * doctest::may_fail()) {
    auto q = model_solution(ModelMethod::Quadrature, {1e-3});
    cplx w = q.u[0] + std::log(1e-3) - I * (M_PI / 2.0);
    CHECK(std::abs(w.imag()) < 1e-4);
}
