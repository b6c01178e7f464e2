#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "latetail/errors.hpp"
#include "latetail/evolve.hpp"

using namespace latetail;

namespace {

// Max error of the leapfrog field at r = 40 against the d'Alembert solution
// psi = (g(r - t) + g(r + t)) / 2, g(s) = s phi0(|s|) extended oddly.
double free_wave_error(double dx) {
    const auto flat = BackgroundSpec::flat(PotentialSpec::none());
    CauchyData d;
    d.phi0 = RadialProfile::gaussian(1.0, 30.0, 2.0);
    CauchyGrid g = CauchyGrid::with_spacing(0.0, 200.0, dx, 0.5, 60.0);
    const auto res = evolve_leapfrog(g, d, EffectivePotential(flat, Mode{0}), ModeSource(), {Observer::fixed_radius(40.0)});
    auto G = [&](double s) { return s * d.phi0(std::abs(s)); };
    double err = 0.0;
    const auto& s = res.series[0];
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = s.x[i] + 40.0, exact = 0.5 * (G(40.0 - t) + G(40.0 + t)) / 40.0;
        err = std::max(err, std::abs(s.v[i] - exact));
    }
    return err;
}

}  // namespace

TEST_CASE("leapfrog reproduces the free wave at second order") {
    const double e1 = free_wave_error(0.1), e2 = free_wave_error(0.05);
    CHECK(e1 < 1e-3);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("double-null transport of a left-mover is exact") {
    const auto flat = BackgroundSpec::flat(PotentialSpec::none());
    auto g = [](double v) { return std::exp(-(v - 120.0) * (v - 120.0) / 16.0); };
    NullGrid G;
    G.u0 = 0.0;
    G.v0 = 100.0;
    G.h = 0.5;
    G.Nu = 20;
    G.Nv = 80;
    NullData data;
    data.on_u0 = g;
    data.on_v0 = [&](double) { return g(100.0); };
    const EffectivePotential V(flat, Mode{0});
    for (double u : {2.0, 7.5, 10.0})
        for (double v : {110.0, 120.0, 125.5}) CHECK(double_null_point(G, data, V, ModeSource(), u, v) == doctest::Approx(g(v)).epsilon(1e-13));
}

TEST_CASE("double-null converges at second order") {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    const EffectivePotential V(spec, Mode{0});
    NullData data;
    data.on_u0 = [](double v) { return std::exp(-(v - 10.0) * (v - 10.0) / 4.0); };
    double val[3];
    for (int k = 0; k < 3; ++k) {
        NullGrid G;
        G.u0 = 0.0;
        G.v0 = 0.0;
        G.h = 0.4 / (1 << k);
        G.Nu = int(std::lround(40.0 / G.h));
        G.Nv = int(std::lround(60.0 / G.h));
        val[k] = double_null_point(G, data, V, ModeSource(), 30.0, 40.0);
    }
    CHECK(std::log2(std::abs(val[0] - val[1]) / std::abs(val[1] - val[2])) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mode source") {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    SUBCASE("zero forcing gives zero source") {
        ModeSource S = reduce_to_mode(spec, Mode{0}, ForcingSpec{});
        CHECK(S.is_zero());
        CHECK(S(1.0, 5.0) == 0.0);
    }
    SUBCASE("radial factor (1 - 2m/r) r f") {
        ForcingSpec F;
        F.chi = TemporalProfile{1.0, 0.0, 1.0};
        F.fr = RadialProfile::bump(1.0, 10.0, 4.0);
        ModeSource S = reduce_to_mode(spec, Mode{0}, F);
        const double r = 11.0, x = tortoise(r, spec);
        CHECK(S.radial(x) == doctest::Approx((1.0 - 2.0 / r) * r * F.fr(r)).epsilon(1e-10));
        CHECK(S(0.0, x) == doctest::Approx(S.radial(x)));
        const auto flat = BackgroundSpec::flat(PotentialSpec::none());
        CHECK(reduce_to_mode(flat, Mode{0}, F).radial(r) == doctest::Approx(r * F.fr(r)));
    }
}

TEST_CASE("predicted constant") {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    SUBCASE("no phi1, no constant") {
        CauchyData d;
        d.phi0 = RadialProfile::gaussian(1.0, 15.0, 2.0);
        CHECK(predicted_constant(spec, d, 10.0).c == 0.0);
    }
    SUBCASE("adaptive, fixed-order and direct quadrature agree") {
        CauchyData d;
        d.phi1 = RadialProfile::gaussian(1.0, 15.0, 1.5);  // exp(-(r - 15)^2 / 2.25), support [3, 27]
        const double c = predicted_constant(spec, d, 10.0).c;
        CHECK(predicted_constant_fixed_order(spec, d, 64) == doctest::Approx(c).epsilon(1e-8));
        const double pi = std::acos(-1.0);
        const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double r) { return std::exp(-(r - 15.0) * (r - 15.0) / 2.25) * r * r / (1.0 - 2.0 / r); }, 3.0, 27.0, 15,
            1e-14);
        CHECK(c == doctest::Approx(-(2.0 / pi) * 4.0 * pi * I).epsilon(1e-10));
    }
    SUBCASE("short-range potential gives no constant") {
        CauchyData d;
        d.phi1 = RadialProfile::gaussian(1.0, 15.0, 2.0);
        CHECK(predicted_constant(BackgroundSpec::flat(PotentialSpec::inverse_quartic(0.5)), d, 10.0).c == 0.0);
    }
    SUBCASE("forcing constant is linear in the time integral") {
        ForcingSpec F;
        F.chi = TemporalProfile{1.0, 15.0, 5.0};
        F.fr = RadialProfile::bump(1.0, 10.0, 4.0);
        ForcingSpec G = F;
        G.chi.amplitude = 2.0;
        CHECK(predicted_constant(spec, G, 10.0).c == doctest::Approx(2.0 * predicted_constant(spec, F, 10.0).c));
    }
}

TEST_CASE("grid validation") {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    CauchyData d;
    d.phi1 = RadialProfile::gaussian(1.0, 30.0, 2.5, ProfileCoord::Rstar);
    CauchyGrid g = CauchyGrid::with_spacing(-50.0, 100.0, 0.5, 1.5, 10.0);
    CHECK_THROWS_AS(evolve_leapfrog(g, d, EffectivePotential(spec, Mode{0}), ModeSource(), {Observer::fixed_radius(10.0)}),
                    Error);
}
