#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "latetail/profiles.hpp"

using namespace latetail;

TEST_CASE("gaussian is cut at eight widths") {
    auto g = RadialProfile::gaussian(2.0, 10.0, 1.5);
    CHECK(g(10.0) == doctest::Approx(2.0));
    CHECK(g(11.5) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(g.support_lo() == doctest::Approx(10.0 - 12.0));
    CHECK(g.support_hi() == doctest::Approx(10.0 + 12.0));
    CHECK(g(22.01) == 0.0);
    CHECK(g.compact());
}

TEST_CASE("bump vanishes outside its width and peaks at the amplitude") {
    auto b = RadialProfile::bump(3.0, 5.0, 2.0);
    CHECK(b(5.0) == doctest::Approx(3.0));
    CHECK(b(3.0) == 0.0);
    CHECK(b(7.5) == 0.0);
    CHECK(b(6.0) == doctest::Approx(3.0 * std::exp(1.0 - 1.0 / 0.75)));
}

TEST_CASE("power law starts at its center") {
    auto p = RadialProfile::power_law(1.0, 2.0, 5.0);
    CHECK(p(1.9) == 0.0);
    CHECK(p(4.0) == doctest::Approx(std::pow(4.0, -5.0)));
    CHECK_FALSE(p.compact());
    CHECK(std::isinf(p.support_hi()));
}

TEST_CASE("temporal bump integral matches quadrature") {
    TemporalProfile chi{1.5, 15.0, 5.0};
    double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return chi(t); }, chi.support_lo(), chi.support_hi(), 15, 1e-14);
    CHECK(chi.integral() == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("profile names round-trip") {
    for (auto k : {ProfileKind::Zero, ProfileKind::Gaussian, ProfileKind::Bump, ProfileKind::PowerLaw})
        CHECK(parse_profile_kind(to_string(k)) == k);
    CHECK(parse_profile_coord("rstar") == ProfileCoord::Rstar);
}
