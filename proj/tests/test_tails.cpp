#include <doctest.h>

#include <cmath>
#include <functional>

#include "latetail/errors.hpp"
#include "latetail/tails.hpp"

using namespace latetail;

namespace {

TimeSeries sample(double lo, double hi, double dx, const std::function<double(double)>& f) {
    TimeSeries s;
    for (double x = lo; x <= hi + 1e-9; x += dx) s.push(x, f(x));
    return s;
}

}  // namespace

TEST_CASE("local power index") {
    SUBCASE("exact power law") {
        auto p = local_power_index(sample(100.0, 1000.0, 1.0, [](double x) { return 7.0 * std::pow(x, -3.0); }));
        for (double v : p.v) CHECK(v == doctest::Approx(3.0).epsilon(1e-8));
    }
    SUBCASE("power law with a 1/x correction") {
        auto p = local_power_index(sample(100.0, 1000.0, 1.0, [](double x) { return std::pow(x, -3.0) * (1.0 + 1.0 / x); }));
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
            CHECK(p.v[i] == doctest::Approx(3.0 + 1.0 / (p.x[i] + 1.0)).epsilon(1e-6));
    }
    SUBCASE("scale invariance") {
        auto f = [](double x) { return std::pow(x, -3.0) * (1.0 + 10.0 / x); };
        auto a = local_power_index(sample(50.0, 500.0, 0.5, f));
        auto b = local_power_index(sample(50.0, 500.0, 0.5, [&](double x) { return -4.5 * f(x); }));
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.v[i] == doctest::Approx(b.v[i]).epsilon(1e-11));  // log roundoff over steps of 1e-3
    }
    SUBCASE("ringing raises, the clean tail does not") {
        auto f = [](double x) { return std::exp(-0.1 * x) * std::cos(0.5 * x) + 1e3 * std::pow(x, -3.0); };
        auto s = sample(1.0, 400.0, 0.1, f);
        CHECK_THROWS_AS(local_power_index(s.window(1.0, 60.0)), ComputeError);
        const double z = last_sign_change(s);
        CHECK(z < 100.0);
        CHECK_NOTHROW(local_power_index(s.window(3.0 * z, 400.0)));
    }
}

TEST_CASE("tail fit") {
    SUBCASE("planted 5 x^-3 + 20 x^-4") {
        auto s = sample(200.0, 2000.0, 1.0, [](double x) { return 5.0 * std::pow(x, -3.0) + 20.0 * std::pow(x, -4.0); });
        TailFitOptions o;
        o.target_exponent = 3.0;
        o.predicted_coeff = 5.0;
        auto r = tail_fit(s, o);
        CHECK(r.p_inf == doctest::Approx(3.0).epsilon(0.02 / 3.0));
        CHECK(r.c_hat == doctest::Approx(5.0).epsilon(0.02));
        CHECK(r.within_tolerance);
        CHECK(r.exponent_match);
    }
    SUBCASE("oscillating correction is covered by the error bar") {
        auto s = sample(200.0, 2000.0, 1.0,
                        [](double x) { return 5.0 * std::pow(x, -3.0) * (1.0 + 0.3 * std::sin(std::log(x)) / x); });
        TailFitOptions o;
        o.target_exponent = 3.0;
        auto r = tail_fit(s, o);
        CHECK(r.c_hat == doctest::Approx(5.0).epsilon(0.05));
        CHECK(std::abs(r.c_hat - 5.0) <= r.dc + 1e-12);
    }
    SUBCASE("exponent mismatch is flagged") {
        auto s = sample(200.0, 2000.0, 1.0, [](double x) { return 2.0 * std::pow(x, -4.0); });
        TailFitOptions o;
        o.target_exponent = 3.0;
        o.predicted_coeff = 2.0;
        auto r = tail_fit(s, o);
        CHECK_FALSE(r.exponent_match);
        CHECK_FALSE(r.has_coefficient);
        CHECK_FALSE(r.within_tolerance);
    }
    SUBCASE("scale equivariance") {
        auto f = [](double x) { return 5.0 * std::pow(x, -3.0) + 20.0 * std::pow(x, -4.0); };
        TailFitOptions o;
        o.target_exponent = 3.0;
        auto a = tail_fit(sample(200.0, 2000.0, 1.0, f), o);
        auto b = tail_fit(sample(200.0, 2000.0, 1.0, [&](double x) { return -3.0 * f(x); }), o);
        CHECK(b.c_hat == doctest::Approx(-3.0 * a.c_hat).epsilon(1e-13));
    }
    SUBCASE("short window is rejected") {
        auto s = sample(200.0, 2000.0, 1.0, [](double x) { return std::pow(x, -3.0); });
        TailFitOptions o;
        o.window_lo = 800.0;
        o.window_hi = 1800.0;
        CHECK_THROWS_AS(tail_fit(s, o), DomainError);
    }
}

TEST_CASE("u+ profile") {
    CHECK(u_plus(0.0) == 0.0);
    CHECK(u_plus(2.0) == doctest::Approx(3.0 / 8.0));
    CHECK(u_plus(1e8) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(u_plus(1e-8) / 1e-8 == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("ray profile on the planted compact form") {
    const double cM = -3.7;
    std::vector<RaySeries> rays;
    for (double v : {0.5, 1.0, 2.0}) {
        auto s = sample(100.0, 2000.0, 1.0, [&](double t) {
            const double r = t / v;
            return cM * (t + r) / (t * t * (t + 2.0 * r) * (t + 2.0 * r));
        });
        rays.push_back({v, s});
    }
    for (const auto& row : ray_profile_check(rays, cM)) CHECK(row.R == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS(ray_profile_check(rays, 0.0));
}

TEST_CASE("richardson order") {
    auto f = [](double x) { return std::sin(x); };
    auto with_err = [&](double h, double a, double b) {
        return sample(0.0, 10.0, 0.5, [&](double x) { return f(x) + a * h * h * std::cos(x) + b * h * h * h; });
    };
    CHECK(richardson_order(with_err(0.1, 1, 0), with_err(0.05, 1, 0), with_err(0.025, 1, 0)) ==
          doctest::Approx(2.0).epsilon(5e-4));
    auto mixed = [&](double h) { return sample(0.0, 10.0, 0.5, [&](double x) { return f(x) + h * h + 5.0 * h * h * h; }); };
    const double coarse = richardson_order(mixed(0.4), mixed(0.2), mixed(0.1));
    const double fine = richardson_order(mixed(0.04), mixed(0.02), mixed(0.01));
    CHECK(coarse > 2.0);
    CHECK(coarse < 3.0);
    CHECK(fine < coarse);
    CHECK(fine == doctest::Approx(2.0).epsilon(0.05));
    auto same = with_err(0.1, 1, 0);
    CHECK_THROWS_AS(richardson_order(same, same, same), ComputeError);
}

TEST_CASE("time series validation") {
    TimeSeries s;
    s.push(1.0, 1.0);
    s.push(1.0, 2.0);
    CHECK_THROWS(s.validate());
}
