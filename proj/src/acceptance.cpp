#include "latetail/acceptance.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>

#include "latetail/errors.hpp"
#include "latetail/evolve.hpp"
#include "latetail/experiments.hpp"
#include "latetail/spectral.hpp"
#include "latetail/tails.hpp"

namespace latetail {

namespace {

const double pi = boost::math::constants::pi<double>();

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

struct Check {
    bool pass = true;
    std::string detail;
    void add(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [x]");
    }
};

// ---------------------------------------------------------------- time domain

const double kRadii[2] = {10.0, 20.0};

// Leapfrog run with causally excised edges; the left edge at r* = -2000 is
// never felt before t_end = 2000.
EvolutionResult leapfrog(const BackgroundSpec& spec, int l, const CauchyData& d, double dx, double rmin,
                         double rmax) {
    CauchyGrid g = CauchyGrid::with_spacing(rmin, rmax, dx, 0.5, 2000.0);
    const int stride = int(std::lround(0.5 / g.dt()));
    return evolve_leapfrog(g, d, EffectivePotential(spec, Mode{l}), ModeSource(),
                           {Observer::fixed_radius(kRadii[0], stride), Observer::fixed_radius(kRadii[1], stride)});
}

CauchyData schwarzschild_data(bool initially_static) {
    CauchyData d;
    (initially_static ? d.phi0 : d.phi1) = RadialProfile::gaussian(1.0, 30.0, 2.5, ProfileCoord::Rstar);
    return d;
}

std::pair<double, double> lpi_range(const TimeSeries& s, double lo, double hi) {
    const TimeSeries p = local_power_index(s.window(lo, hi));
    auto [a, b] = std::minmax_element(p.v.begin(), p.v.end());
    return {*a, *b};
}

// LPI range check over [lo, hi]; a sign change counts as a failure.
void lpi_check(Check& c, const TimeSeries& s, double lo, double hi, double target, double tol,
               const std::string& tag) {
    try {
        auto [a, b] = lpi_range(s, lo, hi);
        c.add(within(a, target, tol) && within(b, target, tol),
              fmt("%s LPI[%g,%g] in [%.3f, %.3f]", tag.c_str(), lo, hi, a, b));
    } catch (const Error& e) {
        c.add(false, tag + " " + e.what());
    }
}

Check a1(int jobs) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    const CauchyData d = schwarzschild_data(false);
    const double dxs[3] = {0.2, 0.1, 0.05};
    EvolutionResult runs[3];
    parallel_for(3, jobs, [&](int i) { runs[i] = leapfrog(spec, 0, d, dxs[i], -2000.0, 2100.0); });
    const double pred = predicted_constant(spec, d, 10.0).c;
    Check c;
    for (int k = 0; k < 2; ++k) {
        const std::string tag = fmt("r=%g", kRadii[k]);
        lpi_check(c, runs[2].series[k], 800.0, 1800.0, 3.0, 0.10, tag);
        double ratio[3];
        for (int i = 0; i < 3; ++i) {
            TailFitOptions o;
            o.target_exponent = 3.0;
            o.predicted_coeff = pred;
            o.window_lo = 560.0;
            o.window_hi = 1800.0;
            ratio[i] = tail_fit(runs[i].series[k], o).ratio;
        }
        c.add(within(ratio[2], 1.0, 0.10), fmt("%s c/c_pred %.6f", tag.c_str(), ratio[2]));
        // Refinement: successive changes of the ratio must shrink.
        const double d1 = std::abs(ratio[1] - ratio[0]), d2 = std::abs(ratio[2] - ratio[1]);
        c.add(d2 < d1, fmt("%s refinement changes %.2e -> %.2e", tag.c_str(), d1, d2));
    }
    return c;
}

Check a2(int) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    const auto run = leapfrog(spec, 0, schwarzschild_data(true), 0.1, -2000.0, 2100.0);
    Check c;
    for (int k = 0; k < 2; ++k) lpi_check(c, run.series[k], 800.0, 1800.0, 4.0, 0.15, fmt("r=%g", kRadii[k]));
    return c;
}

// Least-squares slope of -ln|v| against ln x over [T - 50, T + 50], at
// T = 400, 500, ...  Stops at the first sign change or decrease.
std::vector<double> lpi_trend(const TimeSeries& s) {
    std::vector<double> out;
    for (double T = 400.0; T <= 1900.0; T += 100.0) {
        const TimeSeries w = s.window(T - 50.0, T + 50.0);
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        bool clean = w.size() > 10;
        for (std::size_t i = 0; i < w.size() && clean; ++i) {
            clean = w.v[i] != 0.0 && (w.v[i] > 0.0) == (w.v[0] > 0.0);
            const double x = std::log(w.x[i]), y = -std::log(std::abs(w.v[i]));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        if (!clean) break;
        const double n = double(w.size()), p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (!out.empty() && p < out.back()) break;
        out.push_back(p);
    }
    return out;
}

Check a3(int jobs) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    EvolutionResult runs[3];
    const int ls[3] = {1, 1, 2};
    const bool stat[3] = {false, true, false};
    parallel_for(3, jobs, [&](int i) {
        runs[i] = leapfrog(spec, ls[i], schwarzschild_data(stat[i]), 0.1, -2000.0, 2100.0);
    });
    Check c;
    for (int k = 0; k < 2; ++k) {
        const std::string r = fmt("r=%g", kRadii[k]);
        lpi_check(c, runs[0].series[k], 1500.0, 1800.0, 5.0, 0.2, "l=1 " + r);
        lpi_check(c, runs[1].series[k], 1500.0, 1800.0, 6.0, 0.3, "l=1 static " + r);
        const auto trend = lpi_trend(runs[2].series[k]);
        const double last = trend.empty() ? 0.0 : trend.back();
        c.add(trend.size() >= 5 && last >= 6.5 && last <= 7.3,
              fmt("l=2 %s rising to %.3f at t*=%g", r.c_str(), last, 300.0 + 100.0 * trend.size()));
    }
    return c;
}

// Forced double-null run shared by A4 and A5.
struct NullRun {
    EvolutionResult result;
    double cM = 0.0;
};

const NullRun& forced_null_run() {
    static std::once_flag once;
    static NullRun run;
    std::call_once(once, [] {
        const auto spec = BackgroundSpec::schwarzschild(1.0);
        ForcingSpec F;
        F.chi = TemporalProfile{1.0, 15.0, 5.0};
        F.fr = RadialProfile::bump(1.0, 10.0, 4.0);
        run.cM = predicted_constant(spec, F, 10.0).c;
        NullGrid g;
        g.u0 = g.v0 = -50.0;
        g.h = 0.1;
        const double v_max = 20000.0, u_max = 1500.0;
        g.Nu = int(std::lround((u_max - g.u0) / g.h));
        g.Nv = int(std::lround((v_max - g.v0) / g.h));
        run.result = evolve_double_null(g, NullData{}, EffectivePotential(spec, Mode{0}),
                                        reduce_to_mode(spec, Mode{0}, F),
                                        {Observer::radiation_field(v_max, 10), Observer::ray(0.5, 10),
                                         Observer::ray(1.0, 10), Observer::ray(2.0, 10)});
    });
    return run;
}

Check a4(int) {
    const NullRun& run = forced_null_run();
    const TimeSeries& F = run.result.series[0];
    Check c;
    lpi_check(c, F, 400.0, 1400.0, 2.0, 0.10, "radiation field");
    TailFitOptions o;
    o.target_exponent = 2.0;
    o.predicted_coeff = run.cM / 4.0;
    o.window_lo = 400.0;
    o.window_hi = 1400.0;
    const TailReport r = tail_fit(F, o);
    c.add(within(r.p_inf, 2.0, 0.10), fmt("p_inf %.4f", r.p_inf));
    c.add(within(r.ratio, 1.0, 0.10), fmt("F u^2 / (c_M/4) %.4f", r.ratio));
    return c;
}

Check a5(int) {
    const NullRun& run = forced_null_run();
    std::vector<RaySeries> rays;
    for (std::size_t k = 1; k < run.result.series.size(); ++k)
        rays.push_back({std::strtod(run.result.series[k].label.c_str() + 5, nullptr), run.result.series[k]});
    Check c;
    for (const auto& row : ray_profile_check(rays, run.cM))
        c.add(within(row.R, 1.0, 0.10), fmt("R(%g) %.4f", row.ratio, row.R));
    return c;
}

Check a6(int) {
    const double V0 = 0.2;
    const auto spec = BackgroundSpec::flat(PotentialSpec::inverse_cubic(V0));
    CauchyData d;
    d.phi1 = RadialProfile::gaussian(1.0, 15.0, 1.5);
    const auto run = leapfrog(spec, 0, d, 0.1, 0.0, 4200.0);
    // -(V0 / pi) <phi1, u*_(0)> u_(0)(r_obs), with <a, b> = 4 pi int a b r^2 dr.
    const ExtendedState st = solve_extended_state(spec);
    const double pairing = 4.0 * pi *
                           boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                               [&](double r) { return d.phi1(r) * st.u0_dual(r) * r * r; }, d.phi1.support_lo(),
                               d.phi1.support_hi(), 10, 1e-14);
    Check c;
    for (int k = 0; k < 2; ++k) {
        const std::string tag = fmt("r=%g", kRadii[k]);
        lpi_check(c, run.series[k], 800.0, 1800.0, 3.0, 0.10, tag);
        TailFitOptions o;
        o.target_exponent = 3.0;
        o.predicted_coeff = -(V0 / pi) * pairing * st.u0(kRadii[k]);
        o.window_lo = 560.0;
        o.window_hi = 1800.0;
        const TailReport r = tail_fit(run.series[k], o);
        c.add(within(r.ratio, 1.0, 0.10), fmt("%s c/c_pred %.4f", tag.c_str(), r.ratio));
    }
    return c;
}

// ---------------------------------------------------------------- spectral

double moment2(const RadialProfile& f) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) { return f(r) * r * r; }, f.support_lo(), f.support_hi(), 10, 1e-14);
}

Check a7(int jobs) {
    // m = 0.1 keeps sigma m <= 5e-3 on the fixed window, far below the
    // lowest ringing frequency (~0.15 / m).
    const double m = 0.1;
    const auto spec = BackgroundSpec::schwarzschild(m);
    const auto f = RadialProfile::bump(1.0, 0.6, 0.2);
    const auto samples = resolvent_sweep(spec, Mode{0}, SigmaGrid::log_spaced(1e-3, 5e-2, 24), f, 1.0, jobs);
    const SigmaFit fit = fit_sigma_series(samples);
    const double bp = -4.0 * m * moment2(f);
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.residual);
    Check c;
    c.add(within(fit.b.real() / bp, 1.0, 0.05), fmt("Re b / (-4m int f r^2) %.4f", fit.b.real() / bp));
    const double ph = fit.a2.imag() / (-pi / 2.0 * fit.b.real());
    c.add(within(ph, 1.0, 0.05), fmt("Im a2 / (-pi/2 Re b) %.4f", ph));
    c.add(fit.stable, fmt("drop-two b ratio %.4f", fit.b_drop2.real() / fit.b.real()));
    c.add(worst <= 1e-6, fmt("max residual %.1e", worst));
    return c;
}

Check a8(int) {
    std::vector<double> rh;
    for (int i = 0; i <= 40; ++i) rh.push_back(0.1 * std::pow(100.0, i / 40.0));
    const auto q = model_solution(ModelMethod::Quadrature, rh), d = model_solution(ModelMethod::Ode, rh);
    double sup = 0.0;
    for (std::size_t i = 0; i < rh.size(); ++i) sup = std::max(sup, std::abs(q.u[i] - d.u[i]));
    Check c;
    c.add(sup <= 1e-6, fmt("quadrature vs ode sup %.1e", sup));
    const double r0 = 1e-3;
    const double dev = (model_solution(ModelMethod::Quadrature, {r0}).u[0] + std::log(r0)).imag() - pi / 2.0;
    c.add(std::abs(dev) <= 1e-4, fmt("Im(u + ln r) - pi/2 at 1e-3: %.3e", dev));
    // Limit r -> 0 of the bracket, by direct quadrature of int e^{-2t} log(it).
    boost::math::quadrature::exp_sinh<double> es;
    const double re = es.integrate([](double t) { return std::exp(-2.0 * t) * std::log(t); });
    const double euler = boost::math::constants::euler<double>();
    const std::complex<double> limit =
        std::complex<double>(2.0 * euler + std::log(4.0), -pi) / 4.0 + std::complex<double>(re, pi / 4.0);
    const double lib = std::abs(model_bracket(1e-12));
    c.add(std::abs(limit) <= 1e-8 && lib <= 1e-8, fmt("bracket limit %.1e, at r=1e-12 %.1e", std::abs(limit), lib));
    const double res = model_operator_residual({0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}, 1e-3);
    c.add(res <= 1e-6, fmt("operator residual %.1e", res));
    return c;
}

Check a9(int) {
    Check c;
    double worst = 0.0;
    for (double v : {0.0, 0.25, 1.0, 2.0, 4.0, 100.0})
        worst = std::max(worst, std::abs(profile_integral(v) - 2.0 * pi * (v + 1.0) / ((v + 2.0) * (v + 2.0))));
    c.add(worst <= 1e-4, fmt("max |I(v) - 2pi(v+1)/(v+2)^2| %.1e", worst));
    return c;
}

Check a10(int) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    const auto f = RadialProfile::bump(1.0, 8.0, 3.0);
    const ExpansionState E = expansion_iterate(spec, f);
    ForcingSpec F;
    F.fr = f;
    F.chi = TemporalProfile{1.0 / TemporalProfile{1.0, 0.0, 1.0}.integral(), 0.0, 1.0};
    const double pc = predicted_constant(spec, F, 10.0).c;
    Check c;
    const double ratio = E.f2_ratio(1e3);
    c.add(within(ratio, 1.0, 0.02), fmt("f2 r^2 / (4m c0) at r=1000: %.4f", ratio));
    c.add(within(E.c0_fit / E.c0, 1.0, 0.01), fmt("c0 fit / quadrature %.6f", E.c0_fit / E.c0));
    c.add(std::abs(E.cM - pc) <= 1e-8 * std::abs(pc), fmt("c_M rel diff %.1e", std::abs(E.cM - pc) / std::abs(pc)));
    return c;
}

Check a11(int) {
    const auto o = inverse_ft_log(2, {200.0, -200.0});
    Check c;
    const double v = o[0] * 200.0 * 200.0 * 200.0 / 2.0;
    c.add(within(v, 1.0, 0.05), fmt("t^3/2 F(200) %.5f", v));
    c.add(std::abs(o[1]) < 1e-6 * std::abs(o[0]), fmt("|F(-200)| / |F(200)| %.1e", std::abs(o[1]) / std::abs(o[0])));
    return c;
}

// ---------------------------------------------------------------- static and Kerr

Check a12(int) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    Check c;
    for (int l : {0, 1}) {
        const double r0 = static_kernel_residual(spec, Mode{l}, 0.0);
        c.add(r0 <= 1e-10, fmt("l=%d exact %.1e", l, r0));
        const double h[3] = {0.1, 0.05, 0.025};
        double r[3];
        for (int i = 0; i < 3; ++i) r[i] = static_kernel_residual(spec, Mode{l}, h[i]);
        const double p1 = std::log2(r[0] / r[1]), p2 = std::log2(r[1] / r[2]);
        c.add(within(p1, 2.0, 0.1) && within(p2, 2.0, 0.1), fmt("l=%d stencil order %.3f, %.3f", l, p1, p2));
    }
    for (double V0 : {0.0, 0.2}) {
        const double r0 = static_kernel_residual(BackgroundSpec::flat(PotentialSpec::inverse_cubic(V0)), Mode{0}, 0.0);
        c.add(r0 <= 1e-10, fmt("flat V0=%g %.1e", V0, r0));
    }
    return c;
}

Check a13(int) {
    const auto spec = BackgroundSpec::schwarzschild(1.0);
    Check c;
    for (const auto& p : {RadialProfile::gaussian(1.0, 15.0, 1.5), RadialProfile::bump(1.0, 10.0, 4.0),
                          RadialProfile::bump(2.0, 30.0, 5.0)}) {
        CauchyData d;
        d.phi1 = p;
        const double ref = predicted_constant(spec, d, 10.0).c;
        KerrData K;
        K.phi0 = [](double, double, double) { return 0.0; };
        K.phi1 = [p](double r, double, double) { return p(r); };
        K.r_lo = p.support_lo();
        K.r_hi = p.support_hi();
        const double k0 = kerr_tail_constant(K, 1.0, 0.0);
        c.add(std::abs(k0 / ref - 1.0) <= 1e-8, fmt("a=0 rel %.1e", std::abs(k0 / ref - 1.0)));
        if (p.kind == ProfileKind::Gaussian) {
            KerrData K2 = K;
            K2.phi1 = [p](double r, double th, double ph) {
                const double ct = std::cos(th);
                return p(r) * (1.0 + 0.3 * ct * std::sin(ph) + 0.2 * ct * ct);
            };
            K2.phi0 = [p](double r, double th, double ph) { return 0.5 * p(r) * std::sin(th) * std::cos(ph); };
            KerrQuadrature q2;
            q2.radial_panels *= 2;
            q2.theta_panels *= 2;
            q2.phi_points *= 2;
            const double x = kerr_tail_constant(K2, 1.0, 0.5), y = kerr_tail_constant(K2, 1.0, 0.5, q2);
            c.add(std::abs(y / x - 1.0) <= 1e-6, fmt("a=0.5 refinement %.1e", std::abs(y / x - 1.0)));
        }
    }
    return c;
}

using Runner = Check (*)(int);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{{"A1", a1}, {"A2", a2},   {"A3", a3},   {"A4", a4},  {"A5", a5},
                                                 {"A6", a6}, {"A7", a7},   {"A8", a8},   {"A9", a9},  {"A10", a10},
                                                 {"A11", a11}, {"A12", a12}, {"A13", a13}};
    return m;
}

}  // namespace

const std::vector<std::string>& acceptance_ids() {
    static const std::vector<std::string> ids{"A1", "A2", "A3", "A4",  "A5",  "A6", "A7",
                                              "A8", "A9", "A10", "A11", "A12", "A13"};
    return ids;
}

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids_in, int jobs) {
    const std::vector<std::string>& ids = ids_in.empty() ? acceptance_ids() : ids_in;
    std::vector<CriterionResult> out(ids.size());
    // Longest first so the wall time is set by A1, not by the queue order.
    std::vector<int> order(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) order[i] = int(i);
    static const std::vector<std::string> heavy{"A1", "A3", "A4", "A5", "A2", "A6", "A7"};
    auto rank = [&](int i) {
        auto it = std::find(heavy.begin(), heavy.end(), ids[i]);
        return int(it - heavy.begin());
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rank(a) < rank(b); });
    const int inner = std::max(1, jobs / 2);
    parallel_for(int(ids.size()), jobs, [&](int k) {
        const int i = order[k];
        auto it = runners().find(ids[i]);
        CriterionResult& r = out[i];
        r.id = ids[i];
        const auto t0 = std::chrono::steady_clock::now();
        if (it == runners().end()) {
            r.detail = "unknown criterion";
        } else {
            try {
                Check c = it->second(inner);
                r.pass = c.pass;
                r.detail = c.detail;
            } catch (const std::exception& e) {
                r.pass = false;
                r.detail = std::string("error: ") + e.what();
            }
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

}  // namespace latetail
