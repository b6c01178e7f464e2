#include "latetail/spectral.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "latetail/errors.hpp"
#include "latetail/quadrature.hpp"

namespace latetail {

namespace odeint = boost::numeric::odeint;
using boost::math::constants::euler;
using boost::math::constants::pi;

namespace {

constexpr cplx I1{0.0, 1.0};

// ---------------------------------------------------------------- radial ODE

// State: Re psi, Im psi, Re psi', Im psi', Re I, Im I with I' = psi s.
using State = std::array<double, 6>;


class RadialSystem {
public:
    RadialSystem(const BackgroundSpec& spec, Mode mode, double sigma, const RadialProfile* f)
        : spec_(spec), mode_(mode), sigma_(sigma), s2_(sigma * sigma), f_(f && !f->is_zero() ? f : nullptr) {}

    RadialPoint point(double x) const {
        if (!spec_.schwarzschild()) return {x, x};
        double y = inverse_tortoise_offset(x, spec_.mass, guess_);
        if (y > 0.0) guess_ = std::log(y);
        return {2.0 * spec_.mass + y, y};
    }
    double potential(const RadialPoint& p) const {
        if (spec_.schwarzschild() && !(p.y > 0.0)) return 0.0;
        return effective_potential(spec_, mode_, p);
    }
    double source(const RadialPoint& p) const {
        if (!f_) return 0.0;
        double v = profile_at(*f_, spec_, p);
        if (v == 0.0) return 0.0;
        return (spec_.schwarzschild() ? p.y : p.r) * v;
    }
    void operator()(const State& s, State& d, double x) const {
        RadialPoint p = point(x);
        double q = potential(p) - s2_;
        d[0] = s[2];
        d[1] = s[3];
        d[2] = q * s[0];
        d[3] = q * s[1];
        // Source in the t-frame: e^{i sigma x} s(x) for a stationary f given in t* = t - x.
        double src = source(p);
        if (src == 0.0) {
            d[4] = d[5] = 0.0;
            return;
        }
        cplx v = cplx(s[0], s[1]) * std::polar(src, sigma_ * x);
        d[4] = v.real();
        d[5] = v.imag();
    }

private:
    const BackgroundSpec& spec_;
    Mode mode_;
    double sigma_, s2_;
    const RadialProfile* f_;
    mutable double guess_ = std::numeric_limits<double>::quiet_NaN();
};

State make_state(cplx psi, cplx dpsi) { return {psi.real(), psi.imag(), dpsi.real(), dpsi.imag(), 0.0, 0.0}; }
cplx psi_of(const State& s) { return {s[0], s[1]}; }
cplx dpsi_of(const State& s) { return {s[2], s[3]}; }
cplx int_of(const State& s) { return {s[4], s[5]}; }

// Integrate from x0 through the monotone sequence `xs`, storing the state at
// each point.
std::vector<State> sweep(const RadialSystem& sys, State y, double x0, const std::vector<double>& xs, double rtol) {
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(rtol * 1e-3, rtol);
    std::vector<State> out;
    out.reserve(xs.size());
    double x = x0;
    for (double xe : xs) {
        if (xe != x) {
            double dt = (xe - x) / 64.0;
            odeint::integrate_adaptive(stepper, std::cref(sys), y, x, xe, dt);
            x = xe;
        }
        for (double v : y)
            if (!std::isfinite(v)) throw ConvergenceError("homogeneous solution: non-finite state");
        out.push_back(y);
    }
    return out;
}

double outer_radius(double sigma, const SpectralOptions& opt) { return std::max(opt.sigma_rout / sigma, opt.r_out_min); }

double x_of_r(const BackgroundSpec& spec, double r) { return spec.schwarzschild() ? tortoise(r, spec) : r; }

// Start of psi_left: position and value.
struct LeftStart {
    double x;
    cplx psi, dpsi;
};

LeftStart left_start(const BackgroundSpec& spec, Mode mode, double sigma, const SpectralOptions& opt) {
    if (spec.schwarzschild()) {
        double x = opt.left_rstar * spec.mass;
        cplx e = std::exp(-I1 * sigma * x);
        return {x, e, -I1 * sigma * e};
    }
    const int l = mode.l;
    if (l == 0) return {0.0, 0.0, 1.0};
    // psi = r^{l+1} (1 + c r^2), c = (V(0) - sigma^2) / (2 (2l + 3))
    const double r0 = 1e-2;
    double c = (spec.potential(0.0) - sigma * sigma) / (2.0 * (2 * l + 3));
    double p = std::pow(r0, l + 1);
    return {r0, p * (1.0 + c * r0 * r0), p * ((l + 1) / r0 + c * (l + 3) * r0)};
}

// psi_right and its x-derivative at r from the outgoing series.
void right_start(const BackgroundSpec& spec, const std::vector<cplx>& a, double sigma, double r, cplx& psi,
                 cplx& dpsi) {
    double m = spec.schwarzschild() ? spec.mass : 0.0;
    double x = x_of_r(spec, r);
    cplx h = 0.0, dh = 0.0;
    double rk = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        h += a[k] * rk;
        dh -= double(k) * a[k] * rk / r;
        rk /= r;
    }
    cplx e = std::exp(I1 * sigma * x);
    psi = e * h;
    dpsi = e * (I1 * sigma * h + (1.0 - 2.0 * m / r) * dh);
}

}  // namespace

// ---------------------------------------------------------------- grids

SigmaGrid SigmaGrid::log_spaced(double lo, double hi, int n, const SpectralOptions& opt) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("SigmaGrid: need 0 < lo < hi and n >= 2");
    SigmaGrid g;
    for (int i = 0; i < n; ++i) {
        double s = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
        g.values.push_back(s);
        g.r_out.push_back(outer_radius(s, opt));
    }
    return g;
}

void SigmaGrid::validate() const {
    if (values.empty() || values.size() != r_out.size()) throw DomainError("SigmaGrid: empty or mismatched");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw DomainError("SigmaGrid: sigma must be positive");
        if (i && !(values[i] > values[i - 1])) throw DomainError("SigmaGrid: sigma must increase");
        if (values[i] * r_out[i] < 30.0) throw DomainError("SigmaGrid: sigma R_out below 30");
        if (i && r_out[i] > r_out[i - 1]) throw DomainError("SigmaGrid: R_out must not increase");
    }
}

// ---------------------------------------------------------------- homogeneous

std::vector<cplx> outgoing_series(const BackgroundSpec& spec, Mode mode, double sigma, int order) {
    if (!(sigma > 0.0)) throw DomainError("outgoing_series: sigma must be positive");
    if (order < 0) throw DomainError("outgoing_series: negative order");
    const double m = spec.schwarzschild() ? spec.mass : 0.0;
    const double L = mode.L();
    // V_l / (1 - 2m/r) - L / r^2 = sum_j u_j r^-j
    std::vector<double> u = spec.schwarzschild() ? std::vector<double>(order + 2, 0.0)
                                                 : spec.potential.asymptotic_coefficients(order + 2);
    if (spec.schwarzschild() && u.size() > 3) u[3] = 2.0 * m;
    std::vector<cplx> a(order + 1, 0.0);
    a[0] = 1.0;
    for (int n = 1; n <= order; ++n) {
        cplx acc = (double(n) * (n - 1) - L) * a[n - 1];
        if (n >= 2) acc -= 2.0 * m * double(n) * (n - 2) * a[n - 2];
        for (int j = 3; j < int(u.size()); ++j) {
            int k = n + 1 - j;
            if (k < 0) break;
            acc -= u[j] * a[k];
        }
        a[n] = acc / (2.0 * I1 * sigma * double(n));
    }
    return a;
}

HomogeneousSolutions homogeneous_solutions(const BackgroundSpec& spec, Mode mode, double sigma,
                                           const std::vector<double>& x, const SpectralOptions& opt) {
    spec.validate();
    if (!(sigma > 0.0)) throw DomainError("homogeneous_solutions: sigma must be positive");
    if (x.empty()) throw DomainError("homogeneous_solutions: no sample points");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("homogeneous_solutions: points must increase");
    HomogeneousSolutions H;
    H.sigma = sigma;
    H.r_out = outer_radius(sigma, opt);
    const double x_out = x_of_r(spec, H.r_out);
    LeftStart ls = left_start(spec, mode, sigma, opt);
    if (!(x.front() >= ls.x && x.back() <= x_out))
        throw DomainError("homogeneous_solutions: points outside [left start, R_out]");
    RadialSystem sys(spec, mode, sigma, nullptr);

    auto left = sweep(sys, make_state(ls.psi, ls.dpsi), ls.x, x, opt.rtol);
    std::vector<double> xr(x.rbegin(), x.rend());
    auto a = outgoing_series(spec, mode, sigma, opt.series_order);
    cplx p0, d0;
    right_start(spec, a, sigma, H.r_out, p0, d0);
    auto right = sweep(sys, make_state(p0, d0), x_out, xr, opt.rtol);
    std::reverse(right.begin(), right.end());

    auto a1 = a;
    a1.pop_back();
    cplx p1, d1;
    right_start(spec, a1, sigma, H.r_out, p1, d1);
    H.series_error = std::abs(p0 - p1) / std::abs(p0);

    H.x = x;
    double drift = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        H.psi_left.push_back(psi_of(left[i]));
        H.dpsi_left.push_back(dpsi_of(left[i]));
        H.psi_right.push_back(psi_of(right[i]));
        H.dpsi_right.push_back(dpsi_of(right[i]));
        cplx W = H.psi_left[i] * H.dpsi_right[i] - H.dpsi_left[i] * H.psi_right[i];
        if (i == 0) {
            H.wronskian = W;
            double scale = std::abs(H.psi_left[0] * H.dpsi_right[0]) + std::abs(H.dpsi_left[0] * H.psi_right[0]);
            if (!(std::abs(W) > 1e-10 * scale))
                throw ComputeError("homogeneous_solutions: Wronskian vanishes (resonance) at sigma = " +
                                   std::to_string(sigma));
        }
        drift = std::max(drift, std::abs(W - H.wronskian) / std::abs(H.wronskian));
    }
    H.wronskian_drift = drift;
    if (drift > opt.wronskian_tol)
        throw ConvergenceError("homogeneous_solutions: Wronskian drift " + std::to_string(drift) + " at sigma = " +
                               std::to_string(sigma));
    return H;
}

// ---------------------------------------------------------------- resolvent

namespace {

// psi = -(psi_R I_L + psi_L I_R) / W at the nodes, for a given right start.
struct GreenPass {
    std::vector<cplx> psi;
    cplx W;
    double drift = 0.0;
};

GreenPass green_nodes(const RadialSystem& sys, const std::vector<State>& left, const std::vector<double>& nodes,
                      double x_out, cplx p0, cplx d0, double rtol) {
    std::vector<double> xr(nodes.rbegin(), nodes.rend());
    auto right = sweep(sys, make_state(p0, d0), x_out, xr, rtol);
    GreenPass g;
    const std::size_t n = nodes.size();
    std::vector<cplx> W(n);
    for (std::size_t i = 0; i < n; ++i) {
        const State& R = right[n - 1 - i];
        W[i] = psi_of(left[i]) * dpsi_of(R) - dpsi_of(left[i]) * psi_of(R);
    }
    g.W = W[0];
    for (std::size_t i = 0; i < n; ++i) g.drift = std::max(g.drift, std::abs(W[i] - g.W) / std::abs(g.W));
    for (std::size_t i = 0; i < n; ++i) {
        const State& R = right[n - 1 - i];
        // Integrating downward accumulates -int_x^{x_out} psi_R s.
        cplx IR = -int_of(R);
        cplx IL = int_of(left[i]);
        g.psi.push_back(-(psi_of(R) * IL + psi_of(left[i]) * IR) / g.W);
    }
    return g;
}

}  // namespace

ResolventSample resolvent_apply(const BackgroundSpec& spec, Mode mode, double sigma, const RadialProfile& f,
                                double r_obs, const SpectralOptions& opt) {
    spec.validate();
    if (!(sigma > 0.0)) throw DomainError("resolvent_apply: sigma must be positive");
    if (!(r_obs > spec.horizon())) throw DomainError("resolvent_apply: r_obs must lie outside the horizon");
    ResolventSample S;
    S.sigma = sigma;
    S.r_obs = r_obs;
    S.series_order = opt.series_order;
    if (f.is_zero()) return S;

    const double r_out = outer_radius(sigma, opt);
    if (!(r_obs < r_out)) throw DomainError("resolvent_apply: r_obs beyond R_out");
    const double x_out = x_of_r(spec, r_out);
    LeftStart ls = left_start(spec, mode, sigma, opt);

    const double x_obs = x_of_r(spec, r_obs);
    // Residual check around a point inside the support.
    double x_c;
    if (f.kind == ProfileKind::PowerLaw) {
        x_c = x_of_r(spec, 1.5 * std::max(f.center, spec.horizon() + 1.0));
    } else if (f.coord == ProfileCoord::Rstar && spec.schwarzschild()) {
        x_c = f.center;
    } else {
        x_c = x_of_r(spec, f.center);
    }
    // Stencil step: a small fraction of the shortest length in the problem.
    double len = f.kind == ProfileKind::PowerLaw ? std::max(f.center, 1.0) : f.width;
    if (spec.schwarzschild()) len = std::min(len, spec.mass);
    const double h = 1e-2 * len;
    std::vector<double> stencil;
    for (int k = -2; k <= 2; ++k) stencil.push_back(x_c + k * h);
    std::vector<double> nodes = stencil;
    nodes.push_back(x_obs);
    // Support edges become nodes so that no step straddles them.
    double r_lo, r_hi;
    profile_support_r(f, spec, r_lo, r_hi);
    for (double r : {r_lo, r_hi}) {
        if (!(r > spec.horizon() && r < r_out)) continue;
        double x = x_of_r(spec, r);
        if (x > ls.x) nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.front() <= ls.x || nodes.back() >= x_out) throw DomainError("resolvent_apply: node outside the domain");
    const std::size_t iobs = std::find(nodes.begin(), nodes.end(), x_obs) - nodes.begin();
    std::size_t ic[5];
    for (int k = 0; k < 5; ++k) ic[k] = std::find(nodes.begin(), nodes.end(), stencil[k]) - nodes.begin();

    RadialSystem sys(spec, mode, sigma, &f);
    auto left = sweep(sys, make_state(ls.psi, ls.dpsi), ls.x, nodes, opt.rtol);

    auto a = outgoing_series(spec, mode, sigma, opt.series_order);
    cplx p0, d0;
    right_start(spec, a, sigma, r_out, p0, d0);
    GreenPass g = green_nodes(sys, left, nodes, x_out, p0, d0, opt.rtol);

    a.pop_back();
    right_start(spec, a, sigma, r_out, p0, d0);
    GreenPass g1 = green_nodes(sys, left, nodes, x_out, p0, d0, opt.rtol);

    S.wronskian = g.W;
    S.wronskian_drift = g.drift;
    if (g.drift > opt.wronskian_tol)
        throw ConvergenceError("resolvent_apply: Wronskian drift " + std::to_string(g.drift));
    const cplx back = std::polar(1.0, -sigma * x_obs);
    S.u_obs = back * g.psi[iobs] / r_obs;
    S.series_error = std::abs(g.psi[iobs] - g1.psi[iobs]) / r_obs;

    RadialPoint pc = sys.point(x_c);
    double V = sys.potential(pc);
    cplx s = std::polar(sys.source(pc), sigma * x_c);
    const cplx* p = g.psi.data();
    cplx lap = (-p[ic[0]] + 16.0 * p[ic[1]] - 30.0 * p[ic[2]] + 16.0 * p[ic[3]] - p[ic[4]]) / (12.0 * h * h);
    cplx res = -lap + (V - sigma * sigma) * p[ic[2]] - s;
    double scale = std::max({std::abs(s), std::abs((V - sigma * sigma) * p[ic[2]]), 1e-300});
    S.residual = std::abs(res) / scale;
    return S;
}

std::vector<ResolventSample> resolvent_sweep(const BackgroundSpec& spec, Mode mode, const SigmaGrid& grid,
                                             const RadialProfile& f, double r_obs, int jobs,
                                             const SpectralOptions& opt) {
    grid.validate();
    const std::size_t n = grid.values.size();
    std::vector<ResolventSample> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            std::size_t i = next++;
            if (i >= n) return;
            try {
                SpectralOptions o = opt;
                o.r_out_min = grid.r_out[i];
                o.sigma_rout = 0.0;
                out[i] = resolvent_apply(spec, mode, grid.values[i], f, r_obs, o);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(jobs, int(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

// ---------------------------------------------------------------- zero energy

namespace {

// Logarithmic grid in q = ln(r - r_h).
struct LogGrid {
    double rh;
    std::vector<double> q, r, y;
    double dq;
};

LogGrid make_log_grid(double rh, double y_min, double r_max, int n) {
    LogGrid g;
    g.rh = rh;
    double q0 = std::log(y_min), q1 = std::log(r_max - rh);
    g.dq = (q1 - q0) / (n - 1);
    for (int i = 0; i < n; ++i) {
        double q = q0 + i * g.dq;
        g.q.push_back(q);
        g.y.push_back(std::exp(q));
        g.r.push_back(rh + g.y.back());
    }
    return g;
}

// Running trapezoid integral of v over the grid from the left.
template <class T>
std::vector<T> cumulative(const std::vector<T>& v, double dq) {
    std::vector<T> c(v.size(), T{});
    for (std::size_t i = 1; i < v.size(); ++i) c[i] = c[i - 1] + 0.5 * dq * (v[i] + v[i - 1]);
    return c;
}

// u = int_r^inf G / (s (s - r_h)) ds on the grid, with the tail beyond the
// last node from G(s) ~ G_end + g ln(s / R).
template <class T>
std::vector<T> invert_tail(const LogGrid& g, const std::vector<T>& G, T g_log) {
    const std::size_t n = g.r.size();
    std::vector<T> u(n);
    const double R = g.r.back(), rh = R - g.y.back();
    // int_R^inf ds / (s (s - rh)) and int_R^inf ln(s / R) ds / (s (s - rh)).
    double k0 = rh > 0.0 ? -std::log1p(-rh / R) / rh : 1.0 / R;
    double k1 = 0.0, p = 1.0 / R;
    for (int k = 0; k < 40 && p > 1e-30 * k1; ++k, p *= rh / R) k1 += p / ((k + 1.0) * (k + 1.0));
    u[n - 1] = G[n - 1] * k0 + g_log * k1;
    for (std::size_t i = n - 1; i-- > 0;)
        u[i] = u[i + 1] + 0.5 * g.dq * (G[i] / g.r[i] + G[i + 1] / g.r[i + 1]);
    return u;
}

struct Line2 {
    double a, b;
};

// Least squares y = a + b z.
Line2 fit2(const std::vector<double>& z, const std::vector<double>& y) {
    Eigen::MatrixXd A(z.size(), 2);
    Eigen::VectorXd rhs(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = z[i];
        rhs(i) = y[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    return {c(0), c(1)};
}

void check_l0_no_potential(const BackgroundSpec& spec, Mode mode, const char* who) {
    spec.validate();
    if (mode.l != 0) throw DomainError(std::string(who) + ": only l = 0 is supported");
    if (!spec.schwarzschild() && !spec.potential.vanishes())
        throw DomainError(std::string(who) + ": flat backgrounds must have V = 0");
}

// c0 = int f r^2 dr by adaptive quadrature in the profile's coordinate.
double radial_moment(const BackgroundSpec& spec, const RadialProfile& f) {
    if (f.is_zero()) return 0.0;
    const double m = spec.schwarzschild() ? spec.mass : 0.0;
    double lo = f.support_lo(), hi = f.support_hi();
    std::vector<double> breaks;
    if (f.kind != ProfileKind::PowerLaw) breaks.push_back(f.center);
    if (f.coord == ProfileCoord::Rstar && spec.schwarzschild()) {
        return quad::adaptive(
            [&](double x) {
                double y = inverse_tortoise_offset(x, m), r = 2.0 * m + y;
                return f(x) * r * y;
            },
            lo, hi, 1e-14, breaks);
    }
    lo = std::max(lo, spec.horizon());
    return quad::adaptive([&](double r) { return f(r) * r * r; }, lo, hi, 1e-14, breaks);
}

constexpr int kLogPoints = 320001;
constexpr double kLogYmin = 1e-8;
constexpr double kLogRmax = 1e6;

std::vector<double> g0_table(const BackgroundSpec& spec, const RadialProfile& f, const LogGrid& g) {
    std::vector<double> integrand(g.r.size());
    for (std::size_t i = 0; i < g.r.size(); ++i)
        integrand[i] = profile_at(f, spec, RadialPoint{g.r[i], g.y[i]}) * g.r[i] * g.r[i] * g.y[i];
    return cumulative(integrand, g.dq);
}

}  // namespace

ZeroEnergySolution zero_energy_solve(const BackgroundSpec& spec, Mode mode, const RadialProfile& f) {
    check_l0_no_potential(spec, mode, "zero_energy_solve");
    LogGrid g = make_log_grid(spec.horizon(), kLogYmin * std::max(1.0, spec.mass), kLogRmax, kLogPoints);
    ZeroEnergySolution Z;
    Z.r = g.r;
    Z.c0 = radial_moment(spec, f);
    if (f.is_zero()) {
        Z.u.assign(g.r.size(), 0.0);
        return Z;
    }
    std::vector<double> G = g0_table(spec, f, g);
    Z.u = invert_tail(g, G, 0.0);
    std::vector<double> z, y;
    for (std::size_t i = 0; i < g.r.size(); i += 97)
        if (g.r[i] >= 1e3 && g.r[i] <= 1e5) {
            z.push_back(1.0 / g.r[i]);
            y.push_back(g.r[i] * Z.u[i]);
        }
    Line2 L = fit2(z, y);
    Z.c0_fit = L.a;
    const double m = spec.schwarzschild() ? spec.mass : 0.0;
    Z.subleading = m > 0.0 ? L.b / (m * L.a) : L.b;
    if (std::abs(Z.c0_fit - Z.c0) > 0.01 * std::abs(Z.c0))
        throw ComputeError("zero_energy_solve: quadrature and fitted c0 disagree beyond 1%");
    return Z;
}

double ExpansionState::f2_ratio(double rr) const {
    auto it = std::lower_bound(r.begin(), r.end(), rr);
    if (it == r.begin() || it == r.end()) throw DomainError("f2_ratio: radius outside the table");
    std::size_t i = it - r.begin();
    double t = (std::log(rr) - std::log(r[i - 1])) / (std::log(r[i]) - std::log(r[i - 1]));
    cplx v = f2[i - 1] * (1.0 - t) + f2[i] * t;
    return v.real() * rr * rr / (4.0 * mass * c0);
}

ExpansionState expansion_iterate(const BackgroundSpec& spec, const RadialProfile& f) {
    if (!spec.schwarzschild()) throw DomainError("expansion_iterate: Schwarzschild backgrounds only");
    check_l0_no_potential(spec, Mode{0}, "expansion_iterate");
    if (f.is_zero()) throw DomainError("expansion_iterate: f vanishes identically");
    const double m = spec.mass, rh = spec.horizon();
    LogGrid g = make_log_grid(rh, kLogYmin * m, kLogRmax, kLogPoints);
    const std::size_t n = g.r.size();
    ExpansionState E;
    E.mass = m;
    E.r = g.r;
    E.c0 = radial_moment(spec, f);
    E.cX = 4.0 * m * E.c0;
    E.cM = -2.0 * E.cX;

    std::vector<double> G0 = g0_table(spec, f, g);
    E.u0 = invert_tail(g, G0, 0.0);
    E.c0_fit = G0.back();

    // f1 = 2i (u0' + u0 / r), u0' = -G0 / (r (r - 2m)).
    E.f1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double du = -G0[i] / (g.r[i] * g.y[i]);
        E.f1[i] = 2.0 * I1 * (du + E.u0[i] / g.r[i]);
    }
    // u1 = box(0)^-1 f1: G1 = int f1 s^2 ds, u1' = -G1 / (r (r - 2m)).
    std::vector<cplx> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = E.f1[i] * g.r[i] * g.r[i] * g.y[i];
    std::vector<cplx> G1 = cumulative(w, g.dq);
    // f1 ~ g / s^3 at large s makes G1 grow like g ln s.
    cplx g_log = E.f1[n - 1] * std::pow(g.r[n - 1], 3);
    E.u1 = invert_tail(g, G1, g_log);
    E.f2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx du = -G1[i] / (g.r[i] * g.y[i]);
        E.f2[i] = 2.0 * I1 * (du + E.u1[i] / g.r[i]);
    }

    // Im(u1 r) = A + B ln r + (C ln r + D) / r on [1e3, 1e5].
    {
        std::vector<std::array<double, 4>> rows;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; i += 97)
            if (g.r[i] >= 1e3 * m && g.r[i] <= 1e5 * m) {
                double r = g.r[i], lr = std::log(r);
                rows.push_back({1.0, lr, lr / r, 1.0 / r});
                y.push_back((E.u1[i] * r).imag());
            }
        Eigen::MatrixXd A(rows.size(), 4);
        Eigen::VectorXd rhs(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (int k = 0; k < 4; ++k) A(i, k) = rows[i][k];
            rhs(i) = y[i];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        E.log_lead = c(1) / (-2.0 * m * E.c0);
    }
    for (const auto& v : E.f2)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ComputeError("expansion_iterate: non-finite f2 table");
    return E;
}

// ---------------------------------------------------------------- model solution

cplx model_bracket(double rh) {
    if (!(rh > 0.0)) throw DomainError("model_bracket: r^ must be positive");
    // log(r^ + it) - log(it) = log(1 - i a), a = r^/t.
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto re = [rh](double t) {
        if (!(t > 0.0)) return 0.0;
        double a = rh / t;
        double h = a > 1e8 ? std::log(a) + 0.5 * std::log1p(1.0 / (a * a)) : 0.5 * std::log1p(a * a);
        return std::exp(-2.0 * t) * h;
    };
    auto im = [rh](double t) { return t > 0.0 ? -std::exp(-2.0 * t) * std::atan(rh / t) : 0.0; };
    double tol = 1e-14;
    double r1 = ts.integrate(re, 0.0, rh, tol) + es.integrate(re, rh, std::numeric_limits<double>::infinity(), tol);
    double i1 = ts.integrate(im, 0.0, rh, tol) + es.integrate(im, rh, std::numeric_limits<double>::infinity(), tol);
    return {r1, i1};
}

namespace {

// v(s) = int_0^inf e^{-2 s tau} / (tau - i) dtau.
cplx model_v(double s) {
    boost::math::quadrature::exp_sinh<double> es;
    auto re = [s](double t) { return std::exp(-2.0 * s * t) * t / (t * t + 1.0); };
    auto im = [s](double t) { return std::exp(-2.0 * s * t) / (t * t + 1.0); };
    return {es.integrate(re, 0.0, std::numeric_limits<double>::infinity(), 1e-14),
            es.integrate(im, 0.0, std::numeric_limits<double>::infinity(), 1e-14)};
}

}  // namespace

ModelSolution model_solution(ModelMethod method, const std::vector<double>& rhat) {
    ModelSolution M;
    M.method = method;
    M.rhat = rhat;
    for (std::size_t i = 0; i < rhat.size(); ++i) {
        if (!(rhat[i] > 0.0)) throw DomainError("model_solution: r^ must be positive");
        if (i && !(rhat[i] > rhat[i - 1])) throw DomainError("model_solution: r^ must increase");
    }
    if (method == ModelMethod::Quadrature) {
        for (double r : rhat) M.u.push_back(I1 * model_bracket(r) / r);
        return M;
    }
    // w = r^ u~ solves w' = v with w(r0) = r0 (1 - gamma - ln 2 r0 + i pi / 2) + O(r0^2 ln r0).
    using S2 = std::array<double, 2>;
    const double r0 = std::min(1e-7, 1e-3 * rhat.front());
    const double g = euler<double>();
    cplx w0 = r0 * cplx(1.0 - g - std::log(2.0 * r0), 0.5 * pi<double>());
    S2 w{w0.real(), w0.imag()};
    auto rhs = [](const S2&, S2& d, double l) {
        double r = std::exp(l);
        cplx v = r * model_v(r);
        d[0] = v.real();
        d[1] = v.imag();
    };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<S2>>(1e-16, 1e-13);
    double l = std::log(r0);
    for (double r : rhat) {
        double le = std::log(r);
        odeint::integrate_adaptive(stepper, rhs, w, l, le, 0.1);
        l = le;
        M.u.push_back(cplx(w[0], w[1]) / r);
    }
    return M;
}

double model_operator_residual(const std::vector<double>& rhat, double h) {
    if (!(h > 0.0)) throw DomainError("model_operator_residual: h must be positive");
    double worst = 0.0;
    for (double r : rhat) {
        if (!(r > 2.0 * h)) throw DomainError("model_operator_residual: r^ must exceed 2h");
        // R u = -(1/r) (d + 2i) d (r u) with r u = i * bracket; five-point stencils.
        cplx w[5];
        for (int k = 0; k < 5; ++k) w[k] = I1 * model_bracket(r + (k - 2) * h);
        cplx d1 = (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) / (12.0 * h);
        cplx d2 = (-w[0] + 16.0 * w[1] - 30.0 * w[2] + 16.0 * w[3] - w[4]) / (12.0 * h * h);
        cplx Ru = -(d2 + 2.0 * I1 * d1) / r;
        worst = std::max(worst, std::abs(Ru * r * r - 1.0));
    }
    return worst;
}

// ---------------------------------------------------------------- oscillatory integrals

double profile_integral(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("profile_integral: v must be finite and >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    if (v == 0.0) {
        // As v -> 0+ the kernel tends to P(1/2t) plus a boundary layer at
        // t = 0 carrying (1/2 - i pi/4) delta; against 1/(t - i) the layer
        // adds pi/4 to the real part.
        double reg = quad::adaptive([](double t) { return 0.5 / (t * t + 1.0); }, 0.0, inf, 1e-13);
        return reg + 0.25 * pi<double>();
    }
    auto f = [v](double t) {
        cplx num = 2.0 * cplx(t, v);
        cplx den = cplx(2.0 * t, v) * cplx(2.0 * t, v) * cplx(t, -1.0);
        return (num / den).real();
    };
    std::vector<double> br{0.25 * v, 0.5 * v, v, 2.0 * v, 1.0, 4.0};
    std::sort(br.begin(), br.end());
    return quad::adaptive(f, 0.0, inf, 1e-12, br);
}

double FourierWindow::operator()(double sigma) const {
    double s = std::abs(sigma);
    if (s <= flat) return 1.0;
    if (s >= cut) return 0.0;
    double c = 0.5 * (flat + cut), h = 0.5 * (cut - flat);
    double u = (s - c) / h;
    return 0.5 * std::erfc(kappa * (s - c) / (1.0 - std::pow(u, power)));
}

std::vector<double> inverse_ft_log(int k, const std::vector<double>& t, const FourierWindow& w) {
    if (k < 0) throw DomainError("inverse_ft_log: k must be >= 0");
    if (!(w.flat > 0.0 && w.cut > w.flat)) throw DomainError("inverse_ft_log: bad window");
    // Panels: geometric towards 0 on [0, flat], uniform on [flat, cut].
    std::vector<double> edges{0.0};
    for (int j = 60; j >= 0; --j) edges.push_back(w.flat * std::ldexp(1.0, -j));
    const int nu = 400;
    for (int j = 1; j <= nu; ++j) edges.push_back(w.flat + (w.cut - w.flat) * j / nu);
    std::vector<double> xs, ws;
    std::vector<double> X, Wt, base;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        quad::gauss_nodes(edges[e], edges[e + 1], 1, xs, ws);
        X.insert(X.end(), xs.begin(), xs.end());
        Wt.insert(Wt.end(), ws.begin(), ws.end());
    }
    const double sgn = (k % 2) ? -1.0 : 1.0;
    std::vector<double> out;
    for (double tt : t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            double s = X[i];
            double sk = std::pow(s, k) * w(s);
            if (sk == 0.0) continue;
            double ls = std::log(s);
            double c = std::cos(s * tt), sn = std::sin(s * tt);
            // sigma > 0 and sigma = -s < 0 (log(-s + i0) = ln s + i pi) combined.
            acc += Wt[i] * sk * (c * ls * (1.0 + sgn) - sgn * pi<double>() * sn);
        }
        out.push_back(acc / (2.0 * pi<double>()));
    }
    return out;
}

// ---------------------------------------------------------------- sigma fits

namespace {

struct RawFit {
    Eigen::VectorXcd c;
    double residual = 0.0;
    double condition = 0.0;
};

RawFit fit_basis(const std::vector<SigmaValue>& s) {
    const int n = int(s.size()), p = 6;
    Eigen::MatrixXd A(n, p);
    Eigen::VectorXd yr(n), yi(n);
    for (int i = 0; i < n; ++i) {
        double x = s[i].sigma, lx = std::log(x);
        A(i, 0) = 1.0;
        A(i, 1) = x;
        A(i, 2) = x * x;
        A(i, 3) = x * x * lx;
        A(i, 4) = x * x * x;
        A(i, 5) = x * x * x * lx;
        yr(i) = s[i].u.real();
        yi(i) = s[i].u.imag();
    }
    Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
    for (int k = 0; k < p; ++k) A.col(k) /= scale(k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    RawFit F;
    F.condition = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
    Eigen::VectorXd cr = svd.solve(yr), ci = svd.solve(yi);
    F.c.resize(p);
    for (int k = 0; k < p; ++k) F.c(k) = cplx(cr(k), ci(k)) / scale(k);
    double ss = 0.0;
    Eigen::VectorXd rr = A * cr - yr, ri = A * ci - yi;
    ss = rr.squaredNorm() + ri.squaredNorm();
    F.residual = std::sqrt(ss / n);
    return F;
}

}  // namespace

SigmaFit fit_sigma_series(const std::vector<SigmaValue>& samples, double max_condition) {
    std::vector<SigmaValue> s = samples;
    std::sort(s.begin(), s.end(), [](const SigmaValue& a, const SigmaValue& b) { return a.sigma < b.sigma; });
    if (s.size() < 12) throw DomainError("fit_sigma_series: need at least 12 samples");
    if (!(s.front().sigma > 0.0)) throw DomainError("fit_sigma_series: sigma must be positive");
    if (s.back().sigma < std::pow(10.0, 1.5) * s.front().sigma)
        throw DomainError("fit_sigma_series: samples must span 1.5 decades");
    RawFit F = fit_basis(s);
    if (!(F.condition <= max_condition))
        throw ComputeError("fit_sigma_series: condition number " + std::to_string(F.condition) + " too large");
    SigmaFit out;
    out.a0 = F.c(0);
    out.a1 = F.c(1);
    out.a2 = F.c(2);
    out.b = F.c(3);
    out.a3 = F.c(4);
    out.b3 = F.c(5);
    out.residual = F.residual;
    out.condition = F.condition;
    s.resize(s.size() - 2);
    RawFit D = fit_basis(s);
    out.b_drop2 = D.c(3);
    out.stable = std::abs(out.b_drop2 - out.b) <= 0.05 * std::abs(out.b);
    return out;
}

SigmaFit fit_sigma_series(const std::vector<ResolventSample>& samples, double max_condition) {
    std::vector<SigmaValue> v;
    for (const auto& s : samples) v.push_back({s.sigma, s.u_obs});
    return fit_sigma_series(v, max_condition);
}

}  // namespace latetail
