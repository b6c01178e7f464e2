#include "latetail/background.hpp"

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "latetail/errors.hpp"
#include "latetail/quadrature.hpp"

namespace latetail {

namespace odeint = boost::numeric::odeint;

struct PotentialTable {
    boost::math::interpolators::makima<std::vector<double>> interp;
    double r_first, r_last, v_first, v_last;
    int order;
};

// ---------------------------------------------------------------- potentials

PotentialSpec PotentialSpec::none() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::inverse_cubic(double v0) {
    PotentialSpec p;
    p.profile = PotentialProfile::InverseCubic;
    p.amplitude = v0;
    p.decay_order = 3;
    return p;
}

PotentialSpec PotentialSpec::inverse_quartic(double v0) {
    PotentialSpec p;
    p.profile = PotentialProfile::InverseQuartic;
    p.amplitude = v0;
    p.decay_order = 4;
    return p;
}

PotentialSpec PotentialSpec::custom(std::vector<double> r, std::vector<double> v, int decay_order) {
    PotentialSpec p;
    p.profile = PotentialProfile::Custom;
    p.amplitude = 1.0;
    p.decay_order = decay_order;
    p.table_r = r;
    p.table_v = v;
    p.validate();
    double r0 = r.front(), r1 = r.back(), v0 = v.front(), v1 = v.back();
    auto t = std::make_shared<PotentialTable>(PotentialTable{
        boost::math::interpolators::makima<std::vector<double>>(std::move(r), std::move(v)), r0, r1, v0, v1,
        decay_order});
    p.table = std::move(t);
    return p;
}

void PotentialSpec::validate() const {
    if (profile != PotentialProfile::Custom) return;
    if (decay_order != 3 && decay_order != 4)
        throw DomainError("custom potential: decay order must be 3 or 4");
    if (table_r.size() != table_v.size() || table_r.size() < 8)
        throw DomainError("custom potential: need at least 8 (r, V) samples of equal length");
    for (std::size_t i = 1; i < table_r.size(); ++i)
        if (!(table_r[i] > table_r[i - 1])) throw DomainError("custom potential: radii must increase");
    if (table_r.front() < 0.0) throw DomainError("custom potential: negative radius");
    // The tag is trusted, but the tail of the table must be consistent with it.
    std::size_t n = table_r.size(), q = (3 * n) / 4;
    double k = decay_order;
    double tail = std::abs(table_v[n - 1]) * std::pow(table_r[n - 1], k);
    double ref = std::abs(table_v[q]) * std::pow(table_r[q], k);
    if (tail > 2.0 * ref + 1e-300)
        throw DomainError("custom potential: |V r^" + std::to_string(decay_order) +
                          "| grows over the last quarter of the table");
}

bool PotentialSpec::vanishes() const {
    return profile == PotentialProfile::None || amplitude == 0.0;
}

double PotentialSpec::operator()(double r) const {
    switch (profile) {
        case PotentialProfile::None:
            return 0.0;
        case PotentialProfile::InverseCubic: {
            double s = 1.0 + r;
            return amplitude / (s * s * s);
        }
        case PotentialProfile::InverseQuartic: {
            double s = 1.0 + r;
            return amplitude / (s * s * s * s);
        }
        case PotentialProfile::Custom: {
            if (!table) throw DomainError("custom potential without table");
            if (r <= table->r_first) return table->v_first;
            if (r >= table->r_last) return table->v_last * std::pow(table->r_last / r, table->order);
            return table->interp(r);
        }
    }
    return 0.0;
}

double PotentialSpec::inverse_cubic_coefficient() const {
    switch (profile) {
        case PotentialProfile::InverseCubic: return amplitude;
        case PotentialProfile::Custom:
            if (decay_order == 3 && table) return table->v_last * std::pow(table->r_last, 3);
            return 0.0;
        default: return 0.0;
    }
}

std::vector<double> PotentialSpec::asymptotic_coefficients(int jmax) const {
    std::vector<double> u(jmax + 1, 0.0);
    switch (profile) {
        case PotentialProfile::None: break;
        case PotentialProfile::InverseCubic:
            // (1 + r)^-3 = r^-3 sum_j (-1)^j C(j+2, 2) r^-j
            for (int j = 0; 3 + j <= jmax; ++j)
                u[3 + j] = amplitude * ((j % 2) ? -1.0 : 1.0) * (j + 1) * (j + 2) / 2.0;
            break;
        case PotentialProfile::InverseQuartic:
            for (int j = 0; 4 + j <= jmax; ++j)
                u[4 + j] = amplitude * ((j % 2) ? -1.0 : 1.0) * (j + 1) * (j + 2) * (j + 3) / 6.0;
            break;
        case PotentialProfile::Custom:
            if (table && decay_order <= jmax)
                u[decay_order] = table->v_last * std::pow(table->r_last, decay_order);
            break;
    }
    return u;
}

// ---------------------------------------------------------------- spec

BackgroundSpec BackgroundSpec::schwarzschild(double m) {
    BackgroundSpec s;
    s.kind = BackgroundKind::Schwarzschild;
    s.mass = m;
    s.validate();
    return s;
}

BackgroundSpec BackgroundSpec::flat(PotentialSpec v) {
    BackgroundSpec s;
    s.kind = BackgroundKind::FlatPotential;
    s.mass = 0.0;
    s.potential = std::move(v);
    s.validate();
    return s;
}

void BackgroundSpec::validate() const {
    if (kind == BackgroundKind::Schwarzschild) {
        if (!(mass > 0.0)) throw DomainError("Schwarzschild background needs mass > 0");
        if (!potential.vanishes()) throw DomainError("Schwarzschild background takes no potential");
    } else {
        if (mass != 0.0) throw DomainError("flat background needs mass = 0");
        potential.validate();
    }
}

// ---------------------------------------------------------------- tortoise

double tortoise_from_offset(double y, double m) {
    if (!(y > 0.0)) throw DomainError("tortoise: r must exceed 2m");
    return 2.0 * m + y + 2.0 * m * std::log(y);
}

double tortoise(double r, const BackgroundSpec& spec) {
    if (!spec.schwarzschild()) {
        if (!(r >= 0.0)) throw DomainError("tortoise: negative radius");
        return r;
    }
    double m = spec.mass;
    if (!(r > 2.0 * m)) throw DomainError("tortoise: r = " + std::to_string(r) + " is not outside r = 2m");
    return tortoise_from_offset(r - 2.0 * m, m);
}

double inverse_tortoise_offset(double x, double m, double log_guess) {
    // Solve g(s) = e^s + 2m s - b = 0 for s = ln(r - 2m), b = x - 2m.  g is
    // increasing and convex, so Newton from a point with g >= 0 decreases
    // monotonically onto the root.
    const double b = x - 2.0 * m;
    auto g = [&](double s) { return std::exp(s) + 2.0 * m * s - b; };
    double s = b / (2.0 * m);  // g(s) = e^s > 0
    if (b >= 1.0) s = std::min(s, std::log(b));  // g(ln b) = 2m ln b >= 0
    if (std::isfinite(log_guess) && g(log_guess) >= 0.0 && log_guess < s) s = log_guess;
    for (int it = 0; it < 100; ++it) {
        double es = std::exp(s);
        double step = (es + 2.0 * m * s - b) / (es + 2.0 * m);
        s -= step;
        if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(s))) return std::exp(s);
    }
    // Bracketing fallback.
    double lo = s - 1.0, hi = s + 1.0;
    while (g(lo) > 0.0) lo -= 2.0 * (hi - lo);
    while (g(hi) < 0.0) hi += 2.0 * (hi - lo);
    for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
        if (hi - lo <= 4e-16 * std::max(1.0, std::abs(mid))) return std::exp(0.5 * (lo + hi));
    }
    throw ConvergenceError("inverse_tortoise: no convergence for x = " + std::to_string(x));
}

double inverse_tortoise_offset(double x, double m) {
    return inverse_tortoise_offset(x, m, std::numeric_limits<double>::quiet_NaN());
}

double inverse_tortoise(double x, const BackgroundSpec& spec) {
    if (!spec.schwarzschild()) {
        if (!(x >= 0.0)) throw DomainError("inverse_tortoise: negative r* on a flat background");
        return x;
    }
    return 2.0 * spec.mass + inverse_tortoise_offset(x, spec.mass);
}

RadialChart::RadialChart(const BackgroundSpec& spec, double rstar_min, double rstar_max)
    : spec_(spec), rs_min_(rstar_min), rs_max_(rstar_max) {
    if (!(rstar_max > rstar_min)) throw DomainError("RadialChart: empty r* domain");
    if (!spec.schwarzschild() && rstar_min < 0.0) throw DomainError("RadialChart: flat chart starts at r = 0");
}

RadialPoint RadialChart::at_rstar(double x) const {
    if (!spec_.schwarzschild()) return {x, x};
    double y = inverse_tortoise_offset(x, spec_.mass);
    return {2.0 * spec_.mass + y, y};
}

double RadialChart::rstar_of(double r) const { return tortoise(r, spec_); }

// ---------------------------------------------------------------- potentials

double effective_potential(const BackgroundSpec& spec, Mode mode, RadialPoint p) {
    const double L = mode.L();
    if (spec.schwarzschild()) {
        double m = spec.mass, r = p.r;
        double f = p.y / r;
        return f * (L / (r * r) + 2.0 * m / (r * r * r));
    }
    double v = spec.potential(p.r);
    if (mode.l == 0) return v;
    if (!(p.r > 0.0)) throw DomainError("effective_potential: centrifugal term at r = 0");
    return L / (p.r * p.r) + v;
}

double effective_potential(const BackgroundSpec& spec, Mode mode, double r) {
    if (spec.schwarzschild()) {
        if (!(r > 2.0 * spec.mass)) throw DomainError("effective_potential: r <= 2m");
        return effective_potential(spec, mode, RadialPoint{r, r - 2.0 * spec.mass});
    }
    if (r < 0.0) throw DomainError("effective_potential: negative radius");
    return effective_potential(spec, mode, RadialPoint{r, r});
}

double EffectivePotential::operator()(double rstar) const {
    if (spec_.schwarzschild()) {
        double y = inverse_tortoise_offset(rstar, spec_.mass);
        return effective_potential(spec_, mode_, RadialPoint{2.0 * spec_.mass + y, y});
    }
    return effective_potential(spec_, mode_, rstar);
}

std::vector<double> EffectivePotential::table(const std::vector<double>& rstar) const {
    std::vector<double> out(rstar.size());
    double guess = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rstar.size(); ++i) {
        if (spec_.schwarzschild()) {
            double y = inverse_tortoise_offset(rstar[i], spec_.mass, guess);
            guess = std::log(y);
            out[i] = effective_potential(spec_, mode_, RadialPoint{2.0 * spec_.mass + y, y});
        } else {
            out[i] = effective_potential(spec_, mode_, rstar[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------- u_(0)

struct ExtendedStateData {
    bool trivial = true;
    double slope = 1.0;
    double residual = 0.0;
    double table_end = 0.0, table_step = 0.0;
    double far_radius = 0.0, far_offset = 0.0;  // psi ~ r + far_offset beyond far_radius
    std::vector<double> nodes, psi, dpsi;       // uniform part, normalised
    std::shared_ptr<boost::math::interpolators::quintic_hermite<std::vector<double>>> interp;
};

double ExtendedState::u0(double r) const {
    const auto& d = *data;
    if (d.trivial) return 1.0;
    if (r <= 0.0) return d.dpsi.front();
    if (r >= d.far_radius) return 1.0 + d.far_offset / r;
    if (r < 1e-8) return d.interp->prime(r);
    return (*d.interp)(r) / r;
}

double ExtendedState::psi(double r) const {
    const auto& d = *data;
    if (d.trivial) return r;
    if (r <= 0.0) return 0.0;
    if (r >= d.far_radius) return r + d.far_offset;
    return (*d.interp)(r);
}

double ExtendedState::slope() const { return data->slope; }
double ExtendedState::residual() const { return data->residual; }
bool ExtendedState::trivial() const { return data->trivial; }
double ExtendedState::table_end() const { return data->table_end; }
double ExtendedState::table_step() const { return data->table_step; }
const std::vector<double>& ExtendedState::nodes() const { return data->nodes; }
const std::vector<double>& ExtendedState::psi_nodes() const { return data->psi; }
const std::vector<double>& ExtendedState::dpsi_nodes() const { return data->dpsi; }

namespace {

// Sixth-order centred first derivative on a uniform grid.
double d1_sixth(const std::vector<double>& f, std::size_t k, double h) {
    return (-f[k - 3] / 60.0 + 3.0 * f[k - 2] / 20.0 - 0.75 * f[k - 1] + 0.75 * f[k + 1] - 3.0 * f[k + 2] / 20.0 +
            f[k + 3] / 60.0) /
           h;
}

}  // namespace

ExtendedState solve_extended_state(const BackgroundSpec& spec, const ExtendedStateOptions& opt) {
    spec.validate();
    auto d = std::make_shared<ExtendedStateData>();
    if (spec.schwarzschild() || spec.potential.vanishes()) {
        ExtendedState s;
        s.data = d;
        return s;
    }
    d->trivial = false;
    d->table_end = opt.table_end;
    d->table_step = opt.table_step;
    d->far_radius = opt.far_radius;

    // Uniform nodes on [0, table_end], then geometric out to far_radius.
    std::vector<double> xs;
    const int nu = int(std::lround(opt.table_end / opt.table_step));
    for (int k = 0; k <= nu; ++k) xs.push_back(k * opt.table_step);
    for (double r = opt.table_end * 1.02; r < opt.far_radius; r *= 1.02) xs.push_back(r);
    xs.push_back(opt.far_radius);

    using State = std::array<double, 2>;
    const PotentialSpec& V = spec.potential;
    auto rhs = [&](const State& y, State& dy, double r) {
        dy[0] = y[1];
        dy[1] = V(r) * y[0];
    };
    std::vector<double> psi, dpsi;
    psi.reserve(xs.size());
    dpsi.reserve(xs.size());
    State y{0.0, 1.0};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(opt.rtol * 0.1, opt.rtol);
    odeint::integrate_times(stepper, rhs, y, xs.begin(), xs.end(), 1e-3, [&](const State& s, double) {
        psi.push_back(s[0]);
        dpsi.push_back(s[1]);
    });
    if (psi.size() != xs.size()) throw ConvergenceError("solve_extended_state: ODE integration incomplete");

    // Asymptotic slope: psi'(inf) = psi'(R) + int_R^inf V psi, with psi
    // continued linearly across the (tiny) tail.
    const double R = xs.back(), pR = psi.back(), dR = dpsi.back();
    double tail = quad::adaptive([&](double s) { return V(s) * (pR + dR * (s - R)); }, R,
                                 std::numeric_limits<double>::infinity(), 1e-12);
    const double A = dR + tail;
    if (!(std::abs(A) > opt.min_slope))
        throw ComputeError("solve_extended_state: zero-energy resonance (matching slope " + std::to_string(A) +
                           " below tolerance)");
    d->slope = A;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        psi[i] /= A;
        dpsi[i] /= A;
    }
    d->far_offset = psi.back() - R;

    d->nodes.assign(xs.begin(), xs.begin() + nu + 1);
    d->psi.assign(psi.begin(), psi.begin() + nu + 1);
    d->dpsi.assign(dpsi.begin(), dpsi.begin() + nu + 1);

    double res = 0.0;
    for (std::size_t k = 3; k + 3 < d->nodes.size(); ++k) {
        double r = d->nodes[k];
        res = std::max(res, std::abs(d1_sixth(d->dpsi, k, opt.table_step) - V(r) * d->psi[k]));
    }
    d->residual = res;

    std::vector<double> dd(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dd[i] = V(xs[i]) * psi[i];
    d->interp = std::make_shared<boost::math::interpolators::quintic_hermite<std::vector<double>>>(
        std::move(xs), std::move(psi), std::move(dpsi), std::move(dd));

    ExtendedState s;
    s.data = d;
    return s;
}

double effective_mass(const BackgroundSpec& spec) {
    if (spec.schwarzschild()) return spec.mass;
    return spec.mass + 0.5 * spec.potential.inverse_cubic_coefficient();
}

// ---------------------------------------------------------------- static kernels

double static_kernel_residual(const BackgroundSpec& spec, Mode mode, double h) {
    spec.validate();
    if (h < 0.0) throw DomainError("static_kernel_residual: negative spacing");
    if (spec.schwarzschild()) {
        if (mode.l > 1) throw DomainError("static_kernel_residual: no closed-form static solution for l > 1");
        const double m = spec.mass;
        auto psi = [&](double r) { return mode.l == 0 ? r : r * (r - m); };
        const double x0 = -20.0 * m, x1 = 80.0 * m;
        double res = 0.0;
        if (h == 0.0) {
            for (double x = x0; x <= x1; x += 0.05 * m) {
                double y = inverse_tortoise_offset(x, m), r = 2.0 * m + y, f = y / r;
                double d2 = mode.l == 0 ? f * 2.0 * m / (r * r) : f * ((2.0 * m / (r * r)) * (2.0 * r - m) + 2.0 * f);
                double v = effective_potential(spec, mode, RadialPoint{r, y});
                res = std::max(res, std::abs(-d2 + v * psi(r)));
            }
            return res;
        }
        const int n = int(std::ceil((x1 - x0) / h));
        for (int j = 0; j <= n; ++j) {
            double x = x0 + j * h;
            double rm = 2.0 * m + inverse_tortoise_offset(x - h, m);
            double y = inverse_tortoise_offset(x, m), r = 2.0 * m + y;
            double rp = 2.0 * m + inverse_tortoise_offset(x + h, m);
            double d2 = (psi(rp) - 2.0 * psi(r) + psi(rm)) / (h * h);
            double v = effective_potential(spec, mode, RadialPoint{r, y});
            res = std::max(res, std::abs(-d2 + v * psi(r)));
        }
        return res;
    }
    if (mode.l != 0) throw DomainError("static_kernel_residual: flat backgrounds support l = 0 only");
    if (spec.potential.vanishes()) return 0.0;  // psi = r is annihilated exactly
    ExtendedState st = solve_extended_state(spec);
    const double r0 = 2.0, r1 = 100.0;
    double res = 0.0;
    if (h == 0.0) {
        const auto& xs = st.nodes();
        for (std::size_t k = 3; k + 3 < xs.size(); ++k) {
            if (xs[k] < r0 || xs[k] > r1) continue;
            double d2 = d1_sixth(st.dpsi_nodes(), k, st.table_step());
            res = std::max(res, std::abs(-d2 + spec.potential(xs[k]) * st.psi_nodes()[k]));
        }
        return res;
    }
    const int n = int(std::ceil((r1 - r0) / h));
    for (int j = 0; j <= n; ++j) {
        double r = r0 + j * h;
        double d2 = (st.psi(r + h) - 2.0 * st.psi(r) + st.psi(r - h)) / (h * h);
        res = std::max(res, std::abs(-d2 + spec.potential(r) * st.psi(r)));
    }
    return res;
}

// ---------------------------------------------------------------- profiles

double profile_at_r(const RadialProfile& p, const BackgroundSpec& spec, double r) {
    if (p.is_zero()) return 0.0;
    if (p.coord == ProfileCoord::R || !spec.schwarzschild()) return p(r);
    return p(tortoise(r, spec));
}

double profile_at(const RadialProfile& p, const BackgroundSpec& spec, RadialPoint pt) {
    if (p.is_zero()) return 0.0;
    if (p.coord == ProfileCoord::R || !spec.schwarzschild()) return p(pt.r);
    // y underflows to 0 beyond r* ~ -1490m; evaluate at the last representable offset.
    double y = pt.y > 0.0 ? pt.y : std::numeric_limits<double>::denorm_min();
    return p(tortoise_from_offset(y, spec.mass));
}

void profile_support_r(const RadialProfile& p, const BackgroundSpec& spec, double& lo, double& hi) {
    lo = p.support_lo();
    hi = p.support_hi();
    if (p.coord == ProfileCoord::Rstar && spec.schwarzschild()) {
        lo = inverse_tortoise(lo, spec);
        hi = std::isfinite(hi) ? inverse_tortoise(hi, spec) : hi;
    }
    lo = std::max(lo, spec.horizon());
}

// ---------------------------------------------------------------- Kerr

double kerr_tail_constant(const KerrData& data, double m, double a, const KerrQuadrature& q) {
    if (!(m > 0.0)) throw DomainError("kerr_tail_constant: mass must be positive");
    if (!(std::abs(a) < m)) throw DomainError("kerr_tail_constant: need |a| < m");
    const double rplus = m + std::sqrt(m * m - a * a);
    if (!(data.r_lo > rplus) || !(data.r_hi > data.r_lo))
        throw DomainError("kerr_tail_constant: data must be supported in r > r_+ = " + std::to_string(rplus));
    if (q.radial_panels < 1 || q.theta_panels < 1 || q.phi_points < 4)
        throw DomainError("kerr_tail_constant: quadrature too coarse");

    std::vector<double> rx, rw, tx, tw;
    quad::gauss_nodes(data.r_lo, data.r_hi, q.radial_panels, rx, rw);
    quad::gauss_nodes(0.0, M_PI, q.theta_panels, tx, tw);
    const int np = q.phi_points;
    const double dphi = 2.0 * M_PI / np, eps = 1e-3;

    double total = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double r = rx[i];
        const double ra2 = r * r + a * a, Delta = r * r - 2.0 * m * r + a * a;
        for (std::size_t j = 0; j < tx.size(); ++j) {
            const double th = tx[j], st = std::sin(th);
            double acc = 0.0;
            for (int k = 0; k < np; ++k) {
                const double ph = k * dphi;
                double term = 0.0;
                if (data.phi1) term -= (ra2 * ra2 / Delta - a * a * st * st) * data.phi1(r, th, ph);
                if (data.phi0 && a != 0.0) {
                    auto f0 = [&](double p) { return data.phi0(r, th, p); };
                    double dph = (f0(ph - 2 * eps) - 8 * f0(ph - eps) + 8 * f0(ph + eps) - f0(ph + 2 * eps)) /
                                 (12.0 * eps);
                    term -= 4.0 * m * a * r / Delta * dph;
                }
                acc += term;
            }
            total += rw[i] * tw[j] * st * acc * dphi;
        }
    }
    return 2.0 * m / M_PI * total;
}

}  // namespace latetail
