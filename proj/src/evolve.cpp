#include "latetail/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "latetail/errors.hpp"
#include "latetail/quadrature.hpp"

namespace latetail {

namespace {

std::string fmt(const char* f, double a, double b, double c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Four-point Lagrange interpolation of samples f[j0..j0+3] at offset s
// measured from node j0 + 1 in units of the spacing.
template <class T>
T lagrange4(const T* f, double s) {
    T a = s + 1.0, b = s, c = s - 1.0, d = s - 2.0;
    return -f[0] * b * c * d / 6 + f[1] * a * c * d / 2 - f[2] * a * b * d / 2 + f[3] * a * b * c / 6;
}

// Value at distance s (in cells) from the edge node f[0] towards the
// interior, by degree-7 Lagrange interpolation on f[0], f[dir], ...,
// f[7 dir].
template <class T>
T edge_transport(const T* f, int dir, double s) {
    T out = 0;
    for (int k = 0; k < 8; ++k) {
        T w = 1;
        for (int q = 0; q < 8; ++q)
            if (q != k) w *= T(s - q) / T(k - q);
        out += w * f[k * dir];
    }
    return out;
}

// Interpolate a uniform row (origin x0, spacing h, n samples) at x.  Returns
// false when x is too close to the ends for the four-point stencil.
template <class T>
bool interp_row(const std::vector<T>& f, double x0, double h, double x, double& out) {
    double q = (x - x0) / h;
    long j = long(std::floor(q));
    if (j < 1 || j + 2 >= long(f.size())) return false;
    out = double(lagrange4(&f[j - 1], q - j));
    return true;
}

}  // namespace

CauchyGrid CauchyGrid::with_spacing(double rmin, double rmax, double dx, double cfl, double t_end) {
    if (!(dx > 0.0) || !(rmax > rmin)) throw DomainError("CauchyGrid: bad spacing or domain");
    CauchyGrid g;
    g.rstar_min = rmin;
    g.rstar_max = rmax;
    g.N = int(std::lround((rmax - rmin) / dx)) + 1;
    g.cfl = cfl;
    g.t_end = t_end;
    return g;
}

Observer Observer::fixed_radius(double r, int stride) {
    return Observer{ObserverKind::FixedRadius, r, stride, fmt("r=%g", r, 0, 0)};
}
Observer Observer::radiation_field(double v_far, int stride) {
    return Observer{ObserverKind::RadiationField, v_far, stride, fmt("v_far=%g", v_far, 0, 0)};
}
Observer Observer::ray(double ratio, int stride) {
    return Observer{ObserverKind::Ray, ratio, stride, fmt("t*/r=%g", ratio, 0, 0)};
}

// ---------------------------------------------------------------- sources

double ModeSource::radial_at(RadialPoint p) const {
    if (f_.is_zero()) return 0.0;
    double f = profile_at(f_.fr, spec_, p);
    if (f == 0.0) return 0.0;
    double lapse = spec_.schwarzschild() ? p.y / p.r : 1.0;
    return lapse * p.r * f;
}

double ModeSource::radial(double rstar) const {
    if (f_.is_zero()) return 0.0;
    if (spec_.schwarzschild()) {
        double y = inverse_tortoise_offset(rstar, spec_.mass);
        return radial_at(RadialPoint{2.0 * spec_.mass + y, y});
    }
    return radial_at(RadialPoint{rstar, rstar});
}

double ModeSource::rstar_lo() const {
    if (f_.is_zero()) return std::numeric_limits<double>::infinity();
    double lo, hi;
    profile_support_r(f_.fr, spec_, lo, hi);
    return spec_.schwarzschild() ? (lo > 2.0 * spec_.mass ? tortoise(lo, spec_) : -std::numeric_limits<double>::infinity())
                                 : lo;
}

double ModeSource::rstar_hi() const {
    if (f_.is_zero()) return -std::numeric_limits<double>::infinity();
    double lo, hi;
    profile_support_r(f_.fr, spec_, lo, hi);
    return std::isfinite(hi) ? tortoise(hi, spec_) : hi;
}

ModeSource reduce_to_mode(const BackgroundSpec& spec, Mode mode, const ForcingSpec& f) {
    spec.validate();
    if (mode.l < 0) throw DomainError("reduce_to_mode: l must be non-negative");
    return ModeSource(spec, f);
}

// ---------------------------------------------------------------- leapfrog

EvolutionResult evolve_leapfrog(const CauchyGrid& grid, const CauchyData& data, const EffectivePotential& potential,
                                const ModeSource& source, const std::vector<Observer>& observers,
                                const LeapfrogOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();
    const BackgroundSpec& spec = potential.spec();
    const int N = grid.N;
    if (N < 8) throw DomainError("evolve_leapfrog: need at least 8 grid points");
    if (!(grid.cfl > 0.0 && grid.cfl <= 1.0)) throw DomainError("evolve_leapfrog: CFL number must lie in (0, 1]");
    if (!(grid.t_end > 0.0)) throw DomainError("evolve_leapfrog: t_end must be positive");
    const bool flat = !spec.schwarzschild();
    if (flat && grid.rstar_min != 0.0) throw DomainError("evolve_leapfrog: flat grids start at r = 0");
    const double h = grid.h(), dt = grid.dt(), lam2 = grid.cfl * grid.cfl, dt2 = dt * dt;

    // Grid geometry, potential and source tables.
    std::vector<RadialPoint> pts(N);
    {
        double guess = std::numeric_limits<double>::quiet_NaN();
        for (int j = 0; j < N; ++j) {
            double x = grid.rstar_min + j * h;
            if (flat) {
                pts[j] = {x, x};
            } else {
                double y = inverse_tortoise_offset(x, spec.mass, guess);
                guess = std::log(y);
                pts[j] = {2.0 * spec.mass + y, y};
            }
        }
    }
    // Fields are carried in extended precision: late-time tails sit ~1e-12
    // below the data and double rounding noise reaches that level.
    using real = long double;
    std::vector<real> coef(N), src(N, 0.0);
    for (int j = 0; j < N; ++j) {
        double V = (flat && j == 0) ? 0.0 : effective_potential(spec, potential.mode(), pts[j]);
        coef[j] = 2 - 2 * real(lam2) - real(dt2) * V;
    }
    int slo = N, shi = -1;
    if (!source.is_zero()) {
        for (int j = 1; j < N - 1; ++j) {
            src[j] = dt2 * source.radial_at(pts[j]);
            if (src[j] != 0.0) {
                slo = std::min(slo, j);
                shi = std::max(shi, j);
            }
        }
    }

    // Initial data.
    std::vector<real> prev(N, 0.0), cur(N, 0.0), pi(N, 0.0);
    int alo = N, ahi = -1;
    for (int j = 1; j < N - 1; ++j) {
        double r = pts[j].r;
        prev[j] = r * profile_at(data.phi0, spec, pts[j]);
        pi[j] = r * profile_at(data.phi1, spec, pts[j]);
        if (prev[j] != 0.0 || pi[j] != 0.0) {
            alo = std::min(alo, j);
            ahi = std::max(ahi, j);
        }
    }
    if (alo == N && slo == N) throw DomainError("evolve_leapfrog: data and source vanish identically");
    const int lo_idx = std::min(alo, slo), hi_idx = std::max(ahi, shi);
    if (lo_idx <= 2 || hi_idx >= N - 3) throw DomainError("evolve_leapfrog: data/source support touches the grid edge");
    const double x_a = grid.rstar_min + lo_idx * h, x_b = grid.rstar_min + hi_idx * h;

    // Observers and causal guards.
    struct Obs {
        double x, r;
        int stride;
    };
    std::vector<Obs> obs;
    EvolutionResult res;
    res.scheme = "leapfrog";
    for (const auto& o : observers) {
        if (o.kind != ObserverKind::FixedRadius)
            throw DomainError("evolve_leapfrog: only fixed-radius observers are supported");
        if (o.stride < 1) throw DomainError("evolve_leapfrog: observer stride must be >= 1");
        double x = tortoise(o.value, spec);
        if (x < grid.rstar_min + 2 * h || x > grid.rstar_max - 2 * h)
            throw DomainError("evolve_leapfrog: observer outside the grid");
        if (!grid.sommerfeld_right) {
            double guard = std::min(grid.rstar_max - x, grid.cfl * (2.0 * grid.rstar_max - x_b - x));
            if (!(grid.t_end < guard))
                throw DomainError(fmt("evolve_leapfrog: causal guard violated on the right (t_end %g >= %g at r = %g)",
                                      grid.t_end, guard, o.value));
        }
        if (!flat && !grid.sommerfeld_left) {
            double guard = std::min(x - grid.rstar_min, grid.cfl * (x + x_a - 2.0 * grid.rstar_min));
            if (!(grid.t_end < guard))
                throw DomainError(fmt("evolve_leapfrog: causal guard violated on the left (t_end %g >= %g at r = %g)",
                                      grid.t_end, guard, o.value));
        }
        obs.push_back({x, o.value, o.stride});
        TimeSeries s;
        s.parameter = "t*";
        s.label = o.label;
        res.series.push_back(std::move(s));
    }

    auto record = [&](long n, const std::vector<real>& f) {
        double t = n * dt;
        for (std::size_t k = 0; k < obs.size(); ++k) {
            if (n % obs[k].stride) continue;
            double val;
            if (!interp_row(f, grid.rstar_min, h, obs[k].x, val))
                throw DomainError("evolve_leapfrog: observer too close to the boundary");
            val /= obs[k].r;
            if (!std::isfinite(val))
                throw ComputeError(fmt("evolve_leapfrog: non-finite field at t = %g, r = %g%s", t, obs[k].r, 0));
            res.series[k].push(t - obs[k].x, val);
        }
    };

    res.energy.parameter = "t";
    res.energy.label = "energy";
    auto energy = [&](long n, const std::vector<real>& older, const std::vector<real>& now,
                      const std::vector<real>& newer) {
        double e = 0.0;
        for (int j = 0; j + 1 < N; ++j) {
            double pt = double(newer[j] - older[j]) / (2.0 * dt);
            double px = double(now[j + 1] - now[j]) / h;
            double V = double((2 - 2 * real(lam2) - coef[j]) / real(dt2));
            double v = double(now[j]);
            e += (pt * pt + px * px + V * v * v) * h;
        }
        res.energy.push(n * dt, e);
    };

    // First step: second-order Taylor expansion.
    for (int j = 1; j < N - 1; ++j) {
        real d2 = prev[j + 1] - 2 * prev[j] + prev[j - 1];
        real V = (2 - 2 * real(lam2) - coef[j]) / real(dt2);
        cur[j] = prev[j] + real(dt) * pi[j] +
                 (real(lam2) * d2 - real(dt2) * V * prev[j] + real(source.temporal(0.0)) * src[j]) / 2;
    }
    alo = std::max(1, lo_idx - 1);
    ahi = std::min(N - 2, hi_idx + 1);
    record(0, prev);
    record(1, cur);

    const long nsteps = long(std::ceil(grid.t_end / dt - 1e-9));
    std::vector<real> scratch;
    long long updates = 0;
    for (long n = 1; n < nsteps; ++n) {
        const double t = n * dt;
        const real chi = source.is_zero() ? 0.0 : source.temporal(t);
        const real l2 = lam2;
        alo = std::max(1, alo - 1);
        ahi = std::min(N - 2, ahi + 1);
        if (chi != 0.0) {
            alo = std::min(alo, slo);
            ahi = std::max(ahi, shi);
        }
        const bool want_energy = opt.energy_stride > 0 && (n % opt.energy_stride == 0);
        if (want_energy) scratch = prev;

        real* __restrict p = prev.data();
        const real* __restrict c = cur.data();
        const real* __restrict cf = coef.data();
        if (chi != 0) {
            const real* __restrict sr = src.data();
            for (int j = alo; j <= ahi; ++j) p[j] = cf[j] * c[j] + l2 * (c[j + 1] + c[j - 1]) - p[j] + chi * sr[j];
        } else {
            for (int j = alo; j <= ahi; ++j) p[j] = cf[j] * c[j] + l2 * (c[j + 1] + c[j - 1]) - p[j];
        }
        updates += ahi - alo + 1;
        // Outgoing conditions psi_t = +-psi_{r*}: carry the boundary value
        // along the characteristic, psi(x_0, t + dt) = psi(x_0 + dt, t).
        if (grid.sommerfeld_left && alo == 1) p[0] = edge_transport(c, 1, grid.cfl);
        if (grid.sommerfeld_right && ahi == N - 2) p[N - 1] = edge_transport(c + N - 1, -1, grid.cfl);
        if (want_energy) energy(n, scratch, cur, prev);
        std::swap(prev, cur);
        record(n + 1, cur);
        if ((n & 1023) == 0 && !std::isfinite(cur[(alo + ahi) / 2]))
            throw ComputeError(fmt("evolve_leapfrog: non-finite field at t = %g%s%s", t, 0, 0));
    }
    for (real v : cur)
        if (!std::isfinite(v)) throw ComputeError("evolve_leapfrog: non-finite field at the final time");

    res.steps = nsteps;
    res.point_updates = updates;
    char buf[200];
    std::snprintf(buf, sizeof buf, "rstar=[%g,%g] N=%d dx=%.17g cfl=%g t_end=%g left=%s right=%s", grid.rstar_min,
                  grid.rstar_max, N, h, grid.cfl, grid.t_end,
                  flat ? "dirichlet" : (grid.sommerfeld_left ? "sommerfeld" : "excision"),
                  grid.sommerfeld_right ? "sommerfeld" : "excision");
    res.grid = buf;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

// ---------------------------------------------------------------- double null

namespace {

struct NullTables {
    std::vector<double> Vh;   // (h^2/8) V at r*_c, indexed by k + Nu
    std::vector<double> Sh;   // (h^2/4) s at r*_c, indexed by k + Nu
    std::vector<double> chi;  // chi at t_c, indexed by i + j - 1
    bool sourced = false;
};

NullTables null_tables(const NullGrid& g, const EffectivePotential& potential, const ModeSource& source) {
    const BackgroundSpec& spec = potential.spec();
    NullTables T;
    const int K = g.Nu + g.Nv + 1;
    T.Vh.resize(K);
    T.Sh.assign(K, 0.0);
    T.sourced = !source.is_zero();
    double guess = std::numeric_limits<double>::quiet_NaN();
    for (int k = -g.Nu; k <= g.Nv; ++k) {
        double x = 0.5 * (g.v0 - g.u0) + 0.5 * k * g.h;
        RadialPoint p;
        if (spec.schwarzschild()) {
            double y = inverse_tortoise_offset(x, spec.mass, guess);
            guess = std::log(y);
            p = {2.0 * spec.mass + y, y};
        } else {
            if (x <= 0.0) throw DomainError("evolve_double_null: flat domain must stay in r > 0");
            p = {x, x};
        }
        T.Vh[k + g.Nu] = g.h * g.h / 8.0 * effective_potential(spec, potential.mode(), p);
        if (T.sourced) T.Sh[k + g.Nu] = g.h * g.h / 4.0 * source.radial_at(p);
    }
    if (T.sourced) {
        T.chi.resize(g.Nu + g.Nv + 1);
        for (int m = 0; m <= g.Nu + g.Nv; ++m) T.chi[m] = source.temporal(0.5 * (g.u0 + g.v0) + 0.5 * m * g.h);
    }
    return T;
}

void check_null_grid(const NullGrid& g) {
    if (!(g.h > 0.0) || g.Nu < 1 || g.Nv < 4) throw DomainError("evolve_double_null: bad grid");
}

// Runs the diamond scheme row by row, calling row_cb(i, row) after each u-row.
template <class RowCb>
void run_diamond(const NullGrid& g, const NullData& data, const NullTables& T, int rows, RowCb row_cb) {
    const int Nv = g.Nv;
    std::vector<double> prev(Nv + 1), cur(Nv + 1);
    for (int j = 0; j <= Nv; ++j) prev[j] = data.on_u0 ? data.on_u0(g.v0 + j * g.h) : 0.0;
    row_cb(0, prev);
    for (int i = 1; i <= rows; ++i) {
        cur[0] = data.on_v0 ? data.on_v0(g.u0 + i * g.h) : 0.0;
        const double* Vh = T.Vh.data() + g.Nu - i;  // Vh[j] is the entry for k = j - i
        if (T.sourced) {
            const double* Sh = T.Sh.data() + g.Nu - i;
            const double* ch = T.chi.data() + i - 1;
            for (int j = 1; j <= Nv; ++j) {
                double E = prev[j], W = cur[j - 1], S = prev[j - 1];
                cur[j] = E + W - S - Vh[j] * (E + W) + ch[j] * Sh[j];
            }
        } else {
            for (int j = 1; j <= Nv; ++j) {
                double E = prev[j], W = cur[j - 1], S = prev[j - 1];
                cur[j] = E + W - S - Vh[j] * (E + W);
            }
        }
        if (!std::isfinite(cur[Nv]) || ((i & 255) == 0 && !std::isfinite(cur[Nv / 2])))
            throw ComputeError(fmt("evolve_double_null: non-finite field at u = %g%s%s", g.u0 + i * g.h, 0, 0));
        row_cb(i, cur);
        std::swap(prev, cur);
    }
}

}  // namespace

EvolutionResult evolve_double_null(const NullGrid& g, const NullData& data, const EffectivePotential& potential,
                                   const ModeSource& source, const std::vector<Observer>& observers) {
    const auto t_start = std::chrono::steady_clock::now();
    check_null_grid(g);
    const BackgroundSpec& spec = potential.spec();
    NullTables T = null_tables(g, potential, source);

    EvolutionResult res;
    res.scheme = "double-null";
    struct Obs {
        ObserverKind kind;
        double value;
        int stride;
        int jfar;
    };
    std::vector<Obs> obs;
    for (const auto& o : observers) {
        if (o.stride < 1) throw DomainError("evolve_double_null: observer stride must be >= 1");
        Obs b{o.kind, o.value, o.stride, 0};
        TimeSeries s;
        s.label = o.label;
        s.parameter = o.kind == ObserverKind::RadiationField ? "u" : "t*";
        if (o.kind == ObserverKind::RadiationField) {
            b.jfar = int(std::lround((o.value - g.v0) / g.h));
            if (b.jfar < 0 || b.jfar > g.Nv) throw DomainError("evolve_double_null: v_far outside the grid");
        } else if (o.kind == ObserverKind::Ray) {
            if (!(o.value > 0.0)) throw DomainError("evolve_double_null: ray ratio must be positive");
        } else if (spec.schwarzschild() && !(o.value > 2.0 * spec.mass)) {
            throw DomainError("evolve_double_null: observer inside r = 2m");
        }
        obs.push_back(b);
        res.series.push_back(std::move(s));
    }
    const double rmin_ray = spec.schwarzschild() ? 2.0 * spec.mass : 0.0;

    run_diamond(g, data, T, g.Nu, [&](int i, const std::vector<double>& row) {
        const double u = g.u0 + i * g.h;
        for (std::size_t k = 0; k < obs.size(); ++k) {
            const Obs& o = obs[k];
            if (i % o.stride) continue;
            if (o.kind == ObserverKind::RadiationField) {
                res.series[k].push(u, row[o.jfar]);
                continue;
            }
            double r = o.kind == ObserverKind::Ray ? u / o.value : o.value;
            if (!(r > rmin_ray) || (o.kind == ObserverKind::Ray && u <= 0.0)) continue;
            double v = u + 2.0 * tortoise(r, spec), val;
            if (!interp_row(row, g.v0, g.h, v, val)) continue;
            res.series[k].push(u, val / r);
        }
    });
    res.steps = g.Nu;
    res.point_updates = (long long)g.Nu * g.Nv;
    char buf[200];
    std::snprintf(buf, sizeof buf, "u0=%g v0=%g h=%.17g Nu=%d Nv=%d", g.u0, g.v0, g.h, g.Nu, g.Nv);
    res.grid = buf;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

double double_null_point(const NullGrid& g0, const NullData& data, const EffectivePotential& potential,
                         const ModeSource& source, double u, double v) {
    check_null_grid(g0);
    int i = int(std::lround((u - g0.u0) / g0.h)), j = int(std::lround((v - g0.v0) / g0.h));
    if (std::abs(g0.u0 + i * g0.h - u) > 1e-9 * g0.h || std::abs(g0.v0 + j * g0.h - v) > 1e-9 * g0.h)
        throw DomainError("double_null_point: (u, v) is not a grid node");
    if (i < 0 || i > g0.Nu || j < 0 || j > g0.Nv) throw DomainError("double_null_point: node outside the grid");
    NullGrid g = g0;
    g.Nv = std::max(j, 4);
    NullTables T = null_tables(g, potential, source);
    double out = 0.0;
    run_diamond(g, data, T, i, [&](int ii, const std::vector<double>& row) {
        if (ii == i) out = row[j];
    });
    return out;
}

// ---------------------------------------------------------------- constants

namespace {

// int phi(r) w(r) r^2 dr over the profile support, written in the
// profile's own coordinate.  `lapse_power` selects the factor (1 - 2m/r)^p
// in the r-measure: -1 for Cauchy data, 0 for forcing.
template <class W>
double radial_pairing(const BackgroundSpec& spec, const RadialProfile& p, int lapse_power, W weight, bool adaptive,
                      int panels) {
    if (p.is_zero()) return 0.0;
    const double m = spec.schwarzschild() ? spec.mass : 0.0;
    double lo = p.support_lo(), hi = p.support_hi();
    std::function<double(double)> integrand;
    if (p.coord == ProfileCoord::Rstar && spec.schwarzschild()) {
        // dr = (1 - 2m/r) dr*
        integrand = [&, lapse_power](double x) {
            double y = inverse_tortoise_offset(x, m), r = 2.0 * m + y, f = y / r;
            return p(x) * weight(r) * r * r * std::pow(f, lapse_power + 1);
        };
    } else {
        if (spec.schwarzschild() && !(lo > 2.0 * m))
            throw DomainError("predicted_constant: data must be supported outside r = 2m");
        lo = std::max(lo, 0.0);
        integrand = [&, lapse_power](double r) {
            double f = spec.schwarzschild() ? (r - 2.0 * m) / r : 1.0;
            return p(r) * weight(r) * r * r * std::pow(f, lapse_power);
        };
    }
    if (!adaptive) {
        if (!std::isfinite(hi)) throw DomainError("predicted_constant: fixed-order rule needs compact support");
        return quad::gauss_panels(integrand, lo, hi, panels);
    }
    std::vector<double> breaks;
    if (p.kind != ProfileKind::PowerLaw) breaks.push_back(p.center);
    return quad::adaptive(integrand, lo, hi, 1e-14, breaks);
}

}  // namespace

PredictedConstant predicted_constant(const BackgroundSpec& spec, const CauchyData& data, double r_obs) {
    spec.validate();
    PredictedConstant out;
    const double meff = effective_mass(spec);
    if (spec.schwarzschild()) {
        out.c = -8.0 * meff * radial_pairing(spec, data.phi1, -1, [](double) { return 1.0; }, true, 0);
        out.profile = 1.0;
    } else {
        ExtendedState st = solve_extended_state(spec);
        out.c = meff == 0.0 ? 0.0
                            : -8.0 * meff * radial_pairing(spec, data.phi1, 0, [&](double r) { return st.u0_dual(r); },
                                                           true, 0);
        out.profile = st.u0(r_obs);
    }
    out.at_observer = out.c * out.profile;
    return out;
}

PredictedConstant predicted_constant(const BackgroundSpec& spec, const ForcingSpec& forcing, double r_obs) {
    spec.validate();
    PredictedConstant out;
    const double meff = effective_mass(spec);
    const double chi_int = forcing.chi.integral();
    if (spec.schwarzschild()) {
        out.c = -8.0 * meff * chi_int * radial_pairing(spec, forcing.fr, 0, [](double) { return 1.0; }, true, 0);
    } else {
        ExtendedState st = solve_extended_state(spec);
        out.c = meff == 0.0 ? 0.0
                            : -8.0 * meff * chi_int *
                                  radial_pairing(spec, forcing.fr, 0, [&](double r) { return st.u0_dual(r); }, true, 0);
        out.profile = st.u0(r_obs);
    }
    out.at_observer = out.c * out.profile;
    return out;
}

double predicted_constant_fixed_order(const BackgroundSpec& spec, const CauchyData& data, int panels) {
    if (!spec.schwarzschild()) throw DomainError("predicted_constant_fixed_order: Schwarzschild only");
    return -8.0 * spec.mass * radial_pairing(spec, data.phi1, -1, [](double) { return 1.0; }, false, panels);
}

}  // namespace latetail
