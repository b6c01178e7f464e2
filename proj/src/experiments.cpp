#include "latetail/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "latetail/acceptance.hpp"
#include "latetail/errors.hpp"
#include "latetail/evolve.hpp"
#include "latetail/spectral.hpp"
#include "latetail/tails.hpp"

namespace latetail {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void stamp(CsvTable& t, const Config& c, const std::string& scheme, const std::string& grid) {
    t.note("config_hash", c.hash());
    t.note("scheme", scheme);
    t.note("grid", grid);
}

std::string fmtg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- evolve

struct EvolveRun {
    BackgroundSpec spec;
    Mode mode;
    CauchyData data;
    ForcingSpec forcing;
    std::vector<Observer> observers;
    EvolutionResult result;
    std::string grid;
};

bool generic_data(const EvolveRun& e) { return !e.data.phi1.is_zero() || !e.forcing.is_zero(); }

EvolveRun evolve_from(const Config& c) {
    EvolveRun e;
    e.spec = background_from(c);
    e.mode = mode_from(c);
    e.data = cauchy_data_from(c);
    e.forcing = forcing_from(c);
    const ModeSource source = reduce_to_mode(e.spec, e.mode, e.forcing);
    const EffectivePotential V(e.spec, e.mode);
    const std::string scheme = c.str("grid", "scheme", "leapfrog");
    const auto radii = c.reals("observers", "radii", {});
    const auto rays = c.reals("observers", "rays", {});

    if (scheme == "leapfrog") {
        if (!rays.empty() || c.has("observers", "radiation_v"))
            throw ConfigError("[observers] rays and radiation_v need scheme = double-null");
        if (c.has("data", "ingoing")) throw ConfigError("[data] ingoing needs scheme = double-null");
        const double dx = c.real("grid", "dx", 0.1);
        if (!(dx > 0.0)) throw ConfigError("[grid] dx must be positive");
        CauchyGrid g = CauchyGrid::with_spacing(c.real("grid", "rstar_min", e.spec.schwarzschild() ? -2000.0 : 0.0),
                                                c.real("grid", "rstar_max", 2100.0), dx, c.real("grid", "cfl", 0.5),
                                                c.real("grid", "t_end", 2000.0));
        g.sommerfeld_left = c.boolean("grid", "sommerfeld_left", false);
        g.sommerfeld_right = c.boolean("grid", "sommerfeld_right", false);
        const int stride = std::max(1, int(std::lround(c.real("observers", "sample_dt", 0.5) / g.dt())));
        for (double r : radii.empty() ? std::vector<double>{10.0, 20.0} : radii)
            e.observers.push_back(Observer::fixed_radius(r, stride));
        LeapfrogOptions opt;
        opt.energy_stride = c.integer("observers", "energy_stride", 0);
        e.result = evolve_leapfrog(g, e.data, V, source, e.observers, opt);
    } else {
        if (!e.data.phi0.is_zero() || !e.data.phi1.is_zero())
            throw ConfigError("[data] phi0/phi1 are Cauchy data; the double-null scheme takes [data] ingoing");
        NullGrid g;
        g.u0 = c.real("grid", "u0", -50.0);
        g.v0 = c.real("grid", "v0", -50.0);
        g.h = c.real("grid", "h", 0.1);
        if (!(g.h > 0.0)) throw ConfigError("[grid] h must be positive");
        const double u_max = c.real("grid", "u_max", 1500.0), v_max = c.real("grid", "v_max", 20000.0);
        g.Nu = int(std::lround((u_max - g.u0) / g.h));
        g.Nv = int(std::lround((v_max - g.v0) / g.h));
        const int stride = std::max(1, int(std::lround(c.real("observers", "sample_dt", 1.0) / g.h)));
        for (double r : radii) e.observers.push_back(Observer::fixed_radius(r, stride));
        if (c.has("observers", "radiation_v") || (radii.empty() && rays.empty()))
            e.observers.push_back(Observer::radiation_field(c.real("observers", "radiation_v", v_max), stride));
        for (double v : rays) e.observers.push_back(Observer::ray(v, stride));
        NullData nd;
        const RadialProfile in = profile_from(c, "data", "ingoing");
        if (!in.is_zero()) nd.on_u0 = [in](double v) { return in(v); };
        e.result = evolve_double_null(g, nd, V, source, e.observers);
    }
    e.grid = e.result.grid;
    return e;
}

// Predicted t*^-3 coefficient of phi at u_(0) = 1 for l = 0 (0 if none).
double tail_constant(const BackgroundSpec& spec, Mode mode, const CauchyData& data, const ForcingSpec& forcing) {
    if (mode.l != 0) return 0.0;
    double c = 0.0;
    if (!data.phi0.is_zero() || !data.phi1.is_zero()) c += predicted_constant(spec, data, 10.0).c;
    if (!forcing.is_zero()) c += predicted_constant(spec, forcing, 10.0).c;
    return c;
}

double u0_at(const BackgroundSpec& spec, double r) { return solve_extended_state(spec).u0(r); }

TailFitOptions tail_options(const Config& c) {
    TailFitOptions o;
    o.window_lo = c.real("tail", "window_lo", 0.0);
    o.window_hi = c.real("tail", "window_hi", 0.0);
    o.exponent_tolerance = c.real("tail", "exponent_tolerance", o.exponent_tolerance);
    o.coeff_tolerance = c.real("tail", "coeff_tolerance", o.coeff_tolerance);
    if (c.has("tail", "target_exponent")) o.target_exponent = c.real("tail", "target_exponent", 0.0);
    return o;
}

// "auto" (use `automatic` when nonzero), "none", or a number.
std::optional<double> predicted_option(const Config& c, double automatic) {
    const std::string p = c.str("tail", "predicted", "auto");
    if (p == "none") return std::nullopt;
    if (p == "auto") return automatic != 0.0 ? std::optional<double>(automatic) : std::nullopt;
    char* end = nullptr;
    double v = std::strtod(p.c_str(), &end);
    if (!end || *end || !std::isfinite(v)) throw ConfigError("[tail] predicted must be auto, none or a number");
    return v;
}

CsvTable tail_header() {
    CsvTable t;
    t.header = {"observer", "target_exponent", "p_inf", "dp",     "c_hat",           "dc",
                "predicted", "ratio",          "window_lo", "window_hi", "within_tolerance", "status"};
    return t;
}

void tail_row(CsvTable& t, const std::string& label, const TimeSeries& s, TailFitOptions o, Summary* sum) {
    try {
        TailReport r = tail_fit(s, o);
        t.add_row({label, r.target_exponent, r.p_inf, r.dp, r.c_hat, r.dc,
                   r.predicted_coeff ? CsvCell(*r.predicted_coeff) : CsvCell(std::string()),
                   r.has_coefficient && r.predicted_coeff ? CsvCell(r.ratio) : CsvCell(std::string()), r.window_lo,
                   r.window_hi, std::string(r.within_tolerance ? "yes" : "no"),
                   std::string(r.exponent_match ? "ok" : "exponent mismatch")});
        if (sum && sum->empty()) {
            sum->emplace_back("p_inf", r.p_inf);
            sum->emplace_back("dp", r.dp);
            sum->emplace_back("c_hat", r.c_hat);
            if (r.predicted_coeff && r.has_coefficient) sum->emplace_back("ratio", r.ratio);
        }
    } catch (const Error& e) {
        t.add_row({label, o.target_exponent.value_or(kNaN), kNaN, kNaN, kNaN, kNaN, std::string(), std::string(),
                   kNaN, kNaN, std::string("no"), std::string(e.what())});
    }
}

CsvTable series_table(const std::vector<TimeSeries>& series) {
    CsvTable t;
    t.header = {"observer", "x", "value"};
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.size(); ++i) t.add_row({s.label, s.x[i], s.v[i]});
    return t;
}

std::vector<TimeSeries> series_from_table(const CsvTable& t, const std::string& column) {
    const std::size_t ix = t.column("x"), iv = t.column(column);
    std::size_t io = std::string::npos;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == "observer") io = i;
    std::vector<TimeSeries> out;
    std::map<std::string, std::size_t> index;
    for (const auto& row : t.rows) {
        std::string label = io == std::string::npos ? column : std::get<std::string>(row[io]);
        auto it = index.find(label);
        if (it == index.end()) {
            it = index.emplace(label, out.size()).first;
            out.emplace_back();
            out.back().label = label;
        }
        const double* x = std::get_if<double>(&row[ix]);
        const double* v = std::get_if<double>(&row[iv]);
        if (!x || !v) throw ConfigError("input table has non-numeric x/" + column + " cells");
        out[it->second].push(*x, *v);
    }
    return out;
}

RunResult run_evolve(const Config& c) {
    EvolveRun e = evolve_from(c);
    RunResult out;
    const double cM = tail_constant(e.spec, e.mode, e.data, e.forcing);
    const int base = (generic_data(e) ? 3 : 4) + 2 * e.mode.l;

    CsvTable tail = tail_header();
    for (std::size_t k = 0; k < e.observers.size(); ++k) {
        const Observer& o = e.observers[k];
        TailFitOptions opt = tail_options(c);
        double automatic = 0.0;
        switch (o.kind) {
            case ObserverKind::FixedRadius:
                if (!opt.target_exponent) opt.target_exponent = base;
                if (cM != 0.0) automatic = cM * u0_at(e.spec, o.value);
                break;
            case ObserverKind::RadiationField:
                if (!opt.target_exponent) opt.target_exponent = base - 1;
                automatic = cM / 4.0;
                break;
            case ObserverKind::Ray:
                if (!opt.target_exponent) opt.target_exponent = base;
                automatic = cM * u_plus(o.value);
                break;
        }
        opt.predicted_coeff = predicted_option(c, automatic);
        tail_row(tail, o.label, e.result.series[k], opt, &out.summary);
    }
    CsvTable series = series_table(e.result.series);
    stamp(series, c, e.result.scheme, e.grid);
    stamp(tail, c, e.result.scheme, e.grid);
    out.artifacts.emplace_back("series", std::move(series));
    out.artifacts.emplace_back("tail", std::move(tail));
    if (!e.result.energy.x.empty()) {
        CsvTable en;
        en.header = {"t", "energy"};
        for (std::size_t i = 0; i < e.result.energy.size(); ++i) en.add_row({e.result.energy.x[i], e.result.energy.v[i]});
        stamp(en, c, e.result.scheme, e.grid);
        out.artifacts.emplace_back("energy", std::move(en));
    }
    if (cM != 0.0) out.summary.emplace_back("c_predicted", cM);
    out.line = "evolve " + e.result.scheme + " l=" + std::to_string(e.mode.l) + ": " + std::to_string(e.observers.size()) +
               " observers";
    for (const auto& [k, v] : out.summary)
        if (k == "p_inf" || k == "ratio") out.line += ", " + k + " " + fmtg(std::get<double>(v));
    return out;
}

// ---------------------------------------------------------------- spectral

SpectralOptions spectral_options(const Config& c) {
    SpectralOptions o;
    o.sigma_rout = c.real("spectral", "sigma_rout", o.sigma_rout);
    o.r_out_min = c.real("spectral", "r_out_min", o.r_out_min);
    o.series_order = c.integer("spectral", "series_order", o.series_order);
    o.rtol = c.real("spectral", "rtol", o.rtol);
    return o;
}

RunResult run_spectral(const Config& c, int jobs) {
    const BackgroundSpec spec = background_from(c);
    const Mode mode = mode_from(c);
    const RadialProfile f = profile_from(c, "forcing", "f");
    const SpectralOptions opt = spectral_options(c);
    const double lo = c.real("spectral", "sigma_min", 1e-3), hi = c.real("spectral", "sigma_max", 5e-2);
    const int n = c.integer("spectral", "n_sigma", 24);
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("[spectral] need 0 < sigma_min < sigma_max and n_sigma >= 2");
    const double r_obs = c.real("spectral", "r_obs", 10.0);
    const SigmaGrid grid = SigmaGrid::log_spaced(lo, hi, n, opt);
    const auto samples = resolvent_sweep(spec, mode, grid, f, r_obs, jobs, opt);

    const std::string gdesc = "sigma log-spaced [" + format_real(lo) + ", " + format_real(hi) + "] n=" +
                              std::to_string(n) + " r_obs=" + format_real(r_obs) + " K=" +
                              std::to_string(opt.series_order);
    RunResult out;
    CsvTable t;
    t.header = {"sigma", "r_out", "re_u", "im_u", "re_wronskian", "im_wronskian", "wronskian_drift",
                "series_error", "residual"};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        t.add_row({s.sigma, grid.r_out[i], s.u_obs.real(), s.u_obs.imag(), s.wronskian.real(), s.wronskian.imag(),
                   s.wronskian_drift, s.series_error, s.residual});
    }
    stamp(t, c, "variation of parameters", gdesc);
    out.artifacts.emplace_back("samples", std::move(t));

    CsvTable ft;
    ft.header = {"coefficient", "re", "im"};
    try {
        const SigmaFit fit = fit_sigma_series(samples);
        for (auto [name, v] : std::vector<std::pair<std::string, cplx>>{{"a0", fit.a0},
                                                                        {"a1", fit.a1},
                                                                        {"a2", fit.a2},
                                                                        {"b", fit.b},
                                                                        {"a3", fit.a3},
                                                                        {"b3", fit.b3},
                                                                        {"b_drop2", fit.b_drop2}})
            ft.add_row({name, v.real(), v.imag()});
        ft.add_row({std::string("residual"), fit.residual, 0.0});
        ft.add_row({std::string("condition"), fit.condition, 0.0});
        ft.add_row({std::string("stable"), fit.stable ? 1.0 : 0.0, 0.0});
        out.summary = {{"re_b", fit.b.real()}, {"im_a2", fit.a2.imag()}, {"stable", fit.stable ? 1.0 : 0.0}};
        out.line = "spectral: b = " + fmtg(fit.b.real()) + (fit.b.imag() < 0 ? " - " : " + ") +
                   fmtg(std::abs(fit.b.imag())) + "i, Im a2 / (-pi/2 Re b) = " +
                   fmtg(fit.a2.imag() / (-M_PI / 2 * fit.b.real()));
        if (spec.schwarzschild() && mode.l == 0 && !f.is_zero()) {
            const double bp = -4.0 * spec.mass * zero_energy_solve(spec, mode, f).c0;
            ft.add_row({std::string("b_predicted"), bp, 0.0});
            out.summary.emplace_back("b_ratio", fit.b.real() / bp);
            out.line += ", Re b / predicted = " + fmtg(fit.b.real() / bp);
        }
    } catch (const ComputeError& e) {
        if (n >= 12) throw;
        out.line = std::string("spectral: no fit (") + e.what() + ")";
    }
    stamp(ft, c, "variation of parameters", gdesc);
    out.artifacts.emplace_back("fit", std::move(ft));
    return out;
}

// ---------------------------------------------------------------- model

RunResult run_model(const Config& c) {
    const double lo = c.real("model", "rhat_min", 1e-3), hi = c.real("model", "rhat_max", 1e2);
    const int n = c.integer("model", "n", 201);
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("[model] need 0 < rhat_min < rhat_max and n >= 2");
    const std::string method = c.str("model", "method", "both");
    std::vector<double> rh(n);
    for (int i = 0; i < n; ++i) rh[i] = lo * std::pow(hi / lo, double(i) / (n - 1));

    RunResult out;
    CsvTable t;
    t.header = {"rhat", "re_u", "im_u"};
    ModelSolution q = model_solution(method == "ode" ? ModelMethod::Ode : ModelMethod::Quadrature, rh);
    std::optional<ModelSolution> d;
    if (method == "both") {
        d = model_solution(ModelMethod::Ode, rh);
        t.header.insert(t.header.end(), {"re_u_ode", "im_u_ode"});
    }
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<CsvCell> row{rh[i], q.u[i].real(), q.u[i].imag()};
        if (d) {
            row.insert(row.end(), {d->u[i].real(), d->u[i].imag()});
            if (rh[i] >= 0.1 && rh[i] <= 10.0) sup = std::max(sup, std::abs(q.u[i] - d->u[i]));
        }
        t.add_row(std::move(row));
    }
    stamp(t, c, method, "rhat log-spaced [" + format_real(lo) + ", " + format_real(hi) + "] n=" + std::to_string(n));
    out.artifacts.emplace_back("model", std::move(t));
    out.line = "model: " + std::to_string(n) + " points";
    if (d) {
        out.summary.emplace_back("sup_diff", sup);
        out.line += ", quadrature vs ode sup on [0.1, 10] = " + fmtg(sup);
    }
    return out;
}

// ---------------------------------------------------------------- expansion

RunResult run_expansion(const Config& c) {
    const BackgroundSpec spec = background_from(c);
    if (!spec.schwarzschild()) throw ConfigError("expansion needs [background] kind = schwarzschild");
    if (mode_from(c).l != 0) throw ConfigError("expansion is l = 0 only");
    const RadialProfile f = profile_from(c, "forcing", "f");
    const ExpansionState E = expansion_iterate(spec, f);

    ForcingSpec unit;
    unit.fr = f;
    unit.chi = TemporalProfile{1.0 / TemporalProfile{1.0, 0.0, 1.0}.integral(), 0.0, 1.0};
    const double pc = f.is_zero() ? 0.0 : predicted_constant(spec, unit, 10.0).c;

    const std::string gdesc = "log(r - 2m) grid, " + std::to_string(E.r.size()) + " nodes";
    RunResult out;
    CsvTable t;
    t.header = {"r", "u0", "re_f1", "im_f1", "re_u1", "im_u1", "re_f2", "im_f2"};
    for (std::size_t i = 0; i < E.r.size(); ++i)
        t.add_row({E.r[i], E.u0[i], E.f1[i].real(), E.f1[i].imag(), E.u1[i].real(), E.u1[i].imag(), E.f2[i].real(),
                   E.f2[i].imag()});
    stamp(t, c, "low-energy iteration", gdesc);
    CsvTable k;
    k.header = {"name", "value"};
    const double ratio = E.c0 != 0.0 ? E.f2_ratio(1e3 * spec.mass) : kNaN;
    for (auto [name, v] : std::vector<std::pair<std::string, double>>{{"c0", E.c0},
                                                                     {"c0_fit", E.c0_fit},
                                                                     {"cX", E.cX},
                                                                     {"cM", E.cM},
                                                                     {"cM_time_domain", pc},
                                                                     {"log_lead", E.log_lead},
                                                                     {"f2_ratio_r1000m", ratio}}) {
        k.add_row({name, v});
        out.summary.emplace_back(name, v);
    }
    if (E.c0 != 0.0)
        for (double r : c.reals("expansion", "sample_radii", {})) k.add_row({"f2_ratio_r" + fmtg(r), E.f2_ratio(r)});
    stamp(k, c, "low-energy iteration", gdesc);
    out.artifacts.emplace_back("expansion", std::move(t));
    out.artifacts.emplace_back("constants", std::move(k));
    out.line = "expansion: c0 = " + fmtg(E.c0) + ", c_M = " + fmtg(E.cM) + ", f2 ratio at r = 1000m: " + fmtg(ratio) +
               ", log lead " + fmtg(E.log_lead);
    return out;
}

// ---------------------------------------------------------------- fit-tail / ray-profile

CsvTable read_input(const Config& c) {
    const std::string path = c.resolve_path(c.required("tail", "input"));
    try {
        return CsvTable::read(path);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

RunResult run_fit_tail(const Config& c) {
    const CsvTable in = read_input(c);
    const auto series = series_from_table(in, c.str("tail", "column", "value"));
    RunResult out;
    CsvTable tail = tail_header();
    CsvTable lpi;
    lpi.header = {"observer", "x", "p"};
    for (const auto& s : series) {
        TailFitOptions o = tail_options(c);
        if (!o.target_exponent) o.target_exponent = 3.0;
        o.predicted_coeff = predicted_option(c, 0.0);
        tail_row(tail, s.label, s, o, &out.summary);
        try {
            TimeSeries w = s;
            if (o.window_lo > 0.0 || o.window_hi > 0.0) w = s.window(o.window_lo, o.window_hi > 0.0 ? o.window_hi : s.x.back());
            const TimeSeries p = local_power_index(w);
            for (std::size_t i = 0; i < p.size(); ++i) lpi.add_row({s.label, p.x[i], p.v[i]});
        } catch (const Error&) {
        }
    }
    const std::string scheme = in.footer_value("scheme"), grid = in.footer_value("grid");
    stamp(tail, c, scheme, grid);
    stamp(lpi, c, scheme, grid);
    tail.note("input_hash", in.footer_value("config_hash"));
    out.artifacts.emplace_back("tail", std::move(tail));
    out.artifacts.emplace_back("lpi", std::move(lpi));
    out.line = "fit-tail: " + std::to_string(series.size()) + " series";
    for (const auto& [k, v] : out.summary)
        if (k == "p_inf" || k == "ratio") out.line += ", " + k + " " + fmtg(std::get<double>(v));
    return out;
}

RunResult run_ray_profile(const Config& c) {
    std::vector<TimeSeries> series;
    std::string scheme, grid;
    double cM = 0.0;
    if (c.has("tail", "input")) {
        const CsvTable in = read_input(c);
        series = series_from_table(in, "value");
        scheme = in.footer_value("scheme");
        grid = in.footer_value("grid");
    } else {
        if (c.str("grid", "scheme", "double-null") != "double-null")
            throw ConfigError("ray-profile runs the double-null scheme");
        Config d = c;
        d.set("grid", "scheme", "double-null");
        if (!d.has("observers", "rays")) d.set("observers", "rays", "0.5, 1, 2");
        EvolveRun e = evolve_from(d);
        series = e.result.series;
        scheme = e.result.scheme;
        grid = e.grid;
        cM = tail_constant(e.spec, e.mode, e.data, e.forcing);
    }
    if (c.has("tail", "c_M")) cM = c.real("tail", "c_M", 0.0);
    if (cM == 0.0) throw ConfigError("ray-profile needs [tail] c_M or l = 0 data/forcing with a nonzero constant");
    std::vector<RaySeries> rays;
    for (const auto& s : series)
        if (s.label.rfind("t*/r=", 0) == 0) rays.push_back({std::strtod(s.label.c_str() + 5, nullptr), s});
    if (rays.empty()) throw ConfigError("ray-profile: no ray observers (labels t*/r=...) in the input");
    const auto rows = ray_profile_check(rays, cM, c.real("tail", "window_lo", 0.0), c.real("tail", "window_hi", 0.0));
    RunResult out;
    CsvTable t;
    t.header = {"ratio", "u_plus", "R", "error", "window_lo", "window_hi"};
    out.line = "ray-profile: c_M = " + fmtg(cM);
    for (const auto& r : rows) {
        t.add_row({r.ratio, u_plus(r.ratio), r.R, r.error, r.window_lo, r.window_hi});
        out.summary.emplace_back("R(" + fmtg(r.ratio) + ")", r.R);
        out.line += ", R(" + fmtg(r.ratio) + ") = " + fmtg(r.R);
    }
    t.note("c_M", format_real(cM));
    stamp(t, c, scheme, grid);
    out.artifacts.emplace_back("rays", std::move(t));
    return out;
}

// ---------------------------------------------------------------- kerr-constant

RunResult run_kerr(const Config& c) {
    const BackgroundSpec spec = background_from(c);
    if (!spec.schwarzschild()) throw ConfigError("kerr-constant needs [background] kind = schwarzschild (mass)");
    const double a = c.real("kerr", "a", spec.kerr_a);
    if (!(std::abs(a) < spec.mass)) throw ConfigError("[kerr] need |a| < mass");
    const CauchyData data = cauchy_data_from(c);
    const double k1 = c.real("kerr", "phi1_cos2", 0.0), k0 = c.real("kerr", "phi0_azimuthal", 0.0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const RadialProfile* p : {&data.phi0, &data.phi1}) {
        if (p->is_zero()) continue;
        if (!p->compact()) throw ConfigError("kerr-constant needs compactly supported data");
        double l, h;
        profile_support_r(*p, spec, l, h);
        lo = std::min(lo, l);
        hi = std::max(hi, h);
    }
    if (!(hi > lo)) throw ConfigError("kerr-constant: data is zero");
    const BackgroundSpec sch = spec;
    KerrData K;
    K.phi1 = [p = data.phi1, sch, k1](double r, double th, double) {
        const double ct = std::cos(th);
        return profile_at_r(p, sch, r) * (1.0 + k1 * ct * ct);
    };
    K.phi0 = [p = data.phi0, sch, k0](double r, double th, double ph) {
        return profile_at_r(p, sch, r) * (1.0 + k0 * std::sin(th) * std::cos(ph));
    };
    K.r_lo = lo;
    K.r_hi = hi;
    KerrQuadrature q;
    q.radial_panels = c.integer("kerr", "radial_panels", q.radial_panels);
    q.theta_panels = c.integer("kerr", "theta_panels", q.theta_panels);
    q.phi_points = c.integer("kerr", "phi_points", q.phi_points);
    if (q.radial_panels < 1 || q.theta_panels < 1 || q.phi_points < 1)
        throw ConfigError("[kerr] quadrature sizes must be positive");
    KerrQuadrature q2{2 * q.radial_panels, 2 * q.theta_panels, 2 * q.phi_points};
    const double ck = kerr_tail_constant(K, spec.mass, a, q), ck2 = kerr_tail_constant(K, spec.mass, a, q2);
    // Spherical part: cos^2 averages to 1/3 and sin cos(phi) to 0.
    CauchyData sph0{data.phi0, RadialProfile{}}, sph1{RadialProfile{}, data.phi1};
    double cs = 0.0;
    if (!data.phi0.is_zero()) cs += predicted_constant(spec, sph0, 10.0).c;
    if (!data.phi1.is_zero()) cs += (1.0 + k1 / 3.0) * predicted_constant(spec, sph1, 10.0).c;

    RunResult out;
    CsvTable t;
    t.header = {"a", "c", "c_refined", "refinement_change", "c_spherical_quadrature"};
    const double change = std::abs(ck2 - ck) / std::max(std::abs(ck2), 1e-300);
    t.add_row({a, ck, ck2, change, cs});
    char g[96];
    std::snprintf(g, sizeof g, "radial %d theta %d phi %d (refined x2)", q.radial_panels, q.theta_panels, q.phi_points);
    stamp(t, c, "Gauss panels", g);
    out.artifacts.emplace_back("kerr", std::move(t));
    out.summary = {{"c", ck}, {"refinement_change", change}, {"c_spherical", cs}};
    out.line = "kerr-constant a=" + fmtg(a) + ": c = " + fmtg(ck) + " (refinement change " + fmtg(change) +
               "), spherical quadrature " + fmtg(cs);
    return out;
}

// ---------------------------------------------------------------- verify

RunResult run_compare(const Config& c) {
    const std::string pa = c.resolve_path(c.required("verify", "compare_a")),
                      pb = c.resolve_path(c.required("verify", "compare_b"));
    CsvTable A, B;
    try {
        A = CsvTable::read(pa);
        B = CsvTable::read(pb);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const std::string ha = A.footer_value("config_hash"), hb = B.footer_value("config_hash");
    if (ha.empty() || hb.empty()) throw ConfigError("verify: artifact without a config_hash footer");
    if (ha != hb) throw ConfigError("verify: refusing to compare artifacts from different configs (" + ha.substr(0, 12) +
                                    " vs " + hb.substr(0, 12) + ")");
    if (A.header != B.header) throw ConfigError("verify: artifacts have different columns");
    const double tol = c.real("verify", "tolerance", 0.0);
    RunResult out;
    CsvTable t;
    t.header = {"column", "max_abs_diff", "max_rel_diff", "status"};
    bool ok = A.rows.size() == B.rows.size();
    for (std::size_t j = 0; j < A.header.size(); ++j) {
        double da = 0.0, dr = 0.0;
        bool text_ok = true;
        for (std::size_t i = 0; i < std::min(A.rows.size(), B.rows.size()); ++i) {
            const double *x = std::get_if<double>(&A.rows[i][j]), *y = std::get_if<double>(&B.rows[i][j]);
            if (x && y) {
                if (std::isnan(*x) && std::isnan(*y)) continue;
                const double d = std::abs(*x - *y);
                da = std::max(da, d);
                dr = std::max(dr, d / std::max({std::abs(*x), std::abs(*y), 1e-300}));
            } else if (A.rows[i][j] != B.rows[i][j]) {
                text_ok = false;
            }
        }
        const bool pass = text_ok && !(dr > tol);
        ok = ok && pass;
        t.add_row({A.header[j], da, dr, std::string(pass ? "PASS" : "FAIL")});
        out.report.push_back(A.header[j] + ": max rel diff " + fmtg(dr) + (pass ? "  PASS" : "  FAIL"));
    }
    if (A.rows.size() != B.rows.size()) out.report.push_back("row counts differ");
    stamp(t, c, "compare", std::to_string(A.rows.size()) + " rows");
    out.artifacts.emplace_back("compare", std::move(t));
    out.criteria_failed = !ok;
    out.summary = {{"match", ok ? 1.0 : 0.0}};
    out.line = std::string("verify: artifacts ") + (ok ? "match" : "differ") + " (hash " + ha.substr(0, 12) + ")";
    return out;
}

RunResult run_verify(const Config& c, int jobs) {
    if (c.has("verify", "compare_a") || c.has("verify", "compare_b")) return run_compare(c);
    std::vector<std::string> ids;
    const std::string list = c.str("verify", "criteria", "");
    std::size_t pos = 0;
    while (pos < list.size()) {
        std::size_t comma = list.find(',', pos);
        std::string id = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        id.erase(0, id.find_first_not_of(' '));
        id.erase(id.find_last_not_of(' ') + 1);
        if (!id.empty()) {
            const auto& all = acceptance_ids();
            if (std::find(all.begin(), all.end(), id) == all.end())
                throw ConfigError("[verify] unknown criterion '" + id + "'");
            ids.push_back(id);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    const auto results = run_acceptance(ids, jobs);
    RunResult out;
    CsvTable t;
    t.header = {"criterion", "status", "detail"};
    int passed = 0;
    for (const auto& r : results) {
        passed += r.pass;
        t.add_row({r.id, std::string(r.pass ? "PASS" : "FAIL"), r.detail});
        out.report.push_back(r.id + (r.id.size() < 3 ? "  " : " ") + (r.pass ? "PASS  " : "FAIL  ") + r.detail);
        out.summary.emplace_back(r.id, r.pass ? 1.0 : 0.0);
    }
    stamp(t, c, "acceptance", "fixed per criterion");
    out.artifacts.emplace_back("acceptance", std::move(t));
    out.criteria_failed = passed != int(results.size());
    out.line = "verify: " + std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed";
    return out;
}

}  // namespace

// ---------------------------------------------------------------- public

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& t : pool) t.join();
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> k{"evolve",      "spectral",      "model", "expansion", "fit-tail",
                                            "ray-profile", "kerr-constant", "verify"};
    return k;
}

RunResult run_experiment(const std::string& kind, const Config& cfg, int jobs) {
    if (!cfg.ranged_key().empty())
        throw ConfigError("ranged parameter " + cfg.ranged_key() + " is only accepted by 'sweep'");
    if (cfg.has("experiment", "kind") && cfg.str("experiment", "kind", "") != kind)
        throw ConfigError("config is for experiment '" + cfg.str("experiment", "kind", "") + "', not '" + kind + "'");
    if (kind == "evolve") return run_evolve(cfg);
    if (kind == "spectral") return run_spectral(cfg, jobs);
    if (kind == "model") return run_model(cfg);
    if (kind == "expansion") return run_expansion(cfg);
    if (kind == "fit-tail") return run_fit_tail(cfg);
    if (kind == "ray-profile") return run_ray_profile(cfg);
    if (kind == "kerr-constant") return run_kerr(cfg);
    if (kind == "verify") return run_verify(cfg, jobs);
    throw ConfigError("unknown experiment '" + kind + "'");
}

SweepResult run_sweep(const Config& cfg, int jobs) {
    if (cfg.ranged_key().empty()) throw ConfigError("sweep needs exactly one ranged parameter, e.g. l = [0, 1, 2]");
    const std::string kind = cfg.required("experiment", "kind");
    const std::vector<Config> inst = cfg.expand();
    const auto values = cfg.ranged_values();
    const int n = int(inst.size());

    SweepResult out;
    out.instances.resize(n);
    std::vector<std::string> errors(n);
    std::vector<int> codes(n, 0);
    parallel_for(n, jobs, [&](int i) {
        try {
            out.instances[i] = run_experiment(kind, inst[i], 1);
            if (out.instances[i].criteria_failed) errors[i] = "criteria failed", codes[i] = 4;
        } catch (const ConfigError& e) {
            errors[i] = e.what();
            codes[i] = 2;
        } catch (const std::exception& e) {
            errors[i] = e.what();
            codes[i] = 3;
        }
    });

    // Columns: ranged value, status, message, then summary keys in first-seen order.
    std::vector<std::string> keys;
    for (const auto& r : out.instances)
        for (const auto& [k, v] : r.summary)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    CsvTable t;
    t.header = {cfg.ranged_key(), "status", "message"};
    t.header.insert(t.header.end(), keys.begin(), keys.end());
    for (int i = 0; i < n; ++i) {
        std::vector<CsvCell> row;
        char* end = nullptr;
        double v = std::strtod(values[i].c_str(), &end);
        row.push_back(end && *end == '\0' ? CsvCell(v) : CsvCell(values[i]));
        row.push_back(std::string(codes[i] == 0 ? "ok" : "failed"));
        row.push_back(codes[i] == 0 ? out.instances[i].line : errors[i]);
        for (const auto& k : keys) {
            CsvCell cell = std::string();
            for (const auto& [kk, vv] : out.instances[i].summary)
                if (kk == k) cell = vv;
            row.push_back(cell);
        }
        t.add_row(std::move(row));
        out.failures += codes[i] != 0;
    }
    stamp(t, cfg, kind, "sweep over " + cfg.ranged_key());
    out.collated.artifacts.emplace_back("sweep", std::move(t));

    // Grid-refinement sweeps also report the observed convergence order.
    if (kind == "evolve" && (cfg.ranged_key() == "grid.dx" || cfg.ranged_key() == "grid.h") && n >= 3 &&
        out.failures == 0) {
        CsvTable conv;
        conv.header = {"observer", "coarse", "medium", "fine", "order"};
        for (int i = 0; i + 2 < n; ++i) {
            auto s0 = series_from_table(out.instances[i].artifacts[0].second, "value");
            auto s1 = series_from_table(out.instances[i + 1].artifacts[0].second, "value");
            auto s2 = series_from_table(out.instances[i + 2].artifacts[0].second, "value");
            for (std::size_t k = 0; k < s0.size() && k < s1.size() && k < s2.size(); ++k) {
                double order = kNaN;
                try {
                    order = richardson_order(s0[k], s1[k], s2[k]);
                } catch (const Error&) {
                }
                conv.add_row({s0[k].label, std::strtod(values[i].c_str(), nullptr),
                              std::strtod(values[i + 1].c_str(), nullptr), std::strtod(values[i + 2].c_str(), nullptr),
                              order});
                out.collated.summary.emplace_back("order " + s0[k].label, order);
            }
        }
        stamp(conv, cfg, kind, "sweep over " + cfg.ranged_key());
        out.collated.artifacts.emplace_back("convergence", std::move(conv));
    }
    out.collated.line = "sweep " + kind + " over " + cfg.ranged_key() + ": " + std::to_string(n - out.failures) + "/" +
                        std::to_string(n) + " ok";
    for (int i = 0; i < n; ++i)
        out.collated.report.push_back("  " + values[i] + ": " + (codes[i] == 0 ? out.instances[i].line : "FAILED " + errors[i]));
    for (const auto& [k, v] : out.collated.summary)
        out.collated.report.push_back("  " + k + " = " + fmtg(std::get<double>(v)));
    return out;
}

void write_artifacts(const RunResult& r, const std::string& dir, const std::string& prefix) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& [stem, table] : r.artifacts) table.write(dir + "/" + prefix + stem + ".csv");
}

}  // namespace latetail
