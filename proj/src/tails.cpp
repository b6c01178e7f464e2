#include "latetail/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latetail/errors.hpp"

namespace latetail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Line {
    double a = 0.0, b = 0.0, rms = 0.0;
};

// Least squares y = a + b z.
Line fit_line(const std::vector<double>& z, const std::vector<double>& y) {
    const std::size_t n = z.size();
    if (n < 3) throw ComputeError("tail fit: fewer than three samples in the window");
    double zm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        zm += z[i];
        ym += y[i];
    }
    zm /= n;
    ym /= n;
    double szz = 0.0, szy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        szz += (z[i] - zm) * (z[i] - zm);
        szy += (z[i] - zm) * (y[i] - ym);
    }
    Line L;
    L.b = szz > 0.0 ? szy / szz : 0.0;
    L.a = ym - L.b * zm;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - L.a - L.b * z[i];
        ss += r * r;
    }
    L.rms = std::sqrt(ss / n);
    return L;
}

// Fit y = a + b / x on [lo, hi].  The uncertainty of a is the spread over the
// two halves (split at the geometric midpoint) plus the rms residual, which
// bounds what the two-term form leaves unmodelled.
struct WindowFit {
    Line full;
    double spread = 0.0;
};

WindowFit fit_inverse_x(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
    std::vector<double> z, w, z1, w1, z2, w2;
    const double mid = std::sqrt(lo * hi);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        z.push_back(1.0 / x[i]);
        w.push_back(y[i]);
        if (x[i] <= mid) {
            z1.push_back(1.0 / x[i]);
            w1.push_back(y[i]);
        }
        if (x[i] >= mid) {
            z2.push_back(1.0 / x[i]);
            w2.push_back(y[i]);
        }
    }
    WindowFit F;
    F.full = fit_line(z, w);
    double a1 = fit_line(z1, w1).a, a2 = fit_line(z2, w2).a;
    F.spread = std::max(std::abs(a1 - F.full.a), std::abs(a2 - F.full.a)) + F.full.rms;
    return F;
}

double auto_window_lo(const TimeSeries& s) {
    double xz = last_sign_change(s);
    if (std::isfinite(xz) && xz > 0.0) return 3.0 * xz;
    for (double x : s.x)
        if (x > 0.0) return x;
    throw DomainError("tail fit: series has no samples at x > 0");
}

}  // namespace

void TimeSeries::validate() const {
    if (x.size() != v.size()) throw DomainError("TimeSeries: x and value lengths differ");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(v[i])) throw DomainError("TimeSeries: non-finite sample");
        if (i && !(x[i] > x[i - 1])) throw DomainError("TimeSeries: x must increase strictly");
    }
}

TimeSeries TimeSeries::window(double lo, double hi) const {
    TimeSeries out;
    out.parameter = parameter;
    out.label = label;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo && x[i] <= hi) out.push(x[i], v[i]);
    return out;
}

double last_sign_change(const TimeSeries& s) {
    for (std::size_t i = s.size(); i-- > 1;) {
        double a = s.v[i - 1], b = s.v[i];
        if (a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)) {
            if (b == 0.0) return s.x[i];
            if (a == 0.0) return s.x[i - 1];
            return s.x[i - 1] + (s.x[i] - s.x[i - 1]) * a / (a - b);
        }
    }
    return kNaN;
}

TimeSeries local_power_index(const TimeSeries& s) {
    s.validate();
    std::vector<double> lx, lv;
    std::vector<double> xs;
    int sign = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.x[i] <= 0.0) continue;
        double v = s.v[i];
        int sg = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign))
            throw ComputeError("local_power_index: zero crossing at x = " + std::to_string(s.x[i]));
        sign = sg;
        xs.push_back(s.x[i]);
        lx.push_back(std::log(s.x[i]));
        lv.push_back(std::log(std::abs(v)));
    }
    const std::size_t n = xs.size();
    if (n < 2) throw DomainError("local_power_index: need at least two samples at x > 0");
    TimeSeries p;
    p.parameter = s.parameter;
    p.label = s.label.empty() ? "lpi" : s.label + " lpi";
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
        p.push(xs[i], -(lv[b] - lv[a]) / (lx[b] - lx[a]));
    }
    return p;
}

TailReport tail_fit(const TimeSeries& s, const TailFitOptions& opt) {
    s.validate();
    TailReport rep;
    double lo = opt.window_lo > 0.0 ? opt.window_lo : auto_window_lo(s);
    double xz = last_sign_change(s);
    if (std::isfinite(xz) && lo <= xz) lo = xz * (1.0 + 1e-12) + 1e-300;
    double hi = opt.window_hi > 0.0 ? std::min(opt.window_hi, s.x.back()) : s.x.back();
    if (!(hi >= lo * std::sqrt(10.0)))
        throw DomainError("tail_fit: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is shorter than half a decade");
    rep.window_lo = lo;
    rep.window_hi = hi;
    TimeSeries w = s.window(lo, hi);
    rep.lpi = local_power_index(w);

    WindowFit pf = fit_inverse_x(rep.lpi.x, rep.lpi.v, lo, hi);
    rep.p_inf = pf.full.a;
    rep.beta = pf.full.b;
    rep.dp = pf.spread;

    rep.target_exponent = opt.target_exponent ? *opt.target_exponent : std::round(rep.p_inf);
    rep.exponent_match = std::abs(rep.p_inf - rep.target_exponent) <= opt.exponent_tolerance;
    rep.predicted_coeff = opt.predicted_coeff;
    rep.c_hat = rep.dc = rep.d = kNaN;
    rep.ratio = kNaN;
    if (!rep.exponent_match) return rep;

    std::vector<double> y(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) y[i] = w.v[i] * std::pow(w.x[i], rep.target_exponent);
    WindowFit cf = fit_inverse_x(w.x, y, lo, hi);
    rep.c_hat = cf.full.a;
    rep.d = cf.full.b;
    rep.dc = cf.spread;
    if (!(cf.full.rms <= opt.max_relative_residual * std::abs(rep.c_hat)))
        throw ComputeError("tail_fit: coefficient fit residual too large");
    rep.has_coefficient = true;
    if (opt.predicted_coeff) {
        rep.ratio = rep.c_hat / *opt.predicted_coeff;
        rep.within_tolerance = std::abs(rep.ratio - 1.0) <= opt.coeff_tolerance;
    }
    return rep;
}

double u_plus(double v) { return v * (v + 1.0) / ((v + 2.0) * (v + 2.0)); }

std::vector<RayProfileRow> ray_profile_check(const std::vector<RaySeries>& rays, double c_M, double window_lo,
                                             double window_hi) {
    if (c_M == 0.0) throw DomainError("ray_profile_check: c_M = 0 (degenerate data)");
    std::vector<RayProfileRow> out;
    for (const auto& ray : rays) {
        const TimeSeries& s = ray.series;
        s.validate();
        if (!(ray.ratio > 0.0)) throw DomainError("ray_profile_check: ratio must be positive");
        double lo = window_lo > 0.0 ? window_lo : auto_window_lo(s);
        double hi = window_hi > 0.0 ? std::min(window_hi, s.x.back()) : s.x.back();
        if (!(hi > lo)) throw DomainError("ray_profile_check: empty window");
        std::vector<double> y(s.size());
        const double up = u_plus(ray.ratio);
        for (std::size_t i = 0; i < s.size(); ++i) y[i] = s.v[i] * std::pow(s.x[i], 3) / (c_M * up);
        WindowFit f = fit_inverse_x(s.x, y, lo, hi);
        out.push_back({ray.ratio, f.full.a, f.spread, lo, hi});
    }
    return out;
}

double richardson_order(const TimeSeries& coarse, const TimeSeries& medium, const TimeSeries& fine) {
    std::vector<double> orders;
    double scale = 0.0;
    for (double v : fine.v) scale = std::max(scale, std::abs(v));
    const double noise = 1e-14 * std::max(scale, 1e-300);
    std::size_t jm = 0, jf = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        double x = coarse.x[i], tol = 1e-9 * std::max(1.0, std::abs(x));
        while (jm < medium.size() && medium.x[jm] < x - tol) ++jm;
        while (jf < fine.size() && fine.x[jf] < x - tol) ++jf;
        if (jm >= medium.size() || jf >= fine.size()) break;
        if (std::abs(medium.x[jm] - x) > tol || std::abs(fine.x[jf] - x) > tol) continue;
        double a = std::abs(coarse.v[i] - medium.v[jm]), b = std::abs(medium.v[jm] - fine.v[jf]);
        if (a > noise && b > noise) orders.push_back(std::log2(a / b));
    }
    if (orders.empty()) throw ComputeError("richardson_order: differences below noise (identical series?)");
    std::nth_element(orders.begin(), orders.begin() + orders.size() / 2, orders.end());
    return orders[orders.size() / 2];
}

}  // namespace latetail
