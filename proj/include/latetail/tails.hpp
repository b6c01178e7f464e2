#pragma once

// Post-processing of observer time series: local power index, tail fits,
// ray profiles and Richardson orders.

#include <optional>
#include <string>
#include <vector>

namespace latetail {

struct TimeSeries {
    std::string parameter = "t*";  // name of x
    std::string label;            // observer description
    std::vector<double> x;
    std::vector<double> v;

    std::size_t size() const { return x.size(); }
    void push(double xi, double vi) {
        x.push_back(xi);
        v.push_back(vi);
    }
    void validate() const;
    // Samples with lo <= x <= hi.
    TimeSeries window(double lo, double hi) const;
};

// Largest x at which the series changes sign (NaN if it never does).
double last_sign_change(const TimeSeries& s);

// p(x) = -d ln|v| / d ln x with centred differences in (ln x, ln |v|),
// one-sided at the ends.  Only x > 0 is used.  Throws on a sign change.
TimeSeries local_power_index(const TimeSeries& s);

struct TailFitOptions {
    std::optional<double> target_exponent;
    std::optional<double> predicted_coeff;
    double window_lo = 0.0;  // 0 = automatic (3x the last zero crossing)
    double window_hi = 0.0;  // 0 = end of series
    double exponent_tolerance = 0.15;
    double coeff_tolerance = 0.10;
    double max_relative_residual = 0.05;
};

struct TailReport {
    TimeSeries lpi;
    double p_inf = 0.0, dp = 0.0, beta = 0.0;
    double c_hat = 0.0, dc = 0.0, d = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double target_exponent = 0.0;
    bool exponent_match = true;
    bool has_coefficient = false;
    std::optional<double> predicted_coeff;
    double ratio = 0.0;  // c_hat / predicted
    bool within_tolerance = false;
};

TailReport tail_fit(const TimeSeries& s, const TailFitOptions& opt = {});

// u+(v) = v (v + 1) / (v + 2)^2.
double u_plus(double v);

struct RayProfileRow {
    double ratio = 0.0;  // v = t*/r
    double R = 0.0;      // limit of phi t*^3 / (c_M u+(v))
    double error = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

struct RaySeries {
    double ratio;
    TimeSeries series;  // x = t*, v = phi along r = t*/ratio
};

std::vector<RayProfileRow> ray_profile_check(const std::vector<RaySeries>& rays, double c_M,
                                             double window_lo = 0.0, double window_hi = 0.0);

// Observed order log2(|c - m| / |m - f|), median over matched samples.
double richardson_order(const TimeSeries& coarse, const TimeSeries& medium, const TimeSeries& fine);

}  // namespace latetail
