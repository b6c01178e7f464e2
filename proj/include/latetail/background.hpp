#pragma once

// Backgrounds, the tortoise chart, per-mode effective potentials and the
// zero-energy states u_(0).

#include <functional>
#include <memory>
#include <vector>

#include "latetail/profiles.hpp"

namespace latetail {

enum class BackgroundKind { Schwarzschild, FlatPotential };
enum class PotentialProfile { None, InverseCubic, InverseQuartic, Custom };

struct PotentialTable;  // interpolant for Custom profiles

struct PotentialSpec {
    PotentialProfile profile = PotentialProfile::None;
    double amplitude = 0.0;
    int decay_order = 3;  // 3 or 4; fixed for the analytic profiles
    std::vector<double> table_r;
    std::vector<double> table_v;

    static PotentialSpec none();
    static PotentialSpec inverse_cubic(double v0);
    static PotentialSpec inverse_quartic(double v0);
    // Tabulated samples, interpolated by modified Akima cubics and continued
    // beyond the last sample as V_last (r_last/r)^order.
    static PotentialSpec custom(std::vector<double> r, std::vector<double> v, int decay_order);

    double operator()(double r) const;
    // Coefficient of r^-3 at infinity (zero unless the decay order is 3).
    double inverse_cubic_coefficient() const;
    // u_j in V(r) = sum_{j>=3} u_j r^-j, for j = 0..jmax (entries below 3 are 0).
    std::vector<double> asymptotic_coefficients(int jmax) const;
    bool vanishes() const;
    void validate() const;

    std::shared_ptr<const PotentialTable> table;
};

struct BackgroundSpec {
    BackgroundKind kind = BackgroundKind::Schwarzschild;
    double mass = 1.0;
    PotentialSpec potential;
    double kerr_a = 0.0;

    static BackgroundSpec schwarzschild(double m);
    static BackgroundSpec flat(PotentialSpec v);

    bool schwarzschild() const { return kind == BackgroundKind::Schwarzschild; }
    double horizon() const { return schwarzschild() ? 2.0 * mass : 0.0; }
    void validate() const;
};

struct Mode {
    int l = 0;
    double L() const { return double(l) * double(l + 1); }
};

// r* = r + 2m ln(r - 2m) on Schwarzschild, r* = r on flat backgrounds.
double tortoise(double r, const BackgroundSpec& spec);
// Same map written in y = r - 2m, which keeps full precision near the horizon.
double tortoise_from_offset(double y, double m);
double inverse_tortoise(double x, const BackgroundSpec& spec);
// Returns y = r - 2m with r*(2m + y) = x.  `log_guess` (ln y) warm-starts the
// Newton iteration when it is finite.
double inverse_tortoise_offset(double x, double m, double log_guess);
double inverse_tortoise_offset(double x, double m);

// A point of the exterior carried with both r and y = r - r_h.
struct RadialPoint {
    double r;
    double y;
};

class RadialChart {
public:
    RadialChart(const BackgroundSpec& spec, double rstar_min, double rstar_max);
    RadialPoint at_rstar(double x) const;
    double r_of(double x) const { return at_rstar(x).r; }
    double rstar_of(double r) const;
    double rstar_min() const { return rs_min_; }
    double rstar_max() const { return rs_max_; }
    const BackgroundSpec& spec() const { return spec_; }

private:
    BackgroundSpec spec_;
    double rs_min_, rs_max_;
};

double effective_potential(const BackgroundSpec& spec, Mode mode, double r);
double effective_potential(const BackgroundSpec& spec, Mode mode, RadialPoint p);

class EffectivePotential {
public:
    EffectivePotential(BackgroundSpec spec, Mode mode) : spec_(std::move(spec)), mode_(mode) {}
    double operator()(double rstar) const;
    std::vector<double> table(const std::vector<double>& rstar) const;
    const BackgroundSpec& spec() const { return spec_; }
    Mode mode() const { return mode_; }

private:
    BackgroundSpec spec_;
    Mode mode_;
};

struct ExtendedStateData;

// Zero-energy state u_(0) with u_(0) -> 1, and its dual.  For radial real
// potentials u*_(0) = u_(0).  psi = r u_(0) solves psi'' = V psi up to the
// normalisation psi'(infinity) = 1.
class ExtendedState {
public:
    double u0(double r) const;
    double u0_dual(double r) const { return u0(r); }
    double psi(double r) const;  // r u_(0)(r)
    double weight(double r) const { return r * r; }
    double slope() const;        // A = lim psi_raw'(r) with psi_raw'(0) = 1
    double residual() const;     // sup |psi'' - V psi| on the uniform table
    bool trivial() const;        // u_(0) == 1 identically
    double table_end() const;
    double table_step() const;
    // Uniform-table samples of psi and psi' (normalised), used by the
    // static-kernel check.
    const std::vector<double>& nodes() const;
    const std::vector<double>& psi_nodes() const;
    const std::vector<double>& dpsi_nodes() const;

    std::shared_ptr<const ExtendedStateData> data;
};

struct ExtendedStateOptions {
    double table_end = 200.0;
    double table_step = 1.0 / 64.0;
    double far_radius = 1.0e6;
    double rtol = 1.0e-13;
    double min_slope = 1.0e-8;
};

ExtendedState solve_extended_state(const BackgroundSpec& spec, const ExtendedStateOptions& opt = {});

double effective_mass(const BackgroundSpec& spec);

// sup |-psi'' + V_l psi| over the reference grid for the static solution of
// the mode.  h == 0 uses exact second derivatives; h > 0 uses the three-point
// stencil of the leapfrog evolver with spacing h (in r*).
double static_kernel_residual(const BackgroundSpec& spec, Mode mode, double h = 0.0);

// Radial profile evaluated at radius r, whichever coordinate it is written in.
double profile_at_r(const RadialProfile& p, const BackgroundSpec& spec, double r);
double profile_at(const RadialProfile& p, const BackgroundSpec& spec, RadialPoint pt);
// Support of a profile in r.
void profile_support_r(const RadialProfile& p, const BackgroundSpec& spec, double& lo, double& hi);

// Kerr tail constant for data phi0, phi1 given in Boyer-Lindquist (r, theta,
// phi) and supported in r in [r_lo, r_hi].
struct KerrData {
    std::function<double(double, double, double)> phi0;
    std::function<double(double, double, double)> phi1;
    double r_lo = 0.0;
    double r_hi = 0.0;
};

struct KerrQuadrature {
    int radial_panels = 16;
    int theta_panels = 4;
    int phi_points = 32;
};

double kerr_tail_constant(const KerrData& data, double m, double a, const KerrQuadrature& q = {});

}  // namespace latetail
