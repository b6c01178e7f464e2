#pragma once

// Frequency-domain side: the stationary resolvent at small real sigma,
// zero-energy solves and the low-energy expansion, the model solution on
// the resolved front face, sigma-series fits and the inverse Fourier
// identities behind the t*^-3 profile.
//
// Conventions.  Time dependence e^{-i sigma t}; for psi = r phi the radial
// equation is  -psi'' + (V_l - sigma^2) psi = s  with ' = d/dx, where x = r*
// on Schwarzschild and x = r on flat backgrounds, and s = (dr/dx) r f.
// resolvent_apply reports u in the outgoing frame t* = t - x, where a
// stationary f has t-frame source e^{i sigma x} s and u = e^{-i sigma x} psi / r.

#include <complex>
#include <vector>

#include "latetail/background.hpp"
#include "latetail/profiles.hpp"

namespace latetail {

using cplx = std::complex<double>;

struct SpectralOptions {
    double sigma_rout = 50.0;    // R_out = max(sigma_rout / sigma, r_out_min)
    double r_out_min = 200.0;
    int series_order = 6;        // K in the outgoing series at R_out
    double left_rstar = -70.0;   // Schwarzschild start of psi_left, in units of m
    double rtol = 1e-13;
    double wronskian_tol = 1e-8;
};

struct SigmaGrid {
    std::vector<double> values;
    std::vector<double> r_out;

    static SigmaGrid log_spaced(double lo, double hi, int n, const SpectralOptions& opt = {});
    void validate() const;
};

// psi_left: e^{-i sigma r*} at the horizon, or r^{l+1} (1 + O(r^2)) at r = 0.
// psi_right: e^{i sigma r*} (1 + sum_{k<=K} a_k r^-k) at R_out.
struct HomogeneousSolutions {
    double sigma = 0.0;
    double r_out = 0.0;
    std::vector<double> x;
    std::vector<cplx> psi_left, dpsi_left, psi_right, dpsi_right;
    cplx wronskian;          // psi_L psi_R' - psi_L' psi_R at x[0]
    double wronskian_drift;  // max relative deviation over x
    double series_error;     // |psi_R(K) - psi_R(K - 1)| / |psi_R| at R_out
};

// Coefficients a_0..a_K of the outgoing series (a_0 = 1).
std::vector<cplx> outgoing_series(const BackgroundSpec& spec, Mode mode, double sigma, int order);

HomogeneousSolutions homogeneous_solutions(const BackgroundSpec& spec, Mode mode, double sigma,
                                           const std::vector<double>& x, const SpectralOptions& opt = {});

struct ResolventSample {
    double sigma = 0.0;
    double r_obs = 0.0;
    cplx u_obs;             // phi = psi / r at r_obs
    cplx wronskian;
    double wronskian_drift = 0.0;
    int series_order = 0;
    double series_error = 0.0;  // |u(K) - u(K - 1)|
    double residual = 0.0;      // relative five-point residual of the radial equation
};

ResolventSample resolvent_apply(const BackgroundSpec& spec, Mode mode, double sigma, const RadialProfile& f,
                                double r_obs, const SpectralOptions& opt = {});

std::vector<ResolventSample> resolvent_sweep(const BackgroundSpec& spec, Mode mode, const SigmaGrid& grid,
                                             const RadialProfile& f, double r_obs, int jobs = 1,
                                             const SpectralOptions& opt = {});

// Solution of box(0) u = f for l = 0 and no potential, on a logarithmic grid
// in r - r_h.  c0 = int f r^2 dr, by quadrature and from a fit of r u at
// large r.  `subleading` is the fitted (r u - c0) r divided by m c0 (1 on
// Schwarzschild).
struct ZeroEnergySolution {
    std::vector<double> r;
    std::vector<double> u;
    double c0 = 0.0;
    double c0_fit = 0.0;
    double subleading = 0.0;
};

ZeroEnergySolution zero_energy_solve(const BackgroundSpec& spec, Mode mode, const RadialProfile& f);

// Low-energy iteration: u0, f1 = 2i (u0' + u0/r), u1 = box(0)^-1 f1, f2
// likewise, with the constants c0, c_X = 4 m c0 and c_M = -2 c_X.
struct ExpansionState {
    std::vector<double> r;
    std::vector<double> u0;
    std::vector<cplx> f1, u1, f2;
    double mass = 0.0;
    double c0 = 0.0, c0_fit = 0.0, cX = 0.0, cM = 0.0;
    double log_lead = 0.0;  // B / (-2 i m c0) from u1 r = A + B ln r

    // f2 r^2 / (4 m c0) at radius r (linear interpolation in ln r).
    double f2_ratio(double r) const;
};

ExpansionState expansion_iterate(const BackgroundSpec& spec, const RadialProfile& f);

enum class ModelMethod { Quadrature, Ode };

// u~(r^) solving the model equation with right-hand side r^-2.
struct ModelSolution {
    ModelMethod method = ModelMethod::Quadrature;
    std::vector<double> rhat;
    std::vector<cplx> u;
};

ModelSolution model_solution(ModelMethod method, const std::vector<double>& rhat);

// (2 gamma + log 4 - i pi) / 4 + int_0^inf e^{-2t} log(r^ + i t) dt, computed
// without cancellation.  r^ u~ = i * bracket.
cplx model_bracket(double rhat);

// Model operator R u = -(1/r^) (d + 2i) d (r^ u) applied to u~ by five-point
// central differences with step h; returns sup |r^2 (R u~) - 1| over `rhat`.
double model_operator_residual(const std::vector<double>& rhat, double h);

// Re int_0^inf 2(t + iv) / ((2t + iv)^2 (t - i)) dt; v = 0 is the v -> 0+ limit.
double profile_integral(double v);

struct FourierWindow {
    double flat = 0.05;   // w = 1 for |sigma| <= flat
    double cut = 0.5;     // w = 0 for |sigma| >= cut
    double kappa = 21.0;
    int power = 64;
    double operator()(double sigma) const;
};

// Re (2 pi)^-1 int e^{-i sigma t} sigma^k log(sigma + i0) w(sigma) dsigma.
std::vector<double> inverse_ft_log(int k, const std::vector<double>& t, const FourierWindow& w = {});

struct SigmaFit {
    cplx a0, a1, a2, b, a3, b3;
    double residual = 0.0;   // rms over the samples
    double condition = 0.0;  // of the column-scaled design matrix
    cplx b_drop2;            // b refitted without the two largest sigma
    bool stable = false;     // |b_drop2 - b| <= 0.05 |b|
};

struct SigmaValue {
    double sigma;
    cplx u;
};

SigmaFit fit_sigma_series(const std::vector<SigmaValue>& samples, double max_condition = 1e12);
SigmaFit fit_sigma_series(const std::vector<ResolventSample>& samples, double max_condition = 1e12);

}  // namespace latetail
