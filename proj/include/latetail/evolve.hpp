#pragma once

// Time-domain evolution of the mode field psi = r phi in (t, r*):
//   psi_tt - psi_{r*r*} + V_l psi = S
// by a double-null diamond scheme and by a leapfrog Cauchy scheme.

#include <functional>
#include <string>
#include <vector>

#include "latetail/background.hpp"
#include "latetail/profiles.hpp"
#include "latetail/tails.hpp"

namespace latetail {

struct CauchyGrid {
    double rstar_min = -200.0;
    double rstar_max = 4200.0;
    int N = 88001;  // spatial points including both ends
    double cfl = 0.5;
    double t_end = 2000.0;
    bool sommerfeld_left = false;
    bool sommerfeld_right = false;

    double h() const { return (rstar_max - rstar_min) / (N - 1); }
    double dt() const { return cfl * h(); }
    static CauchyGrid with_spacing(double rmin, double rmax, double dx, double cfl, double t_end);
};

struct NullGrid {
    double u0 = 0.0;
    double v0 = 0.0;
    double h = 0.1;
    int Nu = 0;
    int Nv = 0;
};

struct CauchyData {
    RadialProfile phi0;
    RadialProfile phi1;
};

struct ForcingSpec {
    TemporalProfile chi;
    RadialProfile fr;
    bool is_zero() const { return fr.is_zero() || chi.amplitude == 0.0; }
};

// Source of the 1+1 equation, S(t, r*) = chi(t) s(r*) with
// s = (1 - 2m/r) r f(r).
class ModeSource {
public:
    ModeSource() = default;
    ModeSource(BackgroundSpec spec, ForcingSpec f) : spec_(std::move(spec)), f_(std::move(f)) {}
    double radial(double rstar) const;
    double radial_at(RadialPoint p) const;
    double temporal(double t) const { return f_.chi(t); }
    double operator()(double t, double rstar) const { return temporal(t) * radial(rstar); }
    bool is_zero() const { return f_.is_zero(); }
    // Support of s in r* and of chi in t.
    double rstar_lo() const;
    double rstar_hi() const;
    double t_lo() const { return f_.chi.support_lo(); }
    double t_hi() const { return f_.chi.support_hi(); }
    const ForcingSpec& forcing() const { return f_; }

private:
    BackgroundSpec spec_;
    ForcingSpec f_;
};

ModeSource reduce_to_mode(const BackgroundSpec& spec, Mode mode, const ForcingSpec& f);

enum class ObserverKind { FixedRadius, RadiationField, Ray };

struct Observer {
    ObserverKind kind = ObserverKind::FixedRadius;
    double value = 10.0;  // r_obs, v_far or t*/r
    int stride = 1;       // record every stride-th step / row
    std::string label;

    static Observer fixed_radius(double r, int stride = 1);
    static Observer radiation_field(double v_far, int stride = 1);
    static Observer ray(double ratio, int stride = 1);
};

struct EvolutionResult {
    std::vector<TimeSeries> series;  // one per observer, same order
    std::string scheme;
    std::string grid;
    long long steps = 0;
    long long point_updates = 0;
    double wall_seconds = 0.0;
    TimeSeries energy;  // leapfrog only, when requested
};

struct LeapfrogOptions {
    int energy_stride = 0;  // 0 disables the energy record
};

EvolutionResult evolve_leapfrog(const CauchyGrid& grid, const CauchyData& data, const EffectivePotential& potential,
                                const ModeSource& source, const std::vector<Observer>& observers,
                                const LeapfrogOptions& opt = {});

// Characteristic data: psi on u = u0 as a function of v and on v = v0 as a
// function of u.  Either may be empty (zero data).
struct NullData {
    std::function<double(double)> on_u0;
    std::function<double(double)> on_v0;
};

EvolutionResult evolve_double_null(const NullGrid& grid, const NullData& data, const EffectivePotential& potential,
                                   const ModeSource& source, const std::vector<Observer>& observers);

// Value of psi at a single grid node (i, j) of a double-null run; used for
// convergence checks.
double double_null_point(const NullGrid& grid, const NullData& data, const EffectivePotential& potential,
                         const ModeSource& source, double u, double v);

struct PredictedConstant {
    double c = 0.0;           // coefficient of t*^-3 in phi at u_(0) = 1
    double profile = 1.0;     // u_(0)(r_obs)
    double at_observer = 0.0; // c * profile
};

// l = 0 tail constants from data or forcing.
PredictedConstant predicted_constant(const BackgroundSpec& spec, const CauchyData& data, double r_obs);
PredictedConstant predicted_constant(const BackgroundSpec& spec, const ForcingSpec& forcing, double r_obs);

// Same radial integrals with fixed-order composite Gauss rules (independent
// check of the adaptive quadrature).
double predicted_constant_fixed_order(const BackgroundSpec& spec, const CauchyData& data, int panels);

}  // namespace latetail
