#pragma once

// Smooth radial and temporal profile families used for initial data and
// forcing terms.

#include <string>

namespace latetail {

enum class ProfileKind { Zero, Gaussian, Bump, PowerLaw };

// Which radial variable the profile is written in.
enum class ProfileCoord { R, Rstar };

// Gaussian:  A exp(-((x - c)/w)^2), cut to zero outside |x - c| > 8w.
// Bump:      A exp(1 - 1/(1 - s^2)), s = (x - c)/w, zero for |s| >= 1.
// PowerLaw:  A x^-p for x > c, zero below (not compactly supported).
struct RadialProfile {
    ProfileKind kind = ProfileKind::Zero;
    ProfileCoord coord = ProfileCoord::R;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
    double power = 5.0;

    double operator()(double x) const;
    bool is_zero() const { return kind == ProfileKind::Zero || amplitude == 0.0; }
    bool compact() const { return kind != ProfileKind::PowerLaw; }
    // Support [lo, hi] in the profile's own coordinate.  hi is +inf for
    // PowerLaw.
    double support_lo() const;
    double support_hi() const;

    static RadialProfile gaussian(double a, double c, double w, ProfileCoord coord = ProfileCoord::R);
    static RadialProfile bump(double a, double c, double w, ProfileCoord coord = ProfileCoord::R);
    static RadialProfile power_law(double a, double start, double p);
};

// Temporal bump chi(t) = A exp(1 - 1/(1 - s^2)), s = (t - c)/w.
struct TemporalProfile {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    double operator()(double t) const;
    double integral() const;  // int chi dt
    double support_lo() const { return center - width; }
    double support_hi() const { return center + width; }
};

ProfileKind parse_profile_kind(const std::string& s);
ProfileCoord parse_profile_coord(const std::string& s);
const char* to_string(ProfileKind k);
const char* to_string(ProfileCoord c);

}  // namespace latetail
