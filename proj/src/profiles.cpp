#include "latetail/profiles.hpp"

#include <cmath>
#include <limits>

#include "latetail/errors.hpp"

namespace latetail {

namespace {

// int_{-1}^{1} exp(1 - 1/(1 - s^2)) ds
constexpr double kBumpIntegral = 1.2069003224378761753;
constexpr double kGaussCut = 8.0;

double bump_shape(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace

double RadialProfile::operator()(double x) const {
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::Gaussian: {
            double s = (x - center) / width;
            if (std::abs(s) > kGaussCut) return 0.0;
            return amplitude * std::exp(-s * s);
        }
        case ProfileKind::Bump:
            return amplitude * bump_shape((x - center) / width);
        case ProfileKind::PowerLaw:
            return x > center ? amplitude * std::pow(x, -power) : 0.0;
    }
    return 0.0;
}

double RadialProfile::support_lo() const {
    switch (kind) {
        case ProfileKind::Gaussian: return center - kGaussCut * width;
        case ProfileKind::Bump: return center - width;
        case ProfileKind::PowerLaw: return center;
        default: return 0.0;
    }
}

double RadialProfile::support_hi() const {
    switch (kind) {
        case ProfileKind::Gaussian: return center + kGaussCut * width;
        case ProfileKind::Bump: return center + width;
        case ProfileKind::PowerLaw: return std::numeric_limits<double>::infinity();
        default: return 0.0;
    }
}

RadialProfile RadialProfile::gaussian(double a, double c, double w, ProfileCoord coord) {
    return RadialProfile{ProfileKind::Gaussian, coord, a, c, w, 0.0};
}

RadialProfile RadialProfile::bump(double a, double c, double w, ProfileCoord coord) {
    return RadialProfile{ProfileKind::Bump, coord, a, c, w, 0.0};
}

RadialProfile RadialProfile::power_law(double a, double start, double p) {
    return RadialProfile{ProfileKind::PowerLaw, ProfileCoord::R, a, start, 1.0, p};
}

double TemporalProfile::operator()(double t) const {
    return amplitude * bump_shape((t - center) / width);
}

double TemporalProfile::integral() const { return amplitude * width * kBumpIntegral; }

ProfileKind parse_profile_kind(const std::string& s) {
    if (s == "zero") return ProfileKind::Zero;
    if (s == "gaussian") return ProfileKind::Gaussian;
    if (s == "bump") return ProfileKind::Bump;
    if (s == "power") return ProfileKind::PowerLaw;
    throw ConfigError("unknown profile kind '" + s + "' (zero|gaussian|bump|power)");
}

ProfileCoord parse_profile_coord(const std::string& s) {
    if (s == "r") return ProfileCoord::R;
    if (s == "rstar") return ProfileCoord::Rstar;
    throw ConfigError("unknown profile coordinate '" + s + "' (r|rstar)");
}

const char* to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Zero: return "zero";
        case ProfileKind::Gaussian: return "gaussian";
        case ProfileKind::Bump: return "bump";
        case ProfileKind::PowerLaw: return "power";
    }
    return "?";
}

const char* to_string(ProfileCoord c) { return c == ProfileCoord::R ? "r" : "rstar"; }

}  // namespace latetail
