#include "latetail/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "latetail/errors.hpp"

namespace latetail {

namespace {

enum class KeyType { Real, Int, Bool, Text, RealList, Choice };

struct KeySpec {
    KeyType type;
    std::vector<std::string> choices;  // Choice only
};

using Schema = std::map<std::string, std::map<std::string, KeySpec>>;

void add_profile(std::map<std::string, KeySpec>& s, const std::string& name) {
    s[name] = {KeyType::Choice, {"zero", "gaussian", "bump", "power"}};
    for (const char* k : {".amplitude", ".center", ".width", ".power"}) s[name + k] = {KeyType::Real, {}};
    s[name + ".coord"] = {KeyType::Choice, {"r", "rstar"}};
}

const Schema& schema() {
    static const Schema S = [] {
        Schema s;
        const KeySpec R{KeyType::Real, {}}, I{KeyType::Int, {}}, B{KeyType::Bool, {}}, T{KeyType::Text, {}},
            L{KeyType::RealList, {}};
        s["experiment"] = {{"kind", {KeyType::Choice,
                                     {"evolve", "spectral", "model", "expansion", "fit-tail", "ray-profile",
                                      "kerr-constant", "verify"}}},
                           {"label", T}};
        s["background"] = {{"kind", {KeyType::Choice, {"schwarzschild", "flat"}}},
                           {"mass", R},
                           {"potential", {KeyType::Choice, {"none", "inverse_cubic", "inverse_quartic", "custom"}}},
                           {"amplitude", R},
                           {"table", T},
                           {"decay_order", I},
                           {"kerr_a", R}};
        s["mode"] = {{"l", I}};
        s["grid"] = {{"scheme", {KeyType::Choice, {"leapfrog", "double-null"}}},
                     {"rstar_min", R},
                     {"rstar_max", R},
                     {"dx", R},
                     {"cfl", R},
                     {"t_end", R},
                     {"sommerfeld_left", B},
                     {"sommerfeld_right", B},
                     {"u0", R},
                     {"v0", R},
                     {"h", R},
                     {"u_max", R},
                     {"v_max", R}};
        add_profile(s["data"], "phi0");
        add_profile(s["data"], "phi1");
        add_profile(s["data"], "ingoing");
        add_profile(s["forcing"], "f");
        for (const char* k : {"chi.amplitude", "chi.center", "chi.width"}) s["forcing"][k] = R;
        s["observers"] = {{"radii", L}, {"radiation_v", R}, {"rays", L}, {"sample_dt", R}, {"energy_stride", I}};
        s["tail"] = {{"target_exponent", R}, {"window_lo", R},        {"window_hi", R},
                     {"predicted", T},       {"coeff_tolerance", R},  {"exponent_tolerance", R},
                     {"input", T},           {"column", T},           {"c_M", R}};
        s["spectral"] = {{"sigma_min", R},    {"sigma_max", R},  {"n_sigma", I}, {"r_obs", R},
                         {"series_order", I}, {"sigma_rout", R}, {"r_out_min", R}, {"rtol", R}};
        s["model"] = {{"rhat_min", R}, {"rhat_max", R}, {"n", I}, {"method", {KeyType::Choice, {"quadrature", "ode", "both"}}}};
        s["expansion"] = {{"sample_radii", L}};
        s["kerr"] = {{"a", R},          {"radial_panels", I}, {"theta_panels", I},
                     {"phi_points", I}, {"phi1_cos2", R},     {"phi0_azimuthal", R}};
        s["verify"] = {{"criteria", T}, {"compare_a", T}, {"compare_b", T}, {"tolerance", R}};
        return s;
    }();
    return S;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

bool parse_real(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && std::isfinite(v);
}

bool parse_int(const std::string& s, int& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    long x = std::strtol(s.c_str(), &end, 10);
    if (!end || *end != '\0' || x < -2147483647L || x > 2147483647L) return false;
    v = int(x);
    return true;
}

bool parse_bool(const std::string& s, bool& v) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return v = true, true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return v = false, true;
    return false;
}

void check_value(const std::string& where, const KeySpec& k, const std::string& v) {
    double d;
    int i;
    bool b;
    switch (k.type) {
        case KeyType::Real:
            if (!parse_real(v, d)) throw ConfigError(where + ": expected a real number, got '" + v + "'");
            break;
        case KeyType::Int:
            if (!parse_int(v, i)) throw ConfigError(where + ": expected an integer, got '" + v + "'");
            break;
        case KeyType::Bool:
            if (!parse_bool(v, b)) throw ConfigError(where + ": expected true/false, got '" + v + "'");
            break;
        case KeyType::RealList:
            for (const auto& x : split_list(v))
                if (!parse_real(x, d)) throw ConfigError(where + ": expected a list of reals, got '" + v + "'");
            break;
        case KeyType::Choice:
            if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
                std::string opts;
                for (const auto& c : k.choices) opts += (opts.empty() ? "" : "|") + c;
                throw ConfigError(where + ": '" + v + "' is not one of " + opts);
            }
            break;
        case KeyType::Text:
            break;
    }
}

const KeySpec& lookup(const std::string& where, const std::string& section, const std::string& key) {
    auto s = schema().find(section);
    if (s == schema().end()) throw ConfigError(where + ": unknown section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    return k->second;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw Error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        if (section.empty()) throw ConfigError(where + ": key outside any section");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        const KeySpec& spec = lookup(where, section, key);
        if (c.values_[section].count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') throw ConfigError(where + ": unterminated range");
            if (!c.ranged_key_.empty())
                throw ConfigError(where + ": more than one ranged parameter (" + c.ranged_key_ + " and " + section +
                                  "." + key + ")");
            c.ranged_key_ = section + "." + key;
            c.ranged_values_ = split_list(val.substr(1, val.size() - 2));
            if (c.ranged_values_.empty()) throw ConfigError(where + ": empty range");
            for (const auto& v : c.ranged_values_) check_value(where, spec, v);
        } else {
            check_value(where, spec, val);
        }
        c.values_[section][key] = val;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    Config c = parse(ss.str(), path);
    auto slash = path.find_last_of('/');
    c.base_dir_ = slash == std::string::npos ? "" : path.substr(0, slash + 1);
    return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    return s != values_.end() && s->second.count(key);
}

namespace {
void refuse_range(const std::string& v, const std::string& section, const std::string& key) {
    if (!v.empty() && v.front() == '[')
        throw ConfigError("[" + section + "] " + key + ": ranged values are only accepted by 'sweep'");
}
}  // namespace

std::string Config::str(const std::string& section, const std::string& key, const std::string& def) const {
    if (!has(section, key)) return def;
    const std::string& v = values_.at(section).at(key);
    refuse_range(v, section, key);
    return v;
}

std::string Config::required(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return str(section, key, "");
}

double Config::real(const std::string& section, const std::string& key, double def) const {
    if (!has(section, key)) return def;
    double v = def;
    parse_real(str(section, key, ""), v);
    return v;
}

int Config::integer(const std::string& section, const std::string& key, int def) const {
    if (!has(section, key)) return def;
    int v = def;
    parse_int(str(section, key, ""), v);
    return v;
}

bool Config::boolean(const std::string& section, const std::string& key, bool def) const {
    if (!has(section, key)) return def;
    bool v = def;
    parse_bool(str(section, key, ""), v);
    return v;
}

std::vector<double> Config::reals(const std::string& section, const std::string& key, std::vector<double> def) const {
    if (!has(section, key)) return def;
    std::vector<double> out;
    for (const auto& x : split_list(str(section, key, ""))) {
        double v;
        parse_real(x, v);
        out.push_back(v);
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    const std::string where = origin_ + " (override)";
    check_value(where + " " + section + "." + key, lookup(where, section, key), value);
    values_[section][key] = value;
}

std::vector<Config> Config::expand() const {
    if (ranged_key_.empty()) return {*this};
    auto dot = ranged_key_.find('.');
    std::string section = ranged_key_.substr(0, dot), key = ranged_key_.substr(dot + 1);
    std::vector<Config> out;
    for (const auto& v : ranged_values_) {
        Config c = *this;
        c.ranged_key_.clear();
        c.ranged_values_.clear();
        c.values_[section][key] = v;
        out.push_back(std::move(c));
    }
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [section, kv] : values_)
        for (const auto& [key, val] : kv) out += section + "." + key + " = " + val + "\n";
    return out;
}

std::string Config::hash() const { return sha256_hex(canonical()); }

std::string Config::resolve_path(const std::string& p) const {
    if (p.empty() || p.front() == '/') return p;
    return base_dir_ + p;
}

// ---------------------------------------------------------------- typed views

BackgroundSpec background_from(const Config& c) {
    const std::string kind = c.str("background", "kind", "schwarzschild");
    BackgroundSpec spec;
    if (kind == "schwarzschild") {
        if (c.has("background", "potential") && c.str("background", "potential", "none") != "none")
            throw ConfigError("[background] potential is only used with kind = flat");
        spec = BackgroundSpec::schwarzschild(c.real("background", "mass", 1.0));
    } else {
        if (c.has("background", "mass") && c.real("background", "mass", 0.0) != 0.0)
            throw ConfigError("[background] flat backgrounds have mass 0");
        const std::string pot = c.str("background", "potential", "none");
        const double v0 = c.real("background", "amplitude", 0.0);
        PotentialSpec p;
        if (pot == "none") {
            p = PotentialSpec::none();
        } else if (pot == "inverse_cubic") {
            p = PotentialSpec::inverse_cubic(v0);
        } else if (pot == "inverse_quartic") {
            p = PotentialSpec::inverse_quartic(v0);
        } else {
            std::string path = c.resolve_path(c.required("background", "table"));
            std::ifstream f(path);
            if (!f) throw ConfigError("cannot read potential table '" + path + "'");
            std::vector<double> r, v;
            std::string line;
            while (std::getline(f, line)) {
                line = trim(line);
                if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
                auto cols = split_list(line);
                double a, b;
                if (cols.size() < 2 || !parse_real(cols[0], a) || !parse_real(cols[1], b))
                    throw ConfigError("potential table '" + path + "': malformed line '" + line + "'");
                r.push_back(a);
                v.push_back(b);
            }
            p = PotentialSpec::custom(r, v, c.integer("background", "decay_order", 3));
        }
        spec = BackgroundSpec::flat(p);
    }
    spec.kerr_a = c.real("background", "kerr_a", 0.0);
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[background] ") + e.what());
    }
    return spec;
}

Mode mode_from(const Config& c) {
    int l = c.integer("mode", "l", 0);
    if (l < 0) throw ConfigError("[mode] l must be non-negative");
    return Mode{l};
}

RadialProfile profile_from(const Config& c, const std::string& section, const std::string& name) {
    const std::string kind = c.str(section, name, "zero");
    const double a = c.real(section, name + ".amplitude", 1.0), ctr = c.real(section, name + ".center", 0.0),
                 w = c.real(section, name + ".width", 1.0);
    const ProfileCoord coord = parse_profile_coord(c.str(section, name + ".coord", "r"));
    if (kind == "zero") return RadialProfile{};
    if (kind != "power" && !(w > 0.0)) throw ConfigError("[" + section + "] " + name + ".width must be positive");
    if (kind == "gaussian") return RadialProfile::gaussian(a, ctr, w, coord);
    if (kind == "bump") return RadialProfile::bump(a, ctr, w, coord);
    return RadialProfile::power_law(a, ctr, c.real(section, name + ".power", 5.0));
}

TemporalProfile temporal_from(const Config& c, const std::string& section, const std::string& name) {
    TemporalProfile t{c.real(section, name + ".amplitude", 1.0), c.real(section, name + ".center", 0.0),
                      c.real(section, name + ".width", 1.0)};
    if (!(t.width > 0.0)) throw ConfigError("[" + section + "] " + name + ".width must be positive");
    return t;
}

CauchyData cauchy_data_from(const Config& c) {
    return CauchyData{profile_from(c, "data", "phi0"), profile_from(c, "data", "phi1")};
}

ForcingSpec forcing_from(const Config& c) {
    ForcingSpec f;
    f.fr = profile_from(c, "forcing", "f");
    f.chi = temporal_from(c, "forcing", "chi");
    return f;
}

}  // namespace latetail
