#pragma once

// INI-style experiment configuration: `[section]` headers, `key = value`
// lines, `#` or `;` comments.  Every key is checked against a fixed schema
// (docs/config.md).  A value written as `[a, b, c]` is a ranged parameter and
// is only accepted by `sweep`.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latetail/background.hpp"
#include "latetail/evolve.hpp"
#include "latetail/profiles.hpp"

namespace latetail {

class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string str(const std::string& section, const std::string& key, const std::string& def) const;
    double real(const std::string& section, const std::string& key, double def) const;
    int integer(const std::string& section, const std::string& key, int def) const;
    bool boolean(const std::string& section, const std::string& key, bool def) const;
    std::vector<double> reals(const std::string& section, const std::string& key, std::vector<double> def) const;
    std::string required(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // Ranged parameter ("section.key") and its values; empty if none.
    std::string ranged_key() const { return ranged_key_; }
    std::vector<std::string> ranged_values() const { return ranged_values_; }
    // One concrete config per ranged value.
    std::vector<Config> expand() const;

    // Sorted "section.key = value" lines; the hash is SHA-256 of this text.
    std::string canonical() const;
    std::string hash() const;
    const std::string& origin() const { return origin_; }
    // Directory of the config file, for resolving relative paths.
    std::string resolve_path(const std::string& p) const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::string ranged_key_;
    std::vector<std::string> ranged_values_;
    std::string origin_;
    std::string base_dir_;
};

std::string sha256_hex(const std::string& data);

// Typed views of the shared sections.
BackgroundSpec background_from(const Config& c);
Mode mode_from(const Config& c);
// Profile `name` in `section`: keys name, name.amplitude, name.center,
// name.width, name.coord, name.power.  Absent means zero.
RadialProfile profile_from(const Config& c, const std::string& section, const std::string& name);
TemporalProfile temporal_from(const Config& c, const std::string& section, const std::string& name);
CauchyData cauchy_data_from(const Config& c);
ForcingSpec forcing_from(const Config& c);

}  // namespace latetail
