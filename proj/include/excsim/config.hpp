#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "excsim/device.hpp"
#include "excsim/photonics.hpp"
#include "excsim/pulse.hpp"

namespace excsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` file with dotted section names and '#' comments.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

struct ExperimentConfig {
    DeviceParams device;
    DetectionModel detection;
    PulseProfile pulse;
    std::string experiment = "fig1d";
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    int workers = 0; // 0 = runtime default
    KeyValueConfig raw; // experiment-specific and accept.* keys

    static ExperimentConfig from_config(const KeyValueConfig& cfg);
};

} // namespace excsim
