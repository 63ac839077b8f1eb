#include "excsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace excsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "': not a number: '" + it->second + "'");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "': not an integer: '" + it->second + "'");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": key '" + key + "': not a boolean: '" + it->second + "'");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
    ExperimentConfig ec;
    ec.raw = cfg;

    DeviceParams& d = ec.device;
    d.gradient_k = cfg.get_double("device.gradient_k", d.gradient_k);
    d.F0 = cfg.get_double("device.F0", d.F0);
    d.s0 = cfg.get_double("device.s0", d.s0);
    d.V_bi = cfg.get_double("device.V_bi", d.V_bi);
    d.d = cfg.get_double("device.d", d.d);
    d.tau_r = cfg.get_double("device.tau_r", d.tau_r);
    d.T_cross = cfg.get_double("device.T_cross", d.T_cross);
    d.T_spin = cfg.get_double("device.T_spin", d.T_spin);
    d.validate();

    DetectionModel& m = ec.detection;
    m.irf_sigma = cfg.get_double("detection.irf_sigma", m.irf_sigma);
    m.init_jitter_sigma = cfg.get_double("detection.init_jitter_sigma", m.init_jitter_sigma);
    m.stark_window_sigma = cfg.get_double("detection.stark_window_sigma", m.stark_window_sigma);
    m.reference_field = cfg.get_double("detection.reference_field", m.reference_field);
    m.photon_budget = cfg.get_double("detection.photon_budget", m.photon_budget);
    m.poisson_enabled = cfg.get_bool("detection.poisson_enabled", m.poisson_enabled);
    m.time_bin = cfg.get_double("detection.time_bin", m.time_bin);

    PulseProfile& pu = ec.pulse;
    pu.baseline_field = cfg.get_double("pulse.baseline_field", -175.0);
    if (cfg.has("pulse.amplitude") || cfg.has("pulse.center") || cfg.has("pulse.fwhm")) {
        GaussianPulse g;
        g.amplitude = cfg.get_double("pulse.amplitude", 0.0);
        g.fwhm = cfg.get_double("pulse.fwhm", 0.389);
        g.center = cfg.get_double("pulse.center", 0.25 + 0.5 * g.fwhm);
        pu.pulses.push_back(g);
    }
    if (cfg.get_bool("pulse.ringing_enabled", false)) {
        Ringing r;
        r.fraction = cfg.get_double("pulse.ringing.fraction", r.fraction);
        r.frequency = cfg.get_double("pulse.ringing.frequency", r.frequency);
        r.damping_time = cfg.get_double("pulse.ringing.damping_time", r.damping_time);
        pu.ringing = r;
    }

    ec.experiment = cfg.get_string("experiment", ec.experiment);
    static const std::vector<std::string> known{"fig1d", "fig2", "fig3b", "fig3cf", "fig4", "sweep"};
    if (std::find(known.begin(), known.end(), ec.experiment) == known.end())
        throw ConfigError("unknown experiment name: '" + ec.experiment + "'");
    ec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(ec.seed)));
    ec.output_dir = cfg.get_string("output_dir", ec.output_dir);
    ec.workers = static_cast<int>(cfg.get_int("workers", ec.workers));
    return ec;
}

} // namespace excsim
