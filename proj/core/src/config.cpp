#include "pnsmc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pnsmc/errors.hpp"

namespace pnsmc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::optional<std::string_view> Config::get(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) {
        throw std::invalid_argument("config key '" + std::string(key) +
                                    "' needs an integer, got '" + std::string(*v) + "'");
    }
    return out;
}

double Config::get_real(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        std::string s(*v);
        double out = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + std::string(key) + "' needs a number, got '" +
                                    std::string(*v) + "'");
    }
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw std::invalid_argument("config key '" + std::string(key) +
                                "' needs true or false, got '" + std::string(*v) + "'");
}

Config parse_config_text(std::string_view text) {
    Config config;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, eol - pos);
        if (auto comment = line.find('#'); comment != std::string_view::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (!line.empty()) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(line_no, 1, "expected key = value");
            }
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) throw ParseError(line_no, 1, "empty config key");
            config.set(std::move(key), std::move(value));
        }
        if (eol == text.size()) break;
        pos = eol + 1;
    }
    return config;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, 0, "cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

SystemParams apply_system_params(const Config& config, SystemParams base) {
    for (const auto& [key, value] : config.entries()) {
        (void)value;
        if (key == "sensor_groups") {
            base.sensor_groups = config.get_int(key, base.sensor_groups);
        } else if (key == "sensors_per_group") {
            base.sensors_per_group = config.get_int(key, base.sensors_per_group);
        } else if (key == "sensor_quorum") {
            base.sensor_quorum = config.get_int(key, base.sensor_quorum);
        } else if (key == "sensors_per_group_quorum") {
            base.sensors_per_group_quorum = config.get_int(key, base.sensors_per_group_quorum);
        } else if (key == "actuator_groups") {
            base.actuator_groups = config.get_int(key, base.actuator_groups);
        } else if (key == "actuators_per_group") {
            base.actuators_per_group = config.get_int(key, base.actuators_per_group);
        } else if (key == "actuator_quorum") {
            base.actuator_quorum = config.get_int(key, base.actuator_quorum);
        } else if (key == "actuators_per_group_quorum") {
            base.actuators_per_group_quorum = config.get_int(key, base.actuators_per_group_quorum);
        } else if (key == "skip_limit") {
            base.skip_limit = config.get_int(key, base.skip_limit);
        } else if (key == "sensor_mttf") {
            base.sensor_mttf = config.get_real(key, base.sensor_mttf);
        } else if (key == "actuator_mttf") {
            base.actuator_mttf = config.get_real(key, base.actuator_mttf);
        } else if (key == "transient_mttf") {
            base.transient_mttf = config.get_real(key, base.transient_mttf);
        } else if (key == "processor_mttf") {
            base.processor_mttf = config.get_real(key, base.processor_mttf);
        } else if (key == "cycle_time") {
            base.cycle_time = config.get_real(key, base.cycle_time);
        } else if (key == "reboot_mean") {
            base.reboot_mean = config.get_real(key, base.reboot_mean);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return base;
}

}  // namespace pnsmc
