#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pnsmc/controlsys.hpp"

namespace pnsmc {

/// Flat key = value configuration: one pair per line, `#` comments, blank
/// lines ignored. Values keep their text; typed access parses on demand.
class Config {
public:
    std::optional<std::string_view> get(std::string_view key) const;
    /// Typed getters throw std::invalid_argument naming the key when the
    /// value does not parse.
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    double get_real(std::string_view key, double fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;

    bool empty() const { return entries_.empty(); }
    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }
    void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Throws ParseError with the line for lines that are not `key = value`.
Config parse_config_text(std::string_view text);

/// parse_config_text over a file; missing files raise ParseError at line 0.
Config load_config_file(const std::string& path);

/// Overrides system parameters from config keys named after the fields
/// (e.g. skip_limit, sensor_mttf). Throws std::invalid_argument for keys
/// that match no parameter.
SystemParams apply_system_params(const Config& config, SystemParams base);

}  // namespace pnsmc
