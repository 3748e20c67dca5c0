#pragma once

#include "epiwatch/core/error.hpp"
#include "epiwatch/projector/serial_interval.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiwatch::service {

struct ApiConfig {
    std::string bind_address = "127.0.0.1:8080";
    std::filesystem::path data_dir = "data/sample";
    /// Seconds between snapshot refreshes; 0 disables periodic refresh.
    unsigned refresh_interval = 0;
    double si_shape = projector::kDefaultSiShape;
    double si_scale = projector::kDefaultSiScale;
    std::vector<std::string> cors_allowed_origins;
    std::size_t projection_cache_size = 64;
};

struct HostPort {
    std::string host;
    int port = 0;
};

inline HostPort split_bind_address(std::string_view bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw Error(Errc::InvalidParameter, "bind address must be host:port, got '" + std::string(bind) + "'");
    }
    HostPort hp;
    hp.host = std::string(bind.substr(0, colon));
    const auto port = bind.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), hp.port);
    if (ec != std::errc{} || ptr != port.data() + port.size() || hp.port < 0 || hp.port > 65535) {
        throw Error(Errc::InvalidParameter, "invalid port in '" + std::string(bind) + "'");
    }
    return hp;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::string unquote(std::string_view v, std::size_t line) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
    if (v.find_first_of("\"[]") != std::string_view::npos) {
        throw Error(Errc::RowError, "malformed string value", line);
    }
    return std::string(v);
}

/// Drops a `#` comment that is not inside a quoted string.
inline std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

template <class T>
T number(std::string_view v, std::size_t line) {
    v = trim(v);
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw Error(Errc::RowError, "expected a number, got '" + std::string(v) + "'", line);
    }
    return out;
}

inline std::vector<std::string> string_list(std::string_view v, std::size_t line) {
    v = trim(v);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        throw Error(Errc::RowError, "expected a [\"...\"] list", line);
    }
    v = trim(v.substr(1, v.size() - 2));
    std::vector<std::string> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (!item.empty()) out.push_back(unquote(item, line));
        if (comma == std::string_view::npos) break;
        v = v.substr(comma + 1);
    }
    return out;
}

}  // namespace detail

/// Flat TOML subset: `key = value` per line, `#` comments, quoted strings,
/// numbers and single-line string arrays.
inline ApiConfig parse_config(std::string_view text, ApiConfig config = {}) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        line = detail::strip_comment(line);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::RowError, "expected key = value", line_no);
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = line.substr(eq + 1);
        if (key == "bind") config.bind_address = detail::unquote(value, line_no);
        else if (key == "data_dir") config.data_dir = detail::unquote(value, line_no);
        else if (key == "refresh_interval") config.refresh_interval = detail::number<unsigned>(value, line_no);
        else if (key == "si_shape") config.si_shape = detail::number<double>(value, line_no);
        else if (key == "si_scale") config.si_scale = detail::number<double>(value, line_no);
        else if (key == "cors_allowed_origins") config.cors_allowed_origins = detail::string_list(value, line_no);
        else if (key == "projection_cache_size") config.projection_cache_size = detail::number<std::size_t>(value, line_no);
        else throw Error(Errc::RowError, "unknown config key '" + std::string(key) + "'", line_no);
    }
    return config;
}

/// EPIWATCH_DATA_DIR and EPIWATCH_BIND override the file.
inline void apply_env_overrides(ApiConfig& config,
                                const std::function<const char*(const char*)>& getenv = [](const char* name) {
                                    return std::getenv(name);
                                }) {
    if (const char* dir = getenv("EPIWATCH_DATA_DIR"); dir && *dir) config.data_dir = dir;
    if (const char* bind = getenv("EPIWATCH_BIND"); bind && *bind) config.bind_address = bind;
}

}  // namespace epiwatch::service
