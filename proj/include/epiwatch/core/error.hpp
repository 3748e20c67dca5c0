#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiwatch {

enum class Errc {
    EmptyInput,
    InvalidParameter,
    OutOfRange,
    SchemaError,
    RowError,
    UnknownRegion,
    AmbiguousRegion,
    InsufficientData,
    UndefinedDoubling,
    InvalidSerialInterval,
    NoWaveStructure,
    IoError,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::SchemaError: return "SchemaError";
    case Errc::RowError: return "RowError";
    case Errc::UnknownRegion: return "UnknownRegion";
    case Errc::AmbiguousRegion: return "AmbiguousRegion";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::UndefinedDoubling: return "UndefinedDoubling";
    case Errc::InvalidSerialInterval: return "InvalidSerialInterval";
    case Errc::NoWaveStructure: return "NoWaveStructure";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure in the library is raised as an Error carrying a taxonomy
/// code. RowError failures carry the 1-based line number; AmbiguousRegion and
/// UnknownRegion may carry candidate codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    Error(Errc code, const std::string& message, std::size_t line)
        : std::runtime_error(std::string(to_string(code)) + ": line " + std::to_string(line) + ": " + message),
          code_(code), detail_(message), line_(line) {}

    Error(Errc code, const std::string& message, std::vector<std::string> candidates)
        : Error(code, message) {
        candidates_ = std::move(candidates);
    }

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    const std::vector<std::string>& candidates() const noexcept { return candidates_; }

private:
    Errc code_;
    std::string detail_;
    std::optional<std::size_t> line_;
    std::vector<std::string> candidates_;
};

}  // namespace epiwatch
