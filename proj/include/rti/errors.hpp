// Error codes and the exception type shared by all simulator modules.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rti {

enum class ErrorCode {
    ForbiddenTransition,
    GroundStateEmitter,
    NoAbsorbers,
    ChannelMismatch,
    EnergyMismatch,
    InvalidAlpha,
    InvalidThresholds,
    InvalidTarget,
    InvalidCount,
    DuplicateEvent,
    CycleDetected,
    UnknownEvent,
    SchemaError,
    NormalizationError,
    InvalidScenario,
    IoError,
};

std::string_view to_string(ErrorCode code);

class SimError : public std::runtime_error {
public:
    SimError(ErrorCode code, std::string message, std::string json_path = {})
        : std::runtime_error(std::move(message)),
          code_(code),
          json_path_(std::move(json_path)) {}

    ErrorCode code() const noexcept { return code_; }
    // JSON path of the offending field; empty unless this is a SchemaError.
    const std::string& json_path() const noexcept { return json_path_; }

private:
    ErrorCode code_;
    std::string json_path_;
};

} // namespace rti
